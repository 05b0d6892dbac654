//! Weaving motifs on the unit torus `[0,1)^2`.
//!
//! Set `i` of a solution is drawn as `copies_i` parallel closed geodesics
//! `a*y - b*x = offset (mod 1)`. Lifted to the plane, the lines of one set are
//! numbered consecutively by their *line index* `L = copies * (f - base)`
//! where `f = a*y - b*x` and `base` is the smallest offset of the set. A
//! crossing of lines `u` (set `i`) and `v` (set `j`) reads its sign from the
//! crossing matrix at row `sigma*(u - u0)`, column `tau*(v - v0)` (mod `m`),
//! anchored at the crossing with the smallest `(y, x)`. The signs
//! `sigma = sign(det)` and `tau = -sigma` make both indices grow along the
//! strands' natural direction `(a, b)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::rational::Ratio;
use num::{Signed, Zero};
use thiserror::Error;

use crate::matrix::{validate_matrix, CrossingMatrix, MatrixError, MatrixSet, Rotation};
use crate::solver::{SearchBounds, SolveError, SolveResult, Solver};
use crate::weave::{CrossingSequence, Diagnostic, Severity, Slope, WeaveSpec};

pub type Q = Ratio<i64>;

pub(crate) fn frac(q: Q) -> Q {
    q - q.floor()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MotifError {
    #[error("no offsets in general position found (triple point or coinciding strands)")]
    GeneralPositionFailure,
    #[error("matrices do not fit the spec: {0}")]
    MatrixModuleMismatch(MatrixError),
    #[error("crossing matrices are not periodic on this solution's lattice")]
    MatrixNotRealizable,
    #[error("solution does not match the spec: {0}")]
    SolutionMismatch(String),
    #[error("non-periodic pattern: {0}")]
    NonPeriodicPattern(String),
    #[error("invalid motif: {0}")]
    InvalidMotif(String),
    #[error("unknown strand {set},{index}")]
    UnknownStrand { set: usize, index: usize },
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("none of the first {0} solutions can carry these matrices")]
    NoRealizableSolution(usize),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// 0-based set and strand indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StrandId {
    pub set: usize,
    pub index: usize,
}

impl fmt::Display for StrandId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.set + 1, self.index + 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Strand {
    pub id: StrandId,
    pub slope: Slope,
    /// In `[0, 1)`.
    pub offset: Q,
}

/// A point of the torus or the plane. Ordered by `(y, x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Point {
    pub x: Q,
    pub y: Q,
}

impl Point {
    pub fn new(x: Q, y: Q) -> Self {
        Self { x, y }
    }

    pub fn wrapped(self) -> Self {
        Self::new(frac(self.x), frac(self.y))
    }
}

impl Ord for Point {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.y, self.x).cmp(&(other.y, other.x))
    }
}

impl PartialOrd for Point {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Crossing {
    pub position: Point,
    pub upper: StrandId,
    pub lower: StrandId,
}

impl Crossing {
    /// `+1` if `set` passes over at this crossing, `-1` if under.
    pub fn sign_for(&self, set: usize) -> i8 {
        if self.upper.set == set {
            1
        } else {
            -1
        }
    }

    pub fn involves(&self, id: StrandId) -> bool {
        self.upper == id || self.lower == id
    }
}

/// `f(P) = a*y - b*x`, constant along lines of slope `(a, b)`.
pub(crate) fn level(s: Slope, p: Point) -> Q {
    p.y * s.a() - p.x * s.b()
}

/// Intersection in the plane of `level(s1) = r1` and `level(s2) = r2`.
pub(crate) fn intersect_lines(s1: Slope, r1: Q, s2: Slope, r2: Q) -> Point {
    let d = s1.det(&s2);
    debug_assert!(d != 0);
    let x = (r1 * s2.a() - r2 * s1.a()) / d;
    let y = (r1 * s2.b() - r2 * s1.b()) / d;
    Point::new(x, y)
}

/// All intersection points on the torus of two closed geodesics.
fn torus_intersections(s1: &Strand, s2: &Strand) -> Vec<Point> {
    let d = s1.slope.det(&s2.slope).abs();
    let mut out = BTreeSet::new();
    for n1 in 0..d {
        for n2 in 0..d {
            let p = intersect_lines(s1.slope, s1.offset + n1, s2.slope, s2.offset + n2);
            out.insert(p.wrapped());
        }
    }
    out.into_iter().collect()
}

/// Lattice of one set: its slope, number of strands and smallest offset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct SetLayout {
    pub slope: Slope,
    pub copies: i64,
    pub base: Q,
    /// Strand index for each line index residue mod `copies`.
    pub by_residue: Vec<usize>,
}

impl SetLayout {
    /// Line index through `p`, if `p` lies on a line of this set.
    pub fn line_index(&self, p: Point) -> Option<i64> {
        let l = (level(self.slope, p) - self.base) * self.copies;
        l.is_integer().then(|| l.to_integer())
    }

    pub fn line_level(&self, l: i64) -> Q {
        self.base + Q::new(l, self.copies)
    }

    pub fn strand(&self, set: usize, l: i64) -> StrandId {
        StrandId {
            set,
            index: self.by_residue[l.rem_euclid(self.copies) as usize],
        }
    }
}

fn layouts(n_sets: usize, strands: &[Strand]) -> Result<Vec<SetLayout>, MotifError> {
    let mut out = Vec::with_capacity(n_sets);
    for set in 0..n_sets {
        let mut members: Vec<&Strand> = strands.iter().filter(|s| s.id.set == set).collect();
        if members.is_empty() {
            return Err(MotifError::InvalidMotif(format!("set {} has no strands", set + 1)));
        }
        members.sort_by_key(|s| s.offset);
        let slope = members[0].slope;
        if members.iter().any(|s| s.slope != slope) {
            return Err(MotifError::InvalidMotif(format!(
                "strands of set {} have different slopes",
                set + 1
            )));
        }
        let copies = members.len() as i64;
        let base = members[0].offset;
        let mut by_residue = Vec::with_capacity(members.len());
        for (r, s) in members.iter().enumerate() {
            if s.offset != base + Q::new(r as i64, copies) {
                return Err(MotifError::InvalidMotif(format!(
                    "strands of set {} are not evenly spaced",
                    set + 1
                )));
            }
            by_residue.push(s.id.index);
        }
        out.push(SetLayout {
            slope,
            copies,
            base,
            by_residue,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct Motif {
    spec: WeaveSpec,
    strands: Vec<Strand>,
    crossings: Vec<Crossing>,
    layout: Vec<SetLayout>,
    by_position: BTreeMap<Point, usize>,
}

impl PartialEq for Motif {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec && self.strands == other.strands && self.crossings == other.crossings
    }
}

impl Eq for Motif {}

impl Motif {
    /// Assembles a motif from explicit parts. Strands of a set must share one
    /// slope and be evenly spaced; general position is *not* required (see
    /// [`validate_tiling`]).
    pub fn from_parts(
        spec: WeaveSpec,
        mut strands: Vec<Strand>,
        mut crossings: Vec<Crossing>,
    ) -> Result<Self, MotifError> {
        strands.sort_by_key(|s| s.id);
        let ids: BTreeSet<StrandId> = strands.iter().map(|s| s.id).collect();
        if ids.len() != strands.len() {
            return Err(MotifError::InvalidMotif("duplicate strand id".into()));
        }
        for s in &strands {
            if s.id.set >= spec.n_sets() {
                return Err(MotifError::InvalidMotif(format!(
                    "strand {} refers to a missing set",
                    s.id
                )));
            }
            if s.offset.is_negative() || s.offset >= Q::from_integer(1) {
                return Err(MotifError::InvalidMotif(format!(
                    "strand {} offset {} outside [0,1)",
                    s.id, s.offset
                )));
            }
        }
        for c in &crossings {
            for id in [c.upper, c.lower] {
                if !ids.contains(&id) {
                    return Err(MotifError::UnknownStrand {
                        set: id.set + 1,
                        index: id.index + 1,
                    });
                }
            }
            if c.upper.set == c.lower.set {
                return Err(MotifError::InvalidMotif(format!(
                    "crossing at {} joins two strands of set {}",
                    c.position,
                    c.upper.set + 1
                )));
            }
        }
        let layout = layouts(spec.n_sets(), &strands)?;
        crossings.sort_by_key(|c| (c.position, c.upper, c.lower));
        let by_position = crossings
            .iter()
            .enumerate()
            .map(|(k, c)| (c.position, k))
            .collect();
        Ok(Self {
            spec,
            strands,
            crossings,
            layout,
            by_position,
        })
    }

    pub fn spec(&self) -> &WeaveSpec {
        &self.spec
    }

    pub fn strands(&self) -> &[Strand] {
        &self.strands
    }

    /// Sorted by position `(y, x)`.
    pub fn crossings(&self) -> &[Crossing] {
        &self.crossings
    }

    pub fn n_sets(&self) -> usize {
        self.spec.n_sets()
    }

    pub fn strand(&self, id: StrandId) -> Option<&Strand> {
        self.strands.iter().find(|s| s.id == id)
    }

    pub fn copies(&self, set: usize) -> usize {
        self.layout[set].copies as usize
    }

    pub fn slope(&self, set: usize) -> Slope {
        self.layout[set].slope
    }

    pub fn crossing_at(&self, p: Point) -> Option<&Crossing> {
        self.by_position.get(&p.wrapped()).map(|&k| &self.crossings[k])
    }

    pub(crate) fn layout(&self, set: usize) -> &SetLayout {
        &self.layout[set]
    }

    /// Crossings between sets `i` and `j` per unordered pair.
    pub fn pair_counts(&self) -> BTreeMap<(usize, usize), usize> {
        let mut out = BTreeMap::new();
        for c in &self.crossings {
            let (a, b) = (c.upper.set, c.lower.set);
            *out.entry((a.min(b), a.max(b))).or_insert(0) += 1;
        }
        out
    }

    /// Whether line `u` of set `i` passes over line `v` of set `j` in the
    /// plane lift. `None` if the two lines do not meet at a listed crossing.
    pub(crate) fn over_in_plane(&self, i: usize, u: i64, j: usize, v: i64) -> Option<bool> {
        let (li, lj) = (&self.layout[i], &self.layout[j]);
        if li.slope.det(&lj.slope) == 0 {
            return None;
        }
        let p = intersect_lines(li.slope, li.line_level(u), lj.slope, lj.line_level(v));
        self.crossing_at(p).map(|c| c.upper.set == i)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("cell=1x1 N={}\n", self.n_sets());
        for s in &self.strands {
            out.push_str(&format!(
                "S {} {} {} {} {}/{}\n",
                s.id.set + 1,
                s.id.index + 1,
                s.slope.a(),
                s.slope.b(),
                s.offset.numer(),
                s.offset.denom()
            ));
        }
        for c in &self.crossings {
            out.push_str(&format!(
                "X {}/{} {}/{} over={} under={}\n",
                c.position.x.numer(),
                c.position.x.denom(),
                c.position.y.numer(),
                c.position.y.denom(),
                c.upper,
                c.lower
            ));
        }
        out
    }
}

/// Reads a motif written by [`Motif::to_text`]; sequences come from `spec`.
pub fn parse_motif(text: &str, spec: &WeaveSpec) -> Result<Motif, MotifError> {
    let mut strands = Vec::new();
    let mut crossings = Vec::new();
    let mut header = false;
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let lineno = n + 1;
        let err = |message: String| MotifError::Parse {
            line: lineno,
            message,
        };
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if !header {
            if fields.len() != 2 || fields[0] != "cell=1x1" {
                return Err(err("expected header \"cell=1x1 N=<n>\"".into()));
            }
            let n_sets: usize = fields[1]
                .strip_prefix("N=")
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| err("bad N= field".into()))?;
            if n_sets != spec.n_sets() {
                return Err(err(format!(
                    "motif has N={n_sets} but the spec has {} sets",
                    spec.n_sets()
                )));
            }
            header = true;
            continue;
        }
        match fields[0] {
            "S" if fields.len() == 6 => {
                let set = parse_index(fields[1]).map_err(&err)?;
                let index = parse_index(fields[2]).map_err(&err)?;
                let a: i64 = fields[3].parse().map_err(|_| err("bad slope".into()))?;
                let b: i64 = fields[4].parse().map_err(|_| err("bad slope".into()))?;
                let slope = Slope::new(a, b).map_err(|e| err(e.to_string()))?;
                let offset = parse_q(fields[5]).map_err(&err)?;
                strands.push(Strand {
                    id: StrandId { set, index },
                    slope,
                    offset,
                });
            }
            "X" if fields.len() == 5 => {
                let x = parse_q(fields[1]).map_err(&err)?;
                let y = parse_q(fields[2]).map_err(&err)?;
                let upper = parse_strand_ref(fields[3], "over=").map_err(&err)?;
                let lower = parse_strand_ref(fields[4], "under=").map_err(&err)?;
                crossings.push(Crossing {
                    position: Point::new(x, y),
                    upper,
                    lower,
                });
            }
            _ => return Err(err(format!("unrecognized line {line:?}"))),
        }
    }
    if !header {
        return Err(MotifError::Parse {
            line: 0,
            message: "empty motif file".into(),
        });
    }
    Motif::from_parts(spec.clone(), strands, crossings)
}

fn parse_index(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(v) if v >= 1 => Ok(v - 1),
        _ => Err(format!("expected a 1-based index, got {s:?}")),
    }
}

fn parse_q(s: &str) -> Result<Q, String> {
    let (n, d) = s.split_once('/').unwrap_or((s, "1"));
    let n: i64 = n.parse().map_err(|_| format!("bad rational {s:?}"))?;
    let d: i64 = d.parse().map_err(|_| format!("bad rational {s:?}"))?;
    if d == 0 {
        return Err(format!("zero denominator in {s:?}"));
    }
    Ok(Q::new(n, d))
}

fn parse_strand_ref(s: &str, prefix: &str) -> Result<StrandId, String> {
    let body = s
        .strip_prefix(prefix)
        .ok_or_else(|| format!("expected {prefix}<set>,<index>"))?;
    let (set, index) = body
        .split_once(',')
        .ok_or_else(|| format!("expected {prefix}<set>,<index>"))?;
    Ok(StrandId {
        set: parse_index(set)?,
        index: parse_index(index)?,
    })
}

/// Unsigned crossing between two strands of different sets.
struct RawCrossing {
    position: Point,
    first: StrandId,
    second: StrandId,
}

/// Places `copies_i` strands of set `i` at offsets `(r + delta_i) / copies_i`
/// with `delta_i = (i + 1) / (7N)`. If three strands meet in a point, fixed
/// pseudo-random perturbations over prime denominators are tried in turn.
fn place_strands(
    spec: &WeaveSpec,
    sol: &SolveResult,
) -> Result<(Vec<Strand>, Vec<RawCrossing>), MotifError> {
    const PRIMES: [i64; 12] = [101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157];
    let n = spec.n_sets() as i64;
    let delta_for = |attempt: usize, i: usize| -> Q {
        if attempt == 0 {
            return Q::new(i as i64 + 1, 7 * n);
        }
        let p = PRIMES[attempt - 1];
        let h = (i as i64 + 1) * (37 * attempt as i64 + 11) + (attempt * attempt) as i64 * (i as i64 * i as i64 + 5);
        Q::new(1 + h.rem_euclid(p - 1), p)
    };
    for attempt in 0..=PRIMES.len() {
        let strands: Vec<Strand> = (0..spec.n_sets())
            .flat_map(|i| {
                let c = sol.copies[i] as i64;
                let delta = delta_for(attempt, i);
                (0..c).map(move |r| Strand {
                    id: StrandId {
                        set: i,
                        index: r as usize,
                    },
                    slope: sol.slopes[i],
                    offset: (delta + r) / c,
                })
            })
            .collect();
        if let Some(raw) = general_position_crossings(&strands) {
            return Ok((strands, raw));
        }
    }
    Err(MotifError::GeneralPositionFailure)
}

fn general_position_crossings(strands: &[Strand]) -> Option<Vec<RawCrossing>> {
    let mut seen = BTreeSet::new();
    let mut raw = Vec::new();
    for (k, s1) in strands.iter().enumerate() {
        for s2 in &strands[k + 1..] {
            if s1.id.set == s2.id.set {
                continue;
            }
            if s1.slope.det(&s2.slope) == 0 {
                if s1.offset == s2.offset {
                    return None;
                }
                continue;
            }
            for position in torus_intersections(s1, s2) {
                if !seen.insert(position) {
                    return None;
                }
                raw.push(RawCrossing {
                    position,
                    first: s1.id,
                    second: s2.id,
                });
            }
        }
    }
    Some(raw)
}

/// Orientation and anchor of one crossing pair.
struct PairFrame {
    m: i64,
    sigma: i64,
    tau: i64,
    u0: i64,
    v0: i64,
    /// Line index shifts of the two unit translations of the plane.
    periods: [(i64, i64); 2],
}

impl PairFrame {
    fn new(li: &SetLayout, lj: &SetLayout, anchor: Point, m: usize) -> Option<Self> {
        let d = li.slope.det(&lj.slope);
        let sigma = d.signum();
        Some(Self {
            m: m as i64,
            sigma,
            tau: -sigma,
            u0: li.line_index(anchor)?,
            v0: lj.line_index(anchor)?,
            periods: [
                (-li.slope.b() * li.copies, -lj.slope.b() * lj.copies),
                (li.slope.a() * li.copies, lj.slope.a() * lj.copies),
            ],
        })
    }

    fn cell(&self, u: i64, v: i64) -> (usize, usize) {
        (
            (self.sigma * (u - self.u0)).rem_euclid(self.m) as usize,
            (self.tau * (v - self.v0)).rem_euclid(self.m) as usize,
        )
    }

    /// Whether `matrix` is invariant under the lattice translations.
    fn admits(&self, matrix: &CrossingMatrix) -> bool {
        let m = self.m;
        self.periods.iter().all(|&(du, dv)| {
            let (sx, sy) = (self.sigma * du, self.tau * dv);
            (0..m).all(|x| {
                (0..m).all(|y| {
                    matrix.get(x as usize, y as usize)
                        == matrix.get((x + sx).rem_euclid(m) as usize, (y + sy).rem_euclid(m) as usize)
                })
            })
        })
    }
}

fn pair_key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

fn assign_signs(
    layout: &[SetLayout],
    raw: &[RawCrossing],
    matrices: &MatrixSet,
) -> Option<Vec<Crossing>> {
    let mut groups: BTreeMap<(usize, usize), Vec<&RawCrossing>> = BTreeMap::new();
    for r in raw {
        groups.entry(pair_key(r.first.set, r.second.set)).or_default().push(r);
    }
    let mut out = Vec::with_capacity(raw.len());
    for ((i, j), group) in groups {
        let matrix = matrices.get(i, j)?;
        let anchor = group.iter().map(|r| r.position).min()?;
        let frame = PairFrame::new(&layout[i], &layout[j], anchor, matrix.m())?;
        if !frame.admits(matrix) {
            return None;
        }
        for r in group {
            let (si, sj) = if r.first.set == i {
                (r.first, r.second)
            } else {
                (r.second, r.first)
            };
            let u = layout[i].line_index(r.position)?;
            let v = layout[j].line_index(r.position)?;
            let (x, y) = frame.cell(u, v);
            let (upper, lower) = if matrix.get(x, y) == 1 { (si, sj) } else { (sj, si) };
            out.push(Crossing {
                position: r.position,
                upper,
                lower,
            });
        }
    }
    Some(out)
}

/// Builds the motif of `sol` carrying the crossing matrices `matrices`.
///
/// If the matrices are not periodic on the solution's lattice as given, the
/// four rotations of the transform group are tried (applied uniformly to
/// every matrix); the result is then equivalent to `matrices`.
pub fn build_motif(
    spec: &WeaveSpec,
    sol: &SolveResult,
    matrices: &MatrixSet,
) -> Result<Motif, MotifError> {
    matrices
        .check_against(spec)
        .map_err(MotifError::MatrixModuleMismatch)?;
    let n = spec.n_sets();
    if sol.slopes.len() != n || sol.copies.len() != n || sol.copies.contains(&0) {
        return Err(MotifError::SolutionMismatch(format!(
            "solution has {} slopes and {} copy counts for {n} sets",
            sol.slopes.len(),
            sol.copies.len()
        )));
    }
    let (strands, raw) = place_strands(spec, sol)?;
    let layout = layouts(n, &strands)?;
    for rotation in Rotation::ALL {
        let rotated = matrices.map(|m| rotation.apply(m));
        if rotated.check_against(spec).is_err() {
            continue;
        }
        if let Some(crossings) = assign_signs(&layout, &raw, &rotated) {
            return Motif::from_parts(spec.clone(), strands, crossings);
        }
    }
    Err(MotifError::MatrixNotRealizable)
}

/// Walks the solutions of `spec` in order and builds the first motif that
/// can carry `matrices`, looking at no more than `max_candidates` solutions.
pub fn first_realizable(
    spec: &WeaveSpec,
    matrices: &MatrixSet,
    bounds: SearchBounds,
    max_candidates: usize,
) -> Result<(SolveResult, Motif), MotifError> {
    matrices
        .check_against(spec)
        .map_err(MotifError::MatrixModuleMismatch)?;
    let solver = Solver::new(spec, bounds)?;
    let mut seen = 0;
    for sol in solver.iter_from(0).take(max_candidates) {
        seen += 1;
        match build_motif(spec, &sol, matrices) {
            Ok(motif) => return Ok((sol, motif)),
            Err(MotifError::MatrixNotRealizable) => continue,
            Err(e) => return Err(e),
        }
    }
    if seen == 0 {
        return Err(SolveError::NoSolutionWithinBounds(bounds).into());
    }
    Err(MotifError::NoRealizableSolution(seen))
}

/// [`first_realizable`], doubling the copy and multiplier bounds up to
/// `widenings` times while no candidate can carry the matrices. Some matrix
/// sets (e.g. odd-module diagonals on every pair of three sets) only fit on
/// cells whose copy counts are multiples of the module. Returns the bounds
/// that succeeded.
pub fn realize_matrices(
    spec: &WeaveSpec,
    matrices: &MatrixSet,
    bounds: SearchBounds,
    max_candidates: usize,
    widenings: u32,
) -> Result<(SolveResult, Motif, SearchBounds), MotifError> {
    let mut bounds = bounds;
    let mut attempt = 0;
    loop {
        match first_realizable(spec, matrices, bounds, max_candidates) {
            Ok((sol, motif)) => return Ok((sol, motif, bounds)),
            Err(MotifError::NoRealizableSolution(_)) if attempt < widenings => {
                attempt += 1;
                bounds = SearchBounds {
                    max_copies: bounds.max_copies * 2,
                    max_multiplier: bounds.max_multiplier * 2,
                    ..bounds
                };
            }
            Err(e) => return Err(e),
        }
    }
}

fn constant_matrix(pair: (usize, usize), seq: CrossingSequence) -> Option<CrossingMatrix> {
    if seq.is_crossing() {
        return None;
    }
    let e = if seq.p() == 1 { 1 } else { -1 };
    CrossingMatrix::new(pair, vec![vec![e]]).ok()
}

/// Reads the crossing matrices back off a motif.
pub fn extract_matrices(motif: &Motif) -> Result<MatrixSet, MotifError> {
    let spec = motif.spec();
    let mut groups: BTreeMap<(usize, usize), Vec<&Crossing>> = BTreeMap::new();
    for c in motif.crossings() {
        groups.entry(pair_key(c.upper.set, c.lower.set)).or_default().push(c);
    }
    let mut matrices = Vec::new();
    for (i, j) in spec.pairs() {
        let seq = spec.sequence(i, j).ok_or_else(|| {
            MotifError::InvalidMotif(format!("no sequence for sets {},{}", i + 1, j + 1))
        })?;
        let Some(group) = groups.get(&(i, j)) else {
            let m = constant_matrix((i, j), seq).ok_or_else(|| {
                MotifError::NonPeriodicPattern(format!(
                    "sets {},{} never cross but their sequence is {seq}",
                    i + 1,
                    j + 1
                ))
            })?;
            matrices.push(m);
            continue;
        };
        let (li, lj) = (motif.layout(i), motif.layout(j));
        let m = seq.module() as usize;
        let off_lattice = || MotifError::InvalidMotif(format!("crossing of sets {},{} off the strand lattice", i + 1, j + 1));
        let anchor = group[0].position;
        let frame = PairFrame::new(li, lj, anchor, m).ok_or_else(off_lattice)?;
        let mut cells: Vec<Vec<Option<i8>>> = vec![vec![None; m]; m];
        for c in group {
            let u = li.line_index(c.position).ok_or_else(off_lattice)?;
            let v = lj.line_index(c.position).ok_or_else(off_lattice)?;
            let sign = c.sign_for(i);
            let [(au, av), (bu, bv)] = frame.periods;
            for s in 0..m as i64 {
                for t in 0..m as i64 {
                    let (x, y) = frame.cell(u + s * au + t * bu, v + s * av + t * bv);
                    match cells[x][y] {
                        None => cells[x][y] = Some(sign),
                        Some(prev) if prev != sign => {
                            return Err(MotifError::NonPeriodicPattern(format!(
                                "sets {},{}: crossing at {} contradicts the periodic pattern",
                                i + 1,
                                j + 1,
                                c.position
                            )));
                        }
                        Some(_) => {}
                    }
                }
            }
        }
        let entries: Vec<Vec<i8>> = cells
            .into_iter()
            .map(|row| row.into_iter().collect::<Option<Vec<i8>>>())
            .collect::<Option<_>>()
            .ok_or_else(|| {
                MotifError::NonPeriodicPattern(format!("sets {},{}: incomplete matrix", i + 1, j + 1))
            })?;
        let matrix = CrossingMatrix::new((i, j), entries)
            .map_err(|e| MotifError::InvalidMotif(e.to_string()))?;
        if !validate_matrix(&matrix, seq).map_err(MotifError::MatrixModuleMismatch)? {
            return Err(MotifError::NonPeriodicPattern(format!(
                "sets {},{}: strands do not follow {seq}",
                i + 1,
                j + 1
            )));
        }
        matrices.push(matrix);
    }
    MatrixSet::new(spec.n_sets(), matrices).map_err(MotifError::MatrixModuleMismatch)
}

/// Checks that the strands form a quadrivalent thread-tiling and that the
/// crossing list matches the geometry. Empty when everything holds.
pub fn validate_tiling(motif: &Motif) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let error = |sets: Vec<usize>, message: String| Diagnostic {
        severity: Severity::Error,
        sets,
        message,
    };
    let strands = motif.strands();
    let mut vertices: BTreeMap<Point, BTreeSet<StrandId>> = BTreeMap::new();
    for (k, s1) in strands.iter().enumerate() {
        for s2 in &strands[k + 1..] {
            if s1.slope.det(&s2.slope) == 0 {
                if s1.slope == s2.slope && s1.offset == s2.offset {
                    out.push(error(
                        vec![s1.id.set, s2.id.set],
                        format!("strands {} and {} coincide", s1.id, s2.id),
                    ));
                }
                continue;
            }
            for p in torus_intersections(s1, s2) {
                let v = vertices.entry(p).or_default();
                v.insert(s1.id);
                v.insert(s2.id);
            }
        }
    }
    for (p, through) in &vertices {
        let sets: BTreeSet<usize> = through.iter().map(|s| s.set).collect();
        let sets_v: Vec<usize> = sets.iter().copied().collect();
        if through.len() != 2 {
            out.push(error(
                sets_v.clone(),
                format!("vertex degree {} at {p}", 2 * through.len()),
            ));
        }
        if sets.len() < through.len() {
            out.push(error(sets_v.clone(), format!("two strands of one set meet at {p}")));
        }
        match motif.crossing_at(*p) {
            None => out.push(error(sets_v, format!("no crossing listed at vertex {p}"))),
            Some(c) => {
                if !(through.contains(&c.upper) && through.contains(&c.lower)) {
                    out.push(error(
                        sets_v,
                        format!("crossing at {p} names strands that do not meet there"),
                    ));
                }
            }
        }
    }
    for c in motif.crossings() {
        if !vertices.contains_key(&c.position) {
            out.push(error(
                vec![c.upper.set, c.lower.set],
                format!("crossing at {} is not on both of its strands", c.position),
            ));
        }
    }
    out
}

/// Shifts the cell by `(dx, dy)`: every position moves and wraps mod 1.
pub fn translate_cell(motif: &Motif, dx: Q, dy: Q) -> Motif {
    let strands = motif
        .strands()
        .iter()
        .map(|s| Strand {
            offset: frac(s.offset + dy * s.slope.a() - dx * s.slope.b()),
            ..s.clone()
        })
        .collect();
    let crossings = motif
        .crossings()
        .iter()
        .map(|c| Crossing {
            position: Point::new(c.position.x + dx, c.position.y + dy).wrapped(),
            ..c.clone()
        })
        .collect();
    Motif::from_parts(motif.spec().clone(), strands, crossings)
        .expect("translation preserves motif structure")
}

/// Point where strand `s` starts its natural parametrisation
/// `P(t) = P0 + t*(a, b)`, `t` in `[0, 1)`.
pub fn strand_start(s: &Strand) -> Point {
    if s.slope.a() != 0 {
        Point::new(Q::zero(), frac(s.offset / s.slope.a()))
    } else {
        Point::new(frac(-s.offset), Q::zero())
    }
}

/// Parameter `t` in `[0, 1)` of a torus point on strand `s`.
pub fn strand_parameter(s: &Strand, p: Point) -> Option<Q> {
    let p0 = strand_start(s);
    let (a, b) = (s.slope.a(), s.slope.b());
    let candidates: Vec<Q> = if b != 0 {
        (0..b).map(|k| frac((p.y - p0.y + k) / b)).collect()
    } else {
        (0..a.abs()).map(|k| frac((p.x - p0.x + k) / a)).collect()
    };
    candidates
        .into_iter()
        .find(|&t| Point::new(p0.x + t * a, p0.y + t * b).wrapped() == p.wrapped())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{equivalent_sets, gen_block, gen_diagonal, rank};
    use crate::solver::{solve_min, solve_next};

    fn seq(p: u32, q: u32) -> CrossingSequence {
        CrossingSequence::new(p, q).unwrap()
    }

    fn twill_motif() -> Motif {
        let spec = WeaveSpec::square(seq(2, 2));
        let bounds = SearchBounds::default_for(&spec).unwrap();
        let sol = solve_min(&spec, bounds).unwrap();
        let set = MatrixSet::single(gen_diagonal(2, 2, 1).unwrap());
        build_motif(&spec, &sol, &set).unwrap()
    }

    #[test]
    fn twill_has_four_crossings_and_rank_two() {
        let motif = twill_motif();
        assert_eq!(motif.crossings().len(), 4);
        assert!(validate_tiling(&motif).is_empty());
        let set = extract_matrices(&motif).unwrap();
        assert_eq!(rank(set.get(0, 1).unwrap()), 2);
        let twill = MatrixSet::single(gen_diagonal(2, 2, 1).unwrap());
        assert!(equivalent_sets(&set, &twill).unwrap().is_some());
    }

    #[test]
    fn basket_needs_eight_crossings() {
        let spec = WeaveSpec::square(seq(2, 2));
        let bounds = SearchBounds::default_for(&spec).unwrap();
        let basket = MatrixSet::single(gen_block(2).unwrap());
        let first = solve_min(&spec, bounds).unwrap();
        assert_eq!(
            build_motif(&spec, &first, &basket),
            Err(MotifError::MatrixNotRealizable)
        );
        let next = solve_next(&spec, &first, bounds).unwrap();
        let motif = build_motif(&spec, &next, &basket).unwrap();
        assert_eq!(motif.crossings().len(), 8);
        let (sol, again) = first_realizable(&spec, &basket, bounds, 10).unwrap();
        assert_eq!(sol, next);
        assert_eq!(again, motif);
    }

    #[test]
    fn flipped_sign_is_rejected() {
        let motif = twill_motif();
        let mut crossings = motif.crossings().to_vec();
        let c = &mut crossings[0];
        std::mem::swap(&mut c.upper, &mut c.lower);
        let broken = Motif::from_parts(motif.spec().clone(), motif.strands().to_vec(), crossings).unwrap();
        assert!(matches!(
            extract_matrices(&broken),
            Err(MotifError::NonPeriodicPattern(_))
        ));
    }

    #[test]
    fn translation_shifts_matrices() {
        let motif = twill_motif();
        assert_eq!(translate_cell(&motif, Q::zero(), Q::zero()), motif);
        let moved = translate_cell(&motif, Q::new(1, 4), Q::new(0, 1));
        assert_eq!(moved.crossings().len(), 4);
        let a = extract_matrices(&motif).unwrap();
        let b = extract_matrices(&moved).unwrap();
        let t = equivalent_sets(&a, &b).unwrap().unwrap();
        assert_eq!(t.rotation, Rotation::Identity);
    }

    #[test]
    fn text_round_trip() {
        let motif = twill_motif();
        let text = motif.to_text();
        assert!(text.starts_with("cell=1x1 N=2\nS 1 1 2 1 "));
        let back = parse_motif(&text, motif.spec()).unwrap();
        assert_eq!(back, motif);
        assert!(parse_motif("cell=1x1 N=3\n", motif.spec()).is_err());
        assert!(parse_motif("cell=1x1 N=2\nQ 1\n", motif.spec()).is_err());
    }

    #[test]
    fn triple_point_is_reported() {
        let s = seq(1, 1);
        let spec = WeaveSpec::kagome(s, s, s);
        let strand = |set, a, b| Strand {
            id: StrandId { set, index: 0 },
            slope: Slope::new(a, b).unwrap(),
            offset: Q::zero(),
        };
        let motif = Motif::from_parts(
            spec,
            vec![strand(0, 1, 0), strand(1, 0, 1), strand(2, 1, 1)],
            vec![],
        )
        .unwrap();
        let diags = validate_tiling(&motif);
        assert!(diags.iter().any(|d| d.message.starts_with("vertex degree 6")));
    }

    #[test]
    fn strand_parameters() {
        let motif = twill_motif();
        for c in motif.crossings() {
            for id in [c.upper, c.lower] {
                let s = motif.strand(id).unwrap();
                let t = strand_parameter(s, c.position).unwrap();
                assert!(t >= Q::zero() && t < Q::from_integer(1));
            }
        }
    }
}
