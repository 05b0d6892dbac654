//! Bounded exhaustive search for the curve system realizing every pairwise
//! crossing number with the fewest total crossings.
//!
//! A candidate is a *shape* (copies per set, multiplier per pair) together
//! with the best slope tuple realizing it. For a shape the determinant of
//! every pair is fixed: `copies_i * copies_j * |det| = k * C_ij`, so the
//! slope search only has to solve linear Diophantine equations.
//!
//! Candidates are totally ordered by [`SolveResult::order_key`]:
//! total, largest coordinate, sum of `|a|+|b|`, sum of copies, slope tuple
//! (per-slope key), then copies and multipliers.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num::Integer;
use rayon::prelude::*;
use thiserror::Error;

use crate::intersect::{all_pairwise, PairwiseCrossing};
use crate::weave::{has_errors, normalize_slope, validate_spec, Slope, WeaveSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SearchBounds {
    pub max_slope: u64,
    pub max_copies: u64,
    pub max_multiplier: u64,
}

impl SearchBounds {
    pub fn new(max_slope: u64, max_copies: u64, max_multiplier: u64) -> Result<Self, SolveError> {
        let b = Self {
            max_slope,
            max_copies,
            max_multiplier,
        };
        if max_slope == 0 || max_copies == 0 || max_multiplier == 0 {
            return Err(SolveError::InvalidBounds(b));
        }
        Ok(b)
    }

    /// `max_slope = 2C`, `max_copies = C`, `max_multiplier = 2C` with `C`
    /// the largest pairwise crossing number (1 if nothing crosses).
    pub fn default_for(spec: &WeaveSpec) -> Result<Self, SolveError> {
        let pcs = all_pairwise(spec).map_err(|e| SolveError::InvalidSpec(vec![e.to_string()]))?;
        let c = pcs.iter().map(|p| p.c).max().unwrap_or(0).max(1);
        Self::new(2 * c, c, 2 * c)
    }
}

impl fmt::Display for SearchBounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "max_slope={} max_copies={} max_multiplier={}",
            self.max_slope, self.max_copies, self.max_multiplier
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("invalid spec: {}", .0.join("; "))]
    InvalidSpec(Vec<String>),
    #[error("no solution within bounds ({0})")]
    NoSolutionWithinBounds(SearchBounds),
    #[error("search bounds must all be at least 1 ({0})")]
    InvalidBounds(SearchBounds),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SolveResult {
    pub slopes: Vec<Slope>,
    /// Parallel representative curves per set.
    pub copies: Vec<u64>,
    /// `k` per pair `(i, j)`, `i < j`.
    pub multipliers: BTreeMap<(usize, usize), u64>,
    /// Realized crossings `k * C_ij` per pair.
    pub totals: BTreeMap<(usize, usize), u64>,
    pub total: u64,
}

/// Sort key of a single slope inside a tuple: `(|a|+|b|, |b|, |a|, a < 0)`.
fn slope_key(s: &Slope) -> (u64, u64, u64, bool) {
    (s.l1(), s.b().unsigned_abs(), s.a().unsigned_abs(), s.a() < 0)
}

type SlopeKey = (u64, u64, Vec<(u64, u64, u64, bool)>);

fn slopes_key(slopes: &[Slope]) -> SlopeKey {
    (
        slopes.iter().map(Slope::max_abs).max().unwrap_or(0),
        slopes.iter().map(Slope::l1).sum(),
        slopes.iter().map(slope_key).collect(),
    )
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct OrderKey {
    total: u64,
    max_abs: u64,
    l1_sum: u64,
    copies_sum: u64,
    slopes: Vec<(u64, u64, u64, bool)>,
    copies: Vec<u64>,
    multipliers: Vec<u64>,
}

impl SolveResult {
    pub fn order_key(&self) -> OrderKey {
        let (max_abs, l1_sum, slopes) = slopes_key(&self.slopes);
        OrderKey {
            total: self.total,
            max_abs,
            l1_sum,
            copies_sum: self.copies.iter().sum(),
            slopes,
            copies: self.copies.clone(),
            multipliers: self.multipliers.values().copied().collect(),
        }
    }
}

#[derive(Debug, Clone)]
struct Shape {
    copies: Vec<u64>,
    /// Per pair, in `pairs` order.
    multipliers: Vec<u64>,
    dets: Vec<u64>,
    total: u64,
}

/// Normalized slopes `t` with `max(|a|,|b|) <= bound` and `|det(s, t)| == d`, `d > 0`.
fn slopes_with_det(s: Slope, d: u64, bound: u64) -> Vec<Slope> {
    let bound = bound as i64;
    let d = d as i64;
    let mut out = Vec::new();
    let mut push = |x: i64, y: i64| {
        if x.abs() <= bound && y.abs() <= bound {
            if let Ok(t) = normalize_slope(x, y) {
                out.push(t);
            }
        }
    };
    let (a, b) = (s.a(), s.b());
    if a == 0 {
        // det((0, b), (x, y)) = -b*x, b = 1 for a normalized slope.
        for y in -bound..=bound {
            push(d, y);
            push(-d, y);
        }
    } else {
        for x in -bound..=bound {
            for rhs in [d, -d] {
                let num = rhs + b * x;
                if num % a == 0 {
                    push(x, num / a);
                }
            }
        }
    }
    out.sort_by_key(slope_key);
    out.dedup();
    out
}

fn all_slopes(bound: u64) -> Vec<Slope> {
    let bound = bound as i64;
    let mut out: Vec<Slope> = (-bound..=bound)
        .flat_map(|a| (-bound..=bound).map(move |b| (a, b)))
        .filter_map(|(a, b)| normalize_slope(a, b).ok())
        .collect();
    out.sort_by_key(slope_key);
    out.dedup();
    out
}

struct SlopeSearch<'a> {
    n: usize,
    /// `dets[i][j]` required `|det|`, symmetric.
    dets: Vec<Vec<u64>>,
    bound: u64,
    roots: &'a [Slope],
    best: Option<(SlopeKey, Vec<Slope>)>,
}

impl SlopeSearch<'_> {
    fn run(mut self) -> Option<Vec<Slope>> {
        let mut partial = Vec::with_capacity(self.n);
        for &s in self.roots {
            partial.push(s);
            self.extend(&mut partial);
            partial.pop();
        }
        self.best.map(|(_, s)| s)
    }

    fn pruned(&self, partial: &[Slope]) -> bool {
        let Some((best, _)) = &self.best else {
            return false;
        };
        let max_abs = partial.iter().map(Slope::max_abs).max().unwrap_or(0);
        let l1: u64 = partial.iter().map(Slope::l1).sum();
        (max_abs, l1) > (best.0, best.1)
    }

    fn extend(&mut self, partial: &mut Vec<Slope>) {
        if self.pruned(partial) {
            return;
        }
        let t = partial.len();
        if t == self.n {
            let key = slopes_key(partial);
            if self.best.as_ref().is_none_or(|(b, _)| key < *b) {
                self.best = Some((key, partial.clone()));
            }
            return;
        }
        let d0 = self.dets[0][t];
        let candidates = if d0 == 0 {
            vec![partial[0]]
        } else {
            slopes_with_det(partial[0], d0, self.bound)
        };
        for c in candidates {
            let fits = (1..t).all(|e| partial[e].det(&c).unsigned_abs() == self.dets[e][t]);
            if fits {
                partial.push(c);
                self.extend(partial);
                partial.pop();
            }
        }
    }
}

/// Lazily walks the candidate space in [`SolveResult::order_key`] order.
pub struct Solver {
    pairs: Vec<(usize, usize)>,
    pcs: Vec<PairwiseCrossing>,
    n: usize,
    bounds: SearchBounds,
    groups: BTreeMap<u64, Vec<Shape>>,
    roots: Vec<Slope>,
}

impl Solver {
    pub fn new(spec: &WeaveSpec, bounds: SearchBounds) -> Result<Self, SolveError> {
        let diags = validate_spec(spec);
        if has_errors(&diags) {
            return Err(SolveError::InvalidSpec(
                diags.iter().map(ToString::to_string).collect(),
            ));
        }
        let pcs = all_pairwise(spec).map_err(|e| SolveError::InvalidSpec(vec![e.to_string()]))?;
        let pairs = spec.pairs();
        let n = spec.n_sets();
        let mut solver = Self {
            pairs,
            pcs,
            n,
            bounds,
            groups: BTreeMap::new(),
            roots: all_slopes(bounds.max_slope),
        };
        solver.build_shapes();
        Ok(solver)
    }

    pub fn pairwise(&self) -> &[PairwiseCrossing] {
        &self.pcs
    }

    pub fn bounds(&self) -> SearchBounds {
        self.bounds
    }

    /// `(k, det)` options of one pair for fixed copies.
    fn pair_options(&self, pc: &PairwiseCrossing, ci: u64, cj: u64) -> Vec<(u64, u64)> {
        if !pc.is_crossing() {
            return vec![(1, 0)];
        }
        let step = ci.lcm(&cj);
        std::iter::once(1)
            .chain((2..=self.bounds.max_multiplier).step_by(2))
            .filter(|k| *k <= self.bounds.max_multiplier && k % step == 0)
            .filter(|k| (k * pc.c).is_multiple_of(ci * cj))
            .map(|k| (k, k * pc.c / (ci * cj)))
            .collect()
    }

    fn build_shapes(&mut self) {
        let n = self.n;
        let mut digits = vec![0usize; n];
        loop {
            let copies: Vec<u64> = digits.iter().map(|&d| d as u64 + 1).collect();
            let options: Vec<Vec<(u64, u64)>> = self
                .pcs
                .iter()
                .map(|pc| self.pair_options(pc, copies[pc.i], copies[pc.j]))
                .collect();
            if options.iter().all(|o| !o.is_empty()) {
                let mut idx = vec![0usize; options.len()];
                loop {
                    let multipliers: Vec<u64> =
                        idx.iter().zip(&options).map(|(&x, o)| o[x].0).collect();
                    let dets: Vec<u64> = idx.iter().zip(&options).map(|(&x, o)| o[x].1).collect();
                    let total = multipliers
                        .iter()
                        .zip(&self.pcs)
                        .map(|(k, pc)| k * pc.c)
                        .sum();
                    self.groups.entry(total).or_default().push(Shape {
                        copies: copies.clone(),
                        multipliers,
                        dets,
                        total,
                    });
                    if !advance(&mut idx, |p| options[p].len()) {
                        break;
                    }
                }
            }
            if !advance(&mut digits, |_| self.bounds.max_copies as usize) {
                break;
            }
        }
    }

    fn realize(&self, shape: &Shape) -> Option<SolveResult> {
        let mut dets = vec![vec![0u64; self.n]; self.n];
        for (&(i, j), &d) in self.pairs.iter().zip(&shape.dets) {
            dets[i][j] = d;
            dets[j][i] = d;
        }
        let slopes = SlopeSearch {
            n: self.n,
            dets,
            bound: self.bounds.max_slope,
            roots: &self.roots,
            best: None,
        }
        .run()?;
        let multipliers = self.pairs.iter().copied().zip(shape.multipliers.iter().copied()).collect();
        let totals = self
            .pairs
            .iter()
            .zip(&shape.multipliers)
            .zip(&self.pcs)
            .map(|((&p, k), pc)| (p, k * pc.c))
            .collect();
        Some(SolveResult {
            slopes,
            copies: shape.copies.clone(),
            multipliers,
            totals,
            total: shape.total,
        })
    }

    /// All realizable candidates with exactly this total, sorted.
    pub fn solutions_with_total(&self, total: u64) -> Vec<SolveResult> {
        let Some(shapes) = self.groups.get(&total) else {
            return Vec::new();
        };
        let mut found: Vec<SolveResult> =
            shapes.par_iter().filter_map(|s| self.realize(s)).collect();
        found.sort_by_cached_key(SolveResult::order_key);
        found
    }

    /// Candidates in order, starting with the group of totals `>= from_total`.
    pub fn iter_from(&self, from_total: u64) -> impl Iterator<Item = SolveResult> + '_ {
        self.groups
            .range(from_total..)
            .flat_map(move |(&t, _)| self.solutions_with_total(t))
    }

    pub fn solve_min(&self) -> Result<SolveResult, SolveError> {
        self.iter_from(0)
            .next()
            .ok_or(SolveError::NoSolutionWithinBounds(self.bounds))
    }

    pub fn solve_next(&self, prev: &SolveResult) -> Result<SolveResult, SolveError> {
        let key = prev.order_key();
        self.iter_from(prev.total)
            .find(|r| r.order_key().cmp(&key) == Ordering::Greater)
            .ok_or(SolveError::NoSolutionWithinBounds(self.bounds))
    }
}

/// Odometer increment; returns false once every digit wrapped.
fn advance(digits: &mut [usize], radix: impl Fn(usize) -> usize) -> bool {
    for p in (0..digits.len()).rev() {
        digits[p] += 1;
        if digits[p] < radix(p) {
            return true;
        }
        digits[p] = 0;
    }
    false
}

pub fn solve_min(spec: &WeaveSpec, bounds: SearchBounds) -> Result<SolveResult, SolveError> {
    Solver::new(spec, bounds)?.solve_min()
}

pub fn solve_next(
    spec: &WeaveSpec,
    prev: &SolveResult,
    bounds: SearchBounds,
) -> Result<SolveResult, SolveError> {
    Solver::new(spec, bounds)?.solve_next(prev)
}

/// The first `limit` candidates in order.
pub fn enumerate_solutions(
    spec: &WeaveSpec,
    bounds: SearchBounds,
    limit: usize,
) -> Result<Vec<SolveResult>, SolveError> {
    let solver = Solver::new(spec, bounds)?;
    let out: Vec<SolveResult> = solver.iter_from(0).take(limit).collect();
    if out.is_empty() {
        return Err(SolveError::NoSolutionWithinBounds(bounds));
    }
    Ok(out)
}
