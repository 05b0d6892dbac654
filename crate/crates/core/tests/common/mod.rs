//! Independent brute-force oracles and test corpora.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use num::integer::Integer;
use num::Signed;
use weave_core::{
    gen_block, gen_diagonal, gen_satin, CrossingMatrix, CrossingSequence, MatrixSet, Motif, Point,
    SearchBounds, Slope, SolveResult,
    WeaveSpec,
};

pub use weave_core::Q;

pub fn seq(p: u32, q: u32) -> CrossingSequence {
    CrossingSequence::new(p, q).unwrap()
}

/// Crossing sequences with module in `1..=max_module`.
pub fn sequences_up_to(max_module: u32, include_non_crossing: bool) -> Vec<CrossingSequence> {
    let mut out = Vec::new();
    if include_non_crossing {
        out.push(CrossingSequence::ALWAYS_OVER);
        out.push(CrossingSequence::ALWAYS_UNDER);
    }
    for m in 2..=max_module {
        for p in 1..m {
            out.push(seq(p, m - p));
        }
    }
    out
}

pub fn square_corpus(max_module: u32, include_non_crossing: bool) -> Vec<WeaveSpec> {
    sequences_up_to(max_module, include_non_crossing)
        .into_iter()
        .map(WeaveSpec::square)
        .collect()
}

pub fn kagome_corpus(max_module: u32, include_non_crossing: bool) -> Vec<WeaveSpec> {
    let seqs = sequences_up_to(max_module, include_non_crossing);
    let mut out = Vec::new();
    for &a in &seqs {
        for &b in &seqs {
            for &c in &seqs {
                out.push(WeaveSpec::kagome(a, b, c));
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Pairwise crossing numbers by simulation.

/// Simulates a thread of set `i` reading its crossing sequences: each step
/// it meets one crossing of every other set, advancing a cursor mod that
/// sequence's module, until every cursor is back at the start. Each step
/// costs `|v_ij|` crossings with set `j`. The pairwise number is the first
/// count that is a whole number of periods for both threads.
pub fn simulate_pairwise(spec: &WeaveSpec, i: usize, j: usize) -> (u64, u64, u64) {
    let s1 = spec.base_slopes()[i];
    let s2 = spec.base_slopes()[j];
    let v = (s1.a() * s2.b() - s2.a() * s1.b()).unsigned_abs();
    if v == 0 {
        return (0, 0, 0);
    }
    let steps = |set: usize| -> u64 {
        let modules: Vec<u64> = (0..spec.n_sets())
            .filter(|&k| k != set)
            .map(|k| spec.sequence(set, k).map_or(1, |s| s.module() as u64))
            .collect();
        let mut cursors = vec![0u64; modules.len()];
        let mut n = 0;
        loop {
            n += 1;
            for (c, m) in cursors.iter_mut().zip(&modules) {
                *c = (*c + 1) % m;
            }
            if cursors.iter().all(|&c| c == 0) {
                return n;
            }
        }
    };
    let zi = v * steps(i);
    let zj = v * steps(j);
    let mut c = zi.max(zj);
    while !c.is_multiple_of(zi) || !c.is_multiple_of(zj) {
        c += 1;
    }
    (zi, zj, c)
}

// ---------------------------------------------------------------------------
// Solver oracle.

fn all_slopes(bound: i64) -> Vec<Slope> {
    let mut out = vec![Slope::new(1, 0).unwrap()];
    for b in 1..=bound {
        for a in -bound..=bound {
            if a.gcd(&b) == 1 {
                out.push(Slope::new(a, b).unwrap());
            }
        }
    }
    out
}

fn det(s: Slope, t: Slope) -> i64 {
    s.a() * t.b() - t.a() * s.b()
}

/// Pairwise crossing numbers of every pair, from the simulator.
fn simulated_numbers(spec: &WeaveSpec) -> BTreeMap<(usize, usize), u64> {
    spec.pairs()
        .into_iter()
        .map(|(i, j)| ((i, j), simulate_pairwise(spec, i, j).2))
        .collect()
}

/// Whether `(copies, slopes)` is a feasible curve system: every crossing
/// pair gets `k * C` crossings with `k` in `{1, 2, 4, 6, ...}` up to the
/// bound, and every thread sees a whole number of pairwise periods. Returns
/// the total crossing count.
pub fn oracle_total(
    spec: &WeaveSpec,
    bounds: SearchBounds,
    slopes: &[Slope],
    copies: &[u64],
) -> Option<u64> {
    feasible_total(&simulated_numbers(spec), bounds, slopes, copies)
}

fn feasible_total(
    numbers: &BTreeMap<(usize, usize), u64>,
    bounds: SearchBounds,
    slopes: &[Slope],
    copies: &[u64],
) -> Option<u64> {
    let mut total = 0;
    for (&(i, j), &c) in numbers {
        let d = det(slopes[i], slopes[j]).unsigned_abs();
        if c == 0 {
            if d != 0 {
                return None;
            }
            continue;
        }
        if d == 0 {
            return None;
        }
        let crossings = copies[i] * copies[j] * d;
        if !crossings.is_multiple_of(c) {
            return None;
        }
        let k = crossings / c;
        if k > bounds.max_multiplier || (k != 1 && !k.is_multiple_of(2)) {
            return None;
        }
        // Crossings on one thread of set i with set j, and vice versa.
        if !(copies[j] * d).is_multiple_of(c) || !(copies[i] * d).is_multiple_of(c) {
            return None;
        }
        total += crossings;
    }
    Some(total)
}

/// A total no feasible system with these copies can go below: each crossing
/// pair needs at least `copies_i * copies_j` crossings, rounded up to an
/// allowed multiple of its pairwise number.
fn copies_lower_bound(numbers: &BTreeMap<(usize, usize), u64>, copies: &[u64]) -> u64 {
    numbers
        .iter()
        .filter(|(_, &c)| c > 0)
        .map(|(&(i, j), &c)| {
            let need = copies[i] * copies[j];
            let mut k = 1;
            while k * c < need {
                k = if k == 1 { 2 } else { k + 2 };
            }
            k * c
        })
        .sum()
}

/// Smallest feasible total strictly below `below`, by exhaustive search over
/// copies and slopes within `bounds`. `None` if there is none.
pub fn brute_force_below(spec: &WeaveSpec, bounds: SearchBounds, below: u64) -> Option<u64> {
    let n = spec.n_sets();
    let numbers = simulated_numbers(spec);
    let slopes = all_slopes(bounds.max_slope as i64);
    // Slopes grouped by |det| against each slope.
    let by_det: Vec<BTreeMap<u64, Vec<usize>>> = slopes
        .iter()
        .map(|&s| {
            let mut m: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
            for (k, &t) in slopes.iter().enumerate() {
                m.entry(det(s, t).unsigned_abs()).or_default().push(k);
            }
            m
        })
        .collect();
    let ctx = Search {
        numbers: &numbers,
        bounds,
        slopes: &slopes,
        by_det: &by_det,
        below,
    };
    let mut best: Option<u64> = None;
    let mut copies = vec![1u64; n];
    loop {
        let limit = best.map_or(below, |b| b.min(below));
        if copies_lower_bound(&numbers, &copies) < limit {
            ctx.search(&copies, &mut Vec::with_capacity(n), &mut best);
        }
        // Next copies tuple.
        let mut p = n;
        loop {
            if p == 0 {
                return best;
            }
            p -= 1;
            copies[p] += 1;
            if copies[p] <= bounds.max_copies {
                break;
            }
            copies[p] = 1;
        }
    }
}

struct Search<'a> {
    numbers: &'a BTreeMap<(usize, usize), u64>,
    bounds: SearchBounds,
    slopes: &'a [Slope],
    by_det: &'a [BTreeMap<u64, Vec<usize>>],
    below: u64,
}

impl Search<'_> {
    /// Values of `|det|` the pair `(i, j)` can take with these copies
    /// without exceeding `room` crossings.
    fn allowed_dets(&self, i: usize, j: usize, copies: &[u64], room: u64) -> BTreeSet<u64> {
        let c = self.numbers[&(i, j)];
        if c == 0 {
            return BTreeSet::from([0]);
        }
        let per = copies[i] * copies[j];
        (1..=room / per)
            .filter(|&d| {
                let crossings = per * d;
                let k = crossings / c;
                crossings.is_multiple_of(c)
                    && k <= self.bounds.max_multiplier
                    && (k == 1 || k.is_multiple_of(2))
                    && (copies[j] * d).is_multiple_of(c)
                    && (copies[i] * d).is_multiple_of(c)
            })
            .collect()
    }

    fn search(&self, copies: &[u64], chosen: &mut Vec<usize>, best: &mut Option<u64>) {
        let n = copies.len();
        let limit = best.map_or(self.below, |b| b.min(self.below));
        let slopes = self.slopes;
        let partial: u64 = (0..chosen.len())
            .flat_map(|i| (i + 1..chosen.len()).map(move |j| (i, j)))
            .map(|(i, j)| copies[i] * copies[j] * det(slopes[chosen[i]], slopes[chosen[j]]).unsigned_abs())
            .sum();
        if partial >= limit {
            return;
        }
        if chosen.len() == n {
            let tuple: Vec<Slope> = chosen.iter().map(|&k| slopes[k]).collect();
            if let Some(t) = feasible_total(self.numbers, self.bounds, &tuple, copies) {
                if t < limit {
                    *best = Some(t);
                }
            }
            return;
        }
        let next = chosen.len();
        let candidates: Vec<usize> = if next == 0 {
            (0..slopes.len()).collect()
        } else {
            let room = limit - partial;
            let allowed: Vec<BTreeSet<u64>> = (0..next)
                .map(|i| self.allowed_dets(i, next, copies, room))
                .collect();
            self.by_det[chosen[0]]
                .iter()
                .filter(|(d, _)| allowed[0].contains(d))
                .flat_map(|(_, v)| v.iter().copied())
                .filter(|&k| {
                    (1..next).all(|i| allowed[i].contains(&det(slopes[chosen[i]], slopes[k]).unsigned_abs()))
                })
                .collect()
        };
        for k in candidates {
            chosen.push(k);
            self.search(copies, chosen, best);
            chosen.pop();
        }
    }
}

/// Oracle minimum for `spec`, given the solver's claimed optimum: checks the
/// claim is feasible and that nothing smaller exists.
pub fn oracle_agrees(spec: &WeaveSpec, bounds: SearchBounds, claimed: &SolveResult) -> Result<(), String> {
    let t = oracle_total(spec, bounds, &claimed.slopes, &claimed.copies)
        .ok_or_else(|| format!("solver result infeasible for oracle: {claimed:?}"))?;
    if t != claimed.total {
        return Err(format!("oracle total {t} != solver total {}", claimed.total));
    }
    match brute_force_below(spec, bounds, claimed.total) {
        None => Ok(()),
        Some(smaller) => Err(format!("oracle found total {smaller} < {}", claimed.total)),
    }
}

// ---------------------------------------------------------------------------
// Matrices.

/// Every valid matrix for `seq`, by trying all row rotations.
pub fn all_valid_matrices(seq: CrossingSequence) -> Vec<CrossingMatrix> {
    let m = seq.module() as usize;
    let word = seq.word();
    let mut out = Vec::new();
    let mut shifts = vec![0usize; m];
    loop {
        let entries: Vec<Vec<i8>> = shifts
            .iter()
            .map(|&s| (0..m).map(|y| word[(y + m - s) % m]).collect())
            .collect();
        let mat = CrossingMatrix::new((0, 1), entries).unwrap();
        if weave_core::validate_matrix(&mat, seq).unwrap() {
            out.push(mat);
        }
        let mut p = m;
        loop {
            if p == 0 {
                return out;
            }
            p -= 1;
            shifts[p] += 1;
            if shifts[p] < m {
                break;
            }
            shifts[p] = 0;
        }
    }
}

/// Reference transform: shift rows/columns, then rotate the array by
/// `quarter` quarter turns, inverting symbols on odd turns.
pub fn reference_transform(e: &[Vec<i8>], rs: usize, cs: usize, quarter: usize) -> Vec<Vec<i8>> {
    let m = e.len();
    let shifted: Vec<Vec<i8>> = (0..m)
        .map(|x| (0..m).map(|y| e[(x + m - rs) % m][(y + m - cs) % m]).collect())
        .collect();
    let mut cur = shifted;
    for _ in 0..quarter {
        // One quarter turn: new[x][y] = -old[m-1-y][x].
        cur = (0..m)
            .map(|x| (0..m).map(|y| -cur[m - 1 - y][x]).collect())
            .collect();
    }
    cur
}

/// Whether some uniform shift/rotation maps every matrix of `a` to `b`,
/// by explicit enumeration.
pub fn reference_equivalent(a: &MatrixSet, b: &MatrixSet) -> bool {
    let mats_a: Vec<&CrossingMatrix> = a.matrices().collect();
    let mats_b: Vec<&CrossingMatrix> = b.matrices().collect();
    let modules: BTreeSet<usize> = mats_a.iter().map(|m| m.m()).collect();
    let m = if modules.len() == 1 { *modules.iter().next().unwrap() } else { 1 };
    for rs in 0..m {
        for cs in 0..m {
            for quarter in 0..4 {
                if mats_a.iter().zip(&mats_b).all(|(x, y)| {
                    reference_transform(x.entries(), rs, cs, quarter) == y.entries()
                }) {
                    return true;
                }
            }
        }
    }
    false
}

// ---------------------------------------------------------------------------
// Plane geometry oracle for motifs.

fn level(s: Slope, p: (Q, Q)) -> Q {
    p.1 * s.a() - p.0 * s.b()
}

fn meet(s1: Slope, r1: Q, s2: Slope, r2: Q) -> (Q, Q) {
    let d = det(s1, s2);
    ((r1 * s2.a() - r2 * s1.a()) / d, (r1 * s2.b() - r2 * s1.b()) / d)
}

fn wrap(p: (Q, Q)) -> Point {
    Point::new(p.0 - p.0.floor(), p.1 - p.1.floor())
}

/// Crossings between every pair of strands, by direct segment intersection
/// of their lifts over a 3x3 block of cells, counted on the torus.
pub fn brute_force_crossing_count(motif: &Motif) -> BTreeMap<(usize, usize), usize> {
    let mut seen: BTreeMap<(usize, usize), BTreeSet<Point>> = BTreeMap::new();
    let strands = motif.strands();
    for (k, s1) in strands.iter().enumerate() {
        for s2 in &strands[k + 1..] {
            if s1.id.set == s2.id.set || det(s1.slope, s2.slope) == 0 {
                continue;
            }
            let d = det(s1.slope, s2.slope).abs();
            for n1 in -d..=d {
                for n2 in -d..=d {
                    let p = meet(s1.slope, s1.offset + n1, s2.slope, s2.offset + n2);
                    let key = (s1.id.set.min(s2.id.set), s1.id.set.max(s2.id.set));
                    seen.entry(key).or_default().insert(wrap(p));
                }
            }
        }
    }
    seen.into_iter().map(|(k, v)| (k, v.len())).collect()
}

/// Triangular faces of the plane lift with centroid in the unit cell whose
/// three bounding strands alternate over/under cyclically. Found by testing
/// every triple of lines near the cell for emptiness.
pub fn brute_force_a_triangles(motif: &Motif) -> usize {
    // Lines through the window [-1, 2]^2: (set, slope, level).
    let mut lines: Vec<(usize, Slope, Q)> = Vec::new();
    for s in motif.strands() {
        let corners = [(-1, -1), (-1, 2), (2, -1), (2, 2)]
            .map(|(x, y)| level(s.slope, (Q::from_integer(x), Q::from_integer(y))));
        let lo = corners.iter().min().unwrap();
        let hi = corners.iter().max().unwrap();
        let start = (*lo - s.offset).floor().to_integer();
        let end = (*hi - s.offset).ceil().to_integer();
        for n in start..=end {
            lines.push((s.id.set, s.slope, s.offset + n));
        }
    }
    let in_cell = |p: (Q, Q)| {
        let zero = Q::from_integer(0);
        let one = Q::from_integer(1);
        p.0 >= zero && p.0 < one && p.1 >= zero && p.1 < one
    };
    let over = |p: (Q, Q), set: usize| motif.crossing_at(wrap(p)).map(|c| c.upper.set == set);
    let mut count = 0;
    for a in 0..lines.len() {
        for b in a + 1..lines.len() {
            for c in b + 1..lines.len() {
                let (l1, l2, l3) = (lines[a], lines[b], lines[c]);
                if l1.0 == l2.0 || l1.0 == l3.0 || l2.0 == l3.0 {
                    continue;
                }
                if det(l1.1, l2.1) == 0 || det(l1.1, l3.1) == 0 || det(l2.1, l3.1) == 0 {
                    continue;
                }
                let p12 = meet(l1.1, l1.2, l2.1, l2.2);
                let p13 = meet(l1.1, l1.2, l3.1, l3.2);
                let p23 = meet(l2.1, l2.2, l3.1, l3.2);
                let centroid = ((p12.0 + p13.0 + p23.0) / 3, (p12.1 + p13.1 + p23.1) / 3);
                if !in_cell(centroid) {
                    continue;
                }
                let empty = lines.iter().enumerate().all(|(k, l)| {
                    if k == a || k == b || k == c {
                        return true;
                    }
                    let side = |p: (Q, Q)| (level(l.1, p) - l.2).signum();
                    let s = [side(p12), side(p13), side(p23)];
                    !(s.contains(&Q::from_integer(1)) && s.contains(&Q::from_integer(-1)))
                });
                if !empty {
                    continue;
                }
                let (Some(o12), Some(o23), Some(o31)) = (over(p12, l1.0), over(p23, l2.0), over(p13, l3.0)) else {
                    continue;
                };
                if o12 == o23 && o23 == o31 {
                    count += 1;
                }
            }
        }
    }
    count
}

// ---------------------------------------------------------------------------
// Matrix corpus for motif round trips.

fn generated_set(spec: &WeaveSpec, gen: impl Fn(CrossingSequence) -> Option<CrossingMatrix>) -> Option<MatrixSet> {
    let mats: Option<Vec<CrossingMatrix>> = spec
        .sequences()
        .iter()
        .map(|(&pair, &s)| gen(s).map(|m| m.with_pair(pair)))
        .collect();
    MatrixSet::new(spec.n_sets(), mats?).ok()
}

/// Matrix sets for `spec` from each generator that applies to every pair:
/// both diagonals, blocks when `p == q`, satins when `q == 1`. Non-crossing
/// pairs always take their constant matrix.
pub fn generator_sets(spec: &WeaveSpec) -> Vec<(String, MatrixSet)> {
    let constant = |s: CrossingSequence| (!s.is_crossing()).then(|| gen_diagonal(s.p(), s.q(), 1).unwrap());
    let mut out = Vec::new();
    for dir in [1i8, -1] {
        if let Some(set) = generated_set(spec, |s| Some(gen_diagonal(s.p(), s.q(), dir).unwrap())) {
            out.push((format!("diagonal{dir:+}"), set));
        }
    }
    if let Some(set) = generated_set(spec, |s| constant(s).or_else(|| (s.p() == s.q()).then(|| gen_block(s.p()).unwrap()))) {
        out.push(("block".to_string(), set));
    }
    for a in 1..12u32 {
        let satin = |s: CrossingSequence| {
            constant(s).or_else(|| (s.q() == 1).then(|| gen_satin(s.p(), a).ok()).flatten())
        };
        if let Some(set) = generated_set(spec, satin) {
            out.push((format!("satin{a}"), set));
        }
    }
    out
}
