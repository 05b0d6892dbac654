//! Entanglement and alternating-triangle analysis of a motif, computed on
//! the plane lift of its line arrangement.

use std::collections::{BTreeMap, BTreeSet};

use num::integer::{lcm, ExtendedGcd, Integer};
use rayon::prelude::*;
use thiserror::Error;

use crate::motif::{intersect_lines, level, Crossing, Motif, Point, StrandId, Q};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("unknown strand {set},{index}")]
    UnknownStrand { set: usize, index: usize },
}

/// A line of the plane lift: set and line index.
type Line = (usize, i64);

/// Triangular face bounded by three strands of three different sets whose
/// over/under relation is cyclic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ATriangle {
    pub crossings: [Crossing; 3],
    pub strands: [StrandId; 3],
}

/// Whether line `l1` passes over line `l2`.
fn over(motif: &Motif, l1: Line, l2: Line) -> Option<bool> {
    motif.over_in_plane(l1.0, l1.1, l2.0, l2.1)
}

fn line_point(motif: &Motif, l1: Line, l2: Line) -> Point {
    let (a, b) = (motif.layout(l1.0), motif.layout(l2.0));
    intersect_lines(a.slope, a.line_level(l1.1), b.slope, b.line_level(l2.1))
}

/// Line index of `p` for `set` as an exact rational.
fn fractional_index(motif: &Motif, set: usize, p: Point) -> Q {
    let l = motif.layout(set);
    (level(l.slope, p) - l.base) * l.copies
}

/// First crossing met walking along `line` from `p` in direction
/// `dir * (a, b)`: the crossing line and the crossing point.
fn next_crossing(motif: &Motif, line: Line, p: Point, dir: i64) -> Option<(Line, Point)> {
    let li = motif.layout(line.0);
    let mut best: Option<(Q, Line)> = None;
    for k in 0..motif.n_sets() {
        let lk = motif.layout(k);
        // Rate of change of lk's line index per unit of the walk parameter.
        let rate = lk.slope.det(&li.slope) * dir * lk.copies;
        if rate == 0 {
            continue;
        }
        let here = fractional_index(motif, k, p);
        let w = if rate > 0 {
            here.floor().to_integer() + 1
        } else {
            here.ceil().to_integer() - 1
        };
        let t = (Q::from_integer(w) - here) / rate;
        if best.is_none_or(|(bt, _)| t < bt) {
            best = Some((t, (k, w)));
        }
    }
    best.map(|(_, l)| (l, line_point(motif, line, l)))
}

fn torus_crossing(motif: &Motif, p: Point) -> Option<Crossing> {
    motif.crossing_at(p).cloned()
}

fn line_through(motif: &Motif, set: usize, p: Point) -> Option<Line> {
    motif.layout(set).line_index(p).map(|l| (set, l))
}

fn strand_of(motif: &Motif, line: Line) -> StrandId {
    motif.layout(line.0).strand(line.0, line.1)
}

/// Every A-triangle of the motif, ordered by their sorted vertex positions.
pub fn find_a_triangles(motif: &Motif) -> Vec<ATriangle> {
    let found: Vec<Vec<(Point, Vec<Point>, ATriangle)>> = motif
        .crossings()
        .par_iter()
        .map(|c| triangles_at(motif, c))
        .collect();
    let mut by_centroid: BTreeMap<Point, (Vec<Point>, ATriangle)> = BTreeMap::new();
    for (centroid, key, tri) in found.into_iter().flatten() {
        by_centroid.entry(centroid).or_insert((key, tri));
    }
    let mut out: Vec<(Vec<Point>, ATriangle)> = by_centroid.into_values().collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out.into_iter().map(|(_, t)| t).collect()
}

fn triangles_at(motif: &Motif, c: &Crossing) -> Vec<(Point, Vec<Point>, ATriangle)> {
    let p = c.position;
    let (Some(l1), Some(l2)) = (
        line_through(motif, c.upper.set, p),
        line_through(motif, c.lower.set, p),
    ) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for d1 in [1, -1] {
        for d2 in [1, -1] {
            let (Some((l3, q1)), Some((l3b, q2))) = (
                next_crossing(motif, l1, p, d1),
                next_crossing(motif, l2, p, d2),
            ) else {
                continue;
            };
            if l3 != l3b {
                continue;
            }
            // l1 is over l2 at p; the triangle alternates iff l2 is over l3
            // and l3 is over l1.
            let (Some(o23), Some(o31)) = (over(motif, l2, l3), over(motif, l3, l1)) else {
                continue;
            };
            if !(o23 && o31) {
                continue;
            }
            let (Some(c1), Some(c2)) = (torus_crossing(motif, q1), torus_crossing(motif, q2)) else {
                continue;
            };
            let centroid = Point::new((p.x + q1.x + q2.x) / 3, (p.y + q1.y + q2.y) / 3).wrapped();
            let mut key: Vec<Point> = [p, q1, q2].iter().map(|v| v.wrapped()).collect();
            key.sort();
            out.push((
                centroid,
                key,
                ATriangle {
                    crossings: [c.clone(), c1, c2],
                    strands: [
                        strand_of(motif, l1),
                        strand_of(motif, l2),
                        strand_of(motif, l3),
                    ],
                },
            ));
        }
    }
    out
}

pub fn a_triangle_count(motif: &Motif) -> usize {
    find_a_triangles(motif).len()
}

fn line_of_strand(motif: &Motif, id: StrandId) -> Result<Line, AnalysisError> {
    let unknown = AnalysisError::UnknownStrand {
        set: id.set + 1,
        index: id.index + 1,
    };
    if id.set >= motif.n_sets() {
        return Err(unknown);
    }
    let s = motif.strand(id).ok_or(unknown)?;
    let l = motif.layout(id.set);
    Ok((id.set, ((s.offset - l.base) * l.copies).to_integer()))
}

/// Sets crossing `set`, with the number of consecutive lines of each that
/// one period of a line of `set` meets.
fn crossing_partners(motif: &Motif, set: usize) -> Vec<(usize, i64)> {
    let li = motif.layout(set);
    (0..motif.n_sets())
        .filter_map(|k| {
            let lk = motif.layout(k);
            let d = li.slope.det(&lk.slope).abs();
            (d != 0).then_some((k, d * lk.copies))
        })
        .collect()
}

/// The crossings along one period of line `(set, u)`: partner line and sign.
fn line_word(motif: &Motif, partners: &[(usize, i64)], line: Line) -> Vec<(Line, Option<bool>)> {
    partners
        .iter()
        .flat_map(|&(k, period)| (0..period).map(move |v| (k, v)))
        .map(|other| (other, over(motif, line, other)))
        .collect()
}

/// Blocking crossings on the left (increasing `a*y - b*x`) and right of a
/// strand.
///
/// The window on each side runs to the first parallel line whose crossing
/// word differs from the strand's own; identical neighbours travel with the
/// strand as one bundle. A crossing on that neighbour line blocks when its
/// sign differs from the strand's sign against the same crossing line. A
/// crossing of two other sets strictly inside the window blocks when it
/// closes a cyclic (non-transitive) triple with the strand.
pub fn blocking_crossings(
    motif: &Motif,
    strand: StrandId,
) -> Result<(Vec<Crossing>, Vec<Crossing>), AnalysisError> {
    let line = line_of_strand(motif, strand)?;
    Ok((
        blocking_on_side(motif, line, 1),
        blocking_on_side(motif, line, -1),
    ))
}

fn blocking_on_side(motif: &Motif, line: Line, side: i64) -> Vec<Crossing> {
    let (set, u) = line;
    let partners = crossing_partners(motif, set);
    if partners.is_empty() {
        return Vec::new();
    }
    let own = line_word(motif, &partners, line);
    let cap = motif.layout(set).copies
        * partners
            .iter()
            .map(|&(k, _)| {
                motif
                    .spec()
                    .sequence(set, k)
                    .map_or(1, |s| s.module() as i64)
            })
            .fold(1, lcm);
    let mut found: BTreeSet<Point> = BTreeSet::new();
    let mut width = 1;
    for d in 1..=cap {
        let neighbour = (set, u + side * d);
        let word = line_word(motif, &partners, neighbour);
        if word == own {
            continue;
        }
        width = d;
        for ((other, theirs), (_, mine)) in word.iter().zip(&own) {
            if theirs != mine {
                found.insert(line_point(motif, neighbour, *other).wrapped());
            }
        }
        break;
    }
    found.extend(cyclic_in_window(motif, line, side * width));
    found
        .into_iter()
        .filter_map(|p| torus_crossing(motif, p))
        .collect()
}

/// Crossings of two sets other than `line`'s strictly between `line` and
/// the parallel line `width` indices away, forming a cyclic triple with it.
fn cyclic_in_window(motif: &Motif, line: Line, width: i64) -> Vec<Point> {
    let (set, u) = line;
    let li = motif.layout(set);
    let (lo, hi) = if width > 0 { (u, u + width) } else { (u + width, u) };
    let (a, b) = (li.slope.a(), li.slope.b());
    let ExtendedGcd { gcd, x, y, .. } = a.extended_gcd(&-b);
    let (x, y) = if gcd < 0 { (-x, -y) } else { (x, y) };
    let crosses = |k: usize| li.slope.det(&motif.layout(k).slope) != 0;
    let mut out = Vec::new();
    for c in motif.crossings() {
        let (j, k) = (c.upper.set, c.lower.set);
        if j == set || k == set || !crosses(j) || !crosses(k) {
            continue;
        }
        let p = c.position;
        let here = fractional_index(motif, set, p);
        // Lifts p + n shift the index by copies * (a*n2 - b*n1), any multiple of copies.
        let z_min = ((Q::from_integer(lo) - here) / li.copies).floor().to_integer();
        let z_max = ((Q::from_integer(hi) - here) / li.copies).ceil().to_integer();
        for z in z_min..=z_max {
            let idx = here + z * li.copies;
            if idx <= Q::from_integer(lo) || idx >= Q::from_integer(hi) {
                continue;
            }
            let (n2, n1) = (z * x, z * y);
            let lifted = Point::new(p.x + n1, p.y + n2);
            let (Some(lj), Some(lk)) = (line_through(motif, j, lifted), line_through(motif, k, lifted))
            else {
                continue;
            };
            // j is over k at c; cyclic iff k over line and line over j.
            let (Some(k_over_i), Some(i_over_j)) = (over(motif, lk, line), over(motif, line, lj)) else {
                continue;
            };
            if k_over_i && i_over_j {
                out.push(lifted.wrapped());
            }
        }
    }
    out
}

/// True when every strand has a blocking crossing on both sides.
pub fn is_entangled(motif: &Motif) -> bool {
    motif.strands().par_iter().all(|s| {
        blocking_crossings(motif, s.id).is_ok_and(|(l, r)| !l.is_empty() && !r.is_empty())
    })
}
