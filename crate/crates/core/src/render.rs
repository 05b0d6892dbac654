//! SVG and plain-text renderings of motifs and crossing matrices.
//!
//! Output is a pure function of the input: exact rationals are converted to
//! pixels once and printed with three decimals.

use std::fmt::Write as _;

use num::{ToPrimitive, Zero};
use thiserror::Error;

use crate::matrix::CrossingMatrix;
use crate::motif::{strand_parameter, strand_start, Motif, Point, Strand, Q};

/// Default strand colours, one per set.
pub const DEFAULT_PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RenderError {
    #[error("palette has {have} colours but the motif has {needed} sets")]
    PaletteTooSmall { needed: usize, have: usize },
    #[error("invalid render options: {0}")]
    InvalidOptions(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderOptions {
    pub cell_pixels: u32,
    /// Half-width of an under-strand break relative to the spacing of
    /// consecutive crossings along that strand; in `(0, 1/4)`.
    pub gap_fraction: Q,
    pub palette: Vec<String>,
    /// The cell is tiled `repeat x repeat` times.
    pub repeat: u32,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self {
            cell_pixels: 512,
            gap_fraction: Q::new(1, 10),
            palette: DEFAULT_PALETTE.iter().map(|s| s.to_string()).collect(),
            repeat: 1,
        }
    }
}

impl RenderOptions {
    fn check(&self, n_sets: usize) -> Result<(), RenderError> {
        if self.cell_pixels == 0 || self.repeat == 0 {
            return Err(RenderError::InvalidOptions(
                "cell_pixels and repeat must be positive".into(),
            ));
        }
        if self.gap_fraction <= Q::zero() || self.gap_fraction >= Q::new(1, 4) {
            return Err(RenderError::InvalidOptions(
                "gap_fraction must lie in (0, 1/4)".into(),
            ));
        }
        if self.palette.len() < n_sets {
            return Err(RenderError::PaletteTooSmall {
                needed: n_sets,
                have: self.palette.len(),
            });
        }
        Ok(())
    }
}

fn num(q: Q) -> String {
    let v = q.numer().to_f64().unwrap_or(0.0) / q.denom().to_f64().unwrap_or(1.0);
    let s = format!("{v:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

/// Maps torus points of tile `(ix, iy)` to pixels, with `y` pointing up.
struct Canvas {
    cell: i64,
    tiles: i64,
}

impl Canvas {
    fn size(&self) -> i64 {
        self.cell * self.tiles
    }

    fn px(&self, p: Point, ix: i64, iy: i64) -> (String, String) {
        let x = (p.x + ix) * self.cell;
        let y = (Q::from_integer(self.tiles) - (p.y + iy)) * self.cell;
        (num(x), num(y))
    }

    fn line(&self, out: &mut String, a: Point, b: Point, ix: i64, iy: i64) {
        let (x1, y1) = self.px(a, ix, iy);
        let (x2, y2) = self.px(b, ix, iy);
        let _ = writeln!(out, "<line x1=\"{x1}\" y1=\"{y1}\" x2=\"{x2}\" y2=\"{y2}\"/>");
    }
}

fn at(s: &Strand, t: Q) -> Point {
    let p0 = strand_start(s);
    Point::new(p0.x + t * s.slope.a(), p0.y + t * s.slope.b())
}

/// Parameters in `[0, 1)` where the strand leaves the cell.
fn cell_breaks(s: &Strand) -> Vec<Q> {
    let p0 = strand_start(s);
    let (a, b) = (s.slope.a(), s.slope.b());
    let mut ts = vec![Q::zero()];
    if a != 0 {
        ts.extend((0..a.abs()).map(|k| crate::motif::frac((Q::from_integer(k) - p0.x) / a)));
    }
    if b != 0 {
        ts.extend((0..b).map(|k| crate::motif::frac((Q::from_integer(k) - p0.y) / b)));
    }
    ts.sort();
    ts.dedup();
    ts
}

/// Visible parameter intervals of a strand, split at cell boundaries.
fn visible_pieces(s: &Strand, gaps: &[Q], half: Q) -> Vec<(Q, Q)> {
    let one = Q::from_integer(1);
    let mut hidden: Vec<(Q, Q)> = Vec::new();
    for &t in gaps {
        let (lo, hi) = (t - half, t + half);
        if lo < Q::zero() {
            hidden.push((lo + one, one));
            hidden.push((Q::zero(), hi));
        } else if hi > one {
            hidden.push((lo, one));
            hidden.push((Q::zero(), hi - one));
        } else {
            hidden.push((lo, hi));
        }
    }
    hidden.sort();
    let mut breaks = cell_breaks(s);
    breaks.push(one);
    let mut pieces = Vec::new();
    for w in breaks.windows(2) {
        let mut start = w[0];
        let end = w[1];
        for &(lo, hi) in &hidden {
            if hi <= start || lo >= end {
                continue;
            }
            if lo > start {
                pieces.push((start, lo));
            }
            start = start.max(hi);
        }
        if start < end {
            pieces.push((start, end));
        }
    }
    pieces
}

/// Whole-cell shift placing the piece `[t0, t1]` inside `[0, 1)^2`.
fn piece_origin(s: &Strand, t0: Q, t1: Q) -> (Q, Q) {
    let mid = at(s, (t0 + t1) / 2);
    (mid.x.floor(), mid.y.floor())
}

pub fn render_motif_svg(motif: &Motif, opts: &RenderOptions) -> Result<String, RenderError> {
    opts.check(motif.n_sets())?;
    let canvas = Canvas {
        cell: opts.cell_pixels as i64,
        tiles: opts.repeat as i64,
    };
    let size = canvas.size();
    let stroke = (opts.cell_pixels / 128).max(1);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{size}\" height=\"{size}\" viewBox=\"0 0 {size} {size}\">"
    );
    let _ = writeln!(out, "<g class=\"cells\" fill=\"none\" stroke=\"#bbbbbb\" stroke-width=\"1\">");
    for iy in 0..canvas.tiles {
        for ix in 0..canvas.tiles {
            let _ = writeln!(
                out,
                "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\"/>",
                ix * canvas.cell,
                iy * canvas.cell,
                canvas.cell,
                canvas.cell
            );
        }
    }
    out.push_str("</g>\n");

    struct Prepared<'a> {
        strand: &'a Strand,
        half: Q,
        pieces: Vec<(Q, Q)>,
    }
    let prepared: Vec<Prepared> = motif
        .strands()
        .iter()
        .map(|s| {
            let on: Vec<_> = motif.crossings().iter().filter(|c| c.involves(s.id)).collect();
            let half = opts.gap_fraction / (on.len().max(1) as i64);
            let gaps: Vec<Q> = on
                .iter()
                .filter(|c| c.lower == s.id)
                .filter_map(|c| strand_parameter(s, c.position))
                .collect();
            Prepared {
                strand: s,
                half,
                pieces: visible_pieces(s, &gaps, half),
            }
        })
        .collect();

    for iy in 0..canvas.tiles {
        for ix in 0..canvas.tiles {
            for p in &prepared {
                let s = p.strand;
                let _ = writeln!(
                    out,
                    "<g class=\"strand set-{} strand-{}\" stroke=\"{}\" stroke-width=\"{stroke}\">",
                    s.id.set + 1,
                    s.id.index + 1,
                    opts.palette[s.id.set]
                );
                for &(t0, t1) in &p.pieces {
                    let (ox, oy) = piece_origin(s, t0, t1);
                    let shift = |q: Point| Point::new(q.x - ox, q.y - oy);
                    canvas.line(&mut out, shift(at(s, t0)), shift(at(s, t1)), ix, iy);
                }
                out.push_str("</g>\n");
            }
            for c in motif.crossings() {
                let Some(over) = prepared.iter().find(|p| p.strand.id == c.upper) else {
                    continue;
                };
                let s = over.strand;
                let _ = writeln!(
                    out,
                    "<g class=\"crossing under-{}\" stroke=\"{}\" stroke-width=\"{stroke}\">",
                    c.lower.set + 1,
                    opts.palette[s.id.set]
                );
                if let Some(t) = strand_parameter(s, c.position) {
                    // A short bridge of the over-strand, centred on the crossing.
                    let d = Point::new(
                        Q::from_integer(s.slope.a()) * over.half,
                        Q::from_integer(s.slope.b()) * over.half,
                    );
                    let centre = at(s, t);
                    let (ox, oy) = (centre.x.floor(), centre.y.floor());
                    let a = Point::new(centre.x - d.x - ox, centre.y - d.y - oy);
                    let b = Point::new(centre.x + d.x - ox, centre.y + d.y - oy);
                    canvas.line(&mut out, a, b, ix, iy);
                }
                out.push_str("</g>\n");
            }
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Design grid: row `x`, column `y`; `+1` black, `-1` gray.
pub fn render_design(m: &CrossingMatrix) -> String {
    const SQUARE: usize = 24;
    let size = SQUARE * m.m();
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{size}\" height=\"{size}\" viewBox=\"0 0 {size} {size}\">"
    );
    let _ = writeln!(out, "<g class=\"design\" stroke=\"#ffffff\" stroke-width=\"1\">");
    for x in 0..m.m() {
        for y in 0..m.m() {
            let fill = if m.get(x, y) == 1 { "#000000" } else { "#808080" };
            let _ = writeln!(
                out,
                "<rect x=\"{}\" y=\"{}\" width=\"{SQUARE}\" height=\"{SQUARE}\" fill=\"{fill}\"/>",
                y * SQUARE,
                x * SQUARE
            );
        }
    }
    out.push_str("</g>\n</svg>\n");
    out
}

/// One line per crossing in `(y, x)` order; `o` marks the strand on top.
pub fn render_text(motif: &Motif) -> String {
    let mut out = format!(
        "motif N={} crossings={}\n",
        motif.n_sets(),
        motif.crossings().len()
    );
    for c in motif.crossings() {
        let (first, second) = if c.upper.set < c.lower.set {
            ((c.upper, 'o'), (c.lower, 'u'))
        } else {
            ((c.lower, 'u'), (c.upper, 'o'))
        };
        let _ = writeln!(
            out,
            "y={} x={} {}:{} {}:{}",
            c.position.y, c.position.x, first.0, first.1, second.0, second.1
        );
    }
    out
}
