//! Line-oriented spec files.
//!
//! ```text
//! # twill
//! N=2
//! slope 1 1 0
//! slope 2 0 1
//! seq 1 2 +2,-2
//! matrix 1 2 diagonal +1
//! bounds max_slope=8 max_copies=4 max_multiplier=8
//! ```
//!
//! Set indices are 1-based. `matrix` accepts `diagonal +1|-1`, `block`,
//! `satin A` or `rows R1 R2 ...` with rows written as `+`/`-` strings.
//! Every `bounds` key is optional. Anything else is an error.

use std::collections::BTreeMap;

use weave_core::{
    gen_block, gen_diagonal, gen_satin, has_errors, normalize_slope, validate_spec, CrossingMatrix,
    CrossingSequence, Diagnostic, MatrixSet, SearchBounds, Slope, WeaveSpec,
};

use crate::CliError;

/// Bounds given in a spec file or on the command line; unset fields fall
/// back to the spec's defaults.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BoundsOverride {
    pub max_slope: Option<u64>,
    pub max_copies: Option<u64>,
    pub max_multiplier: Option<u64>,
}

impl BoundsOverride {
    /// `self` layered over `under`.
    pub fn or(self, under: BoundsOverride) -> BoundsOverride {
        BoundsOverride {
            max_slope: self.max_slope.or(under.max_slope),
            max_copies: self.max_copies.or(under.max_copies),
            max_multiplier: self.max_multiplier.or(under.max_multiplier),
        }
    }

    pub fn resolve(self, spec: &WeaveSpec) -> Result<SearchBounds, CliError> {
        let d = SearchBounds::default_for(spec).map_err(|e| CliError::Parse(e.to_string()))?;
        SearchBounds::new(
            self.max_slope.unwrap_or(d.max_slope),
            self.max_copies.unwrap_or(d.max_copies),
            self.max_multiplier.unwrap_or(d.max_multiplier),
        )
        .map_err(|e| CliError::Usage(e.to_string()))
    }
}

#[derive(Debug, Clone)]
enum MatrixLine {
    Diagonal(i8),
    Block,
    Satin(u32),
    Rows(Vec<Vec<i8>>),
}

#[derive(Debug, Clone)]
pub struct SpecDocument {
    pub spec: WeaveSpec,
    /// Present when the file gives a matrix for every pair.
    pub matrices: Option<MatrixSet>,
    pub bounds: BoundsOverride,
    pub warnings: Vec<Diagnostic>,
}

fn err(line: usize, message: impl Into<String>) -> CliError {
    CliError::Parse(format!("line {line}: {}", message.into()))
}

fn parse_num<T: std::str::FromStr>(line: usize, what: &str, s: &str) -> Result<T, CliError> {
    s.parse().map_err(|_| err(line, format!("bad {what} '{s}'")))
}

fn parse_set(line: usize, s: &str, n: usize) -> Result<usize, CliError> {
    let k: usize = parse_num(line, "set index", s)?;
    if k == 0 || k > n {
        return Err(err(line, format!("set index {k} out of range 1..={n}")));
    }
    Ok(k - 1)
}

/// Parses `+p,-q`, with or without parentheses.
pub fn parse_sequence(s: &str) -> Result<CrossingSequence, String> {
    let t = s.trim().trim_start_matches('(').trim_end_matches(')');
    let (p, q) = t
        .split_once(',')
        .ok_or_else(|| format!("sequence '{s}' is not of the form +p,-q"))?;
    let p = p.trim().strip_prefix('+').unwrap_or(p.trim());
    let q = q.trim().strip_prefix('-').unwrap_or(q.trim());
    let p: u32 = p.parse().map_err(|_| format!("bad sequence '{s}'"))?;
    let q: u32 = q.parse().map_err(|_| format!("bad sequence '{s}'"))?;
    CrossingSequence::new(p, q).map_err(|e| e.to_string())
}

pub fn parse_rows(rows: &[&str]) -> Result<Vec<Vec<i8>>, String> {
    rows.iter()
        .map(|r| {
            r.chars()
                .map(|c| match c {
                    '+' => Ok(1),
                    '-' => Ok(-1),
                    _ => Err(format!("bad matrix symbol '{c}'")),
                })
                .collect()
        })
        .collect()
}

fn build_matrix(
    spec: &WeaveSpec,
    (i, j): (usize, usize),
    m: &MatrixLine,
    line: usize,
) -> Result<CrossingMatrix, CliError> {
    let seq = spec
        .sequence(i, j)
        .ok_or_else(|| err(line, format!("matrix for pair {},{} without a sequence", i + 1, j + 1)))?;
    let made = match m {
        MatrixLine::Diagonal(d) => gen_diagonal(seq.p(), seq.q(), *d),
        MatrixLine::Block if seq.p() == seq.q() => gen_block(seq.p()),
        MatrixLine::Block => return Err(err(line, format!("block needs p = q, sequence is {seq}"))),
        MatrixLine::Satin(a) if seq.q() == 1 => gen_satin(seq.p(), *a),
        MatrixLine::Satin(_) => return Err(err(line, format!("satin needs q = 1, sequence is {seq}"))),
        MatrixLine::Rows(rows) => CrossingMatrix::new((i, j), rows.clone()),
    };
    made.map(|m| m.with_pair((i, j))).map_err(|e| err(line, e.to_string()))
}

fn parse_bounds(line: usize, words: &[&str]) -> Result<BoundsOverride, CliError> {
    let mut b = BoundsOverride::default();
    for w in words {
        let (k, v) = w
            .split_once('=')
            .ok_or_else(|| err(line, format!("bounds entry '{w}' is not key=value")))?;
        let v: u64 = parse_num(line, k, v)?;
        let slot = match k {
            "max_slope" => &mut b.max_slope,
            "max_copies" => &mut b.max_copies,
            "max_multiplier" => &mut b.max_multiplier,
            _ => return Err(err(line, format!("unknown bounds key '{k}'"))),
        };
        if slot.replace(v).is_some() {
            return Err(err(line, format!("bounds key '{k}' given twice")));
        }
    }
    Ok(b)
}

pub fn parse_spec(text: &str) -> Result<SpecDocument, CliError> {
    let mut n: Option<usize> = None;
    let mut slopes: BTreeMap<usize, Slope> = BTreeMap::new();
    let mut seqs: BTreeMap<(usize, usize), CrossingSequence> = BTreeMap::new();
    let mut matrices: Vec<((usize, usize), MatrixLine, usize)> = Vec::new();
    let mut bounds: Option<BoundsOverride> = None;

    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        if let Some(v) = body.strip_prefix("N=") {
            if n.is_some() {
                return Err(err(line, "N given twice"));
            }
            let v: usize = parse_num(line, "N", v.trim())?;
            if v < 2 {
                return Err(err(line, "N must be at least 2"));
            }
            n = Some(v);
            continue;
        }
        let words: Vec<&str> = body.split_whitespace().collect();
        let key = words[0];
        if key == "bounds" {
            if bounds.is_some() {
                return Err(err(line, "bounds given twice"));
            }
            bounds = Some(parse_bounds(line, &words[1..])?);
            continue;
        }
        let n = match (key, n) {
            ("slope" | "seq" | "matrix", Some(n)) => n,
            ("slope" | "seq" | "matrix", None) => return Err(err(line, format!("'{key}' before N="))),
            _ => return Err(err(line, format!("unknown key '{key}'"))),
        };
        match key {
            "slope" => {
                let [_, i, a, b] = words[..] else {
                    return Err(err(line, "expected 'slope I A B'"));
                };
                let i = parse_set(line, i, n)?;
                let s = normalize_slope(parse_num(line, "slope", a)?, parse_num(line, "slope", b)?)
                    .map_err(|e| err(line, e.to_string()))?;
                if slopes.insert(i, s).is_some() {
                    return Err(err(line, format!("slope of set {} given twice", i + 1)));
                }
            }
            "seq" => {
                let [_, i, j, s] = words[..] else {
                    return Err(err(line, "expected 'seq I J +p,-q'"));
                };
                let (i, j) = (parse_set(line, i, n)?, parse_set(line, j, n)?);
                if i == j {
                    return Err(err(line, "a set does not cross itself"));
                }
                let s = parse_sequence(s).map_err(|e| err(line, e))?;
                let (key, s) = if i < j { ((i, j), s) } else { ((j, i), s.complement()) };
                if seqs.insert(key, s).is_some() {
                    return Err(err(line, format!("sequence of pair {},{} given twice", key.0 + 1, key.1 + 1)));
                }
            }
            _ => {
                if words.len() < 4 {
                    return Err(err(line, "expected 'matrix I J KIND ...'"));
                }
                let (i, j) = (parse_set(line, words[1], n)?, parse_set(line, words[2], n)?);
                let rest = &words[4..];
                let m = match (words[3], rest) {
                    ("diagonal", [d]) => match *d {
                        "+1" | "1" => MatrixLine::Diagonal(1),
                        "-1" => MatrixLine::Diagonal(-1),
                        _ => return Err(err(line, format!("diagonal direction must be +1 or -1, got '{d}'"))),
                    },
                    ("diagonal", []) => MatrixLine::Diagonal(1),
                    ("block", []) => MatrixLine::Block,
                    ("satin", [a]) => MatrixLine::Satin(parse_num(line, "satin step", a)?),
                    ("rows", rows) if !rows.is_empty() => {
                        MatrixLine::Rows(parse_rows(rows).map_err(|e| err(line, e))?)
                    }
                    (kind, _) => return Err(err(line, format!("bad matrix description '{kind} {}'", rest.join(" ")))),
                };
                matrices.push(((i, j), m, line));
            }
        }
    }

    let n = n.ok_or_else(|| CliError::Parse("missing N=".into()))?;
    if slopes.len() != n {
        let missing: Vec<String> = (0..n).filter(|i| !slopes.contains_key(i)).map(|i| (i + 1).to_string()).collect();
        return Err(CliError::Parse(format!("missing slope for set(s) {}", missing.join(","))));
    }
    let spec = WeaveSpec::new(slopes.into_values().collect(), seqs);
    let diagnostics = validate_spec(&spec);
    if has_errors(&diagnostics) {
        let msgs: Vec<String> = diagnostics.iter().map(ToString::to_string).collect();
        return Err(CliError::Parse(msgs.join("; ")));
    }
    let matrices = if matrices.is_empty() {
        None
    } else {
        let built = matrices
            .iter()
            .map(|(pair, m, line)| build_matrix(&spec, *pair, m, *line))
            .collect::<Result<Vec<_>, _>>()?;
        Some(MatrixSet::new(n, built).map_err(|e| CliError::Parse(e.to_string()))?)
    };
    Ok(SpecDocument {
        spec,
        matrices,
        bounds: bounds.unwrap_or_default(),
        warnings: diagnostics,
    })
}
