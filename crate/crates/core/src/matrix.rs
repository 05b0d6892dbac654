//! Crossing matrices: validation, the satin/block/diagonal generators,
//! complementation, the shift-and-rotation transform group, equivalence of
//! matrix sets, and exact rank.
//!
//! Entry `(x, y)` is `+1` when strand `x` of the row set passes over strand
//! `y` of the column set.

use std::collections::BTreeMap;
use std::fmt;

use num::rational::Ratio;
use num::{Integer, Zero};
use thiserror::Error;

use crate::weave::{CrossingSequence, WeaveSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("matrix module {matrix} does not match sequence module {sequence}")]
    ModuleMismatch { matrix: usize, sequence: u32 },
    #[error("gcd({a},{m}) != 1")]
    GcdViolation { a: u32, m: u32 },
    #[error("invalid generator parameter: {0}")]
    InvalidParameter(String),
    #[error("matrix must be a non-empty square array of +1/-1 entries")]
    Malformed,
    #[error("cannot shift matrices of different modules uniformly")]
    MixedModules,
    #[error("matrix sets have different shapes: {0}")]
    ShapeMismatch(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CrossingMatrix {
    /// Ordered pair `(row set, column set)`, 0-based.
    pair: (usize, usize),
    entries: Vec<Vec<i8>>,
}

impl CrossingMatrix {
    pub fn new(pair: (usize, usize), entries: Vec<Vec<i8>>) -> Result<Self, MatrixError> {
        let m = entries.len();
        let ok = m > 0
            && entries
                .iter()
                .all(|r| r.len() == m && r.iter().all(|&e| e == 1 || e == -1));
        if !ok {
            return Err(MatrixError::Malformed);
        }
        Ok(Self { pair, entries })
    }

    fn from_fn(pair: (usize, usize), m: usize, f: impl Fn(usize, usize) -> i8) -> Self {
        Self {
            pair,
            entries: (0..m).map(|x| (0..m).map(|y| f(x, y)).collect()).collect(),
        }
    }

    pub fn m(&self) -> usize {
        self.entries.len()
    }

    pub fn pair(&self) -> (usize, usize) {
        self.pair
    }

    pub fn with_pair(mut self, pair: (usize, usize)) -> Self {
        self.pair = pair;
        self
    }

    pub fn entries(&self) -> &[Vec<i8>] {
        &self.entries
    }

    pub fn get(&self, x: usize, y: usize) -> i8 {
        self.entries[x][y]
    }

    pub fn row(&self, x: usize) -> &[i8] {
        &self.entries[x]
    }

    pub fn column(&self, y: usize) -> Vec<i8> {
        self.entries.iter().map(|r| r[y]).collect()
    }

    /// The sequence read off row 0, if every row and column agrees with it.
    pub fn infer_sequence(&self) -> Option<CrossingSequence> {
        let p = self.entries[0].iter().filter(|&&e| e == 1).count() as u32;
        let seq = CrossingSequence::new(p, self.m() as u32 - p).ok()?;
        validate_matrix(self, seq).ok()?.then_some(seq)
    }
}

/// True when `word` read cyclically is `p` times `+1` followed by `q` times `-1`.
pub(crate) fn is_cyclic_word(word: &[i8], seq: CrossingSequence) -> bool {
    let plus = word.iter().filter(|&&e| e == 1).count();
    if plus != seq.p() as usize || word.len() != seq.module() as usize {
        return false;
    }
    let changes = (0..word.len())
        .filter(|&k| word[k] != word[(k + 1) % word.len()])
        .count();
    changes == if seq.is_crossing() { 2 } else { 0 }
}

pub fn validate_matrix(m: &CrossingMatrix, seq: CrossingSequence) -> Result<bool, MatrixError> {
    if m.m() != seq.module() as usize {
        return Err(MatrixError::ModuleMismatch {
            matrix: m.m(),
            sequence: seq.module(),
        });
    }
    let rows = m.entries.iter().all(|r| is_cyclic_word(r, seq));
    let cols = (0..m.m()).all(|y| is_cyclic_word(&m.column(y), seq));
    Ok(rows && cols)
}

/// Matrix of the reversed pair: the negated transpose.
pub fn complement_matrix(m: &CrossingMatrix) -> CrossingMatrix {
    CrossingMatrix::from_fn((m.pair.1, m.pair.0), m.m(), |x, y| -m.entries[y][x])
}

/// Regular satin for `(+p,-1)`: `-1` at row `a*k mod m`, column `k`.
pub fn gen_satin(p: u32, a: u32) -> Result<CrossingMatrix, MatrixError> {
    if p == 0 {
        return Err(MatrixError::InvalidParameter("satin needs p >= 1".into()));
    }
    let m = p + 1;
    if a.gcd(&m) != 1 {
        return Err(MatrixError::GcdViolation { a, m });
    }
    if a == 0 || a >= m {
        return Err(MatrixError::InvalidParameter(format!(
            "satin step a={a} must satisfy 1 <= a < {m}"
        )));
    }
    let (m, a) = (m as usize, a as usize);
    Ok(CrossingMatrix::from_fn((0, 1), m, |x, y| {
        if x == (a * y) % m {
            -1
        } else {
            1
        }
    }))
}

/// Basket-style block matrix for `(+p,-p)`.
pub fn gen_block(p: u32) -> Result<CrossingMatrix, MatrixError> {
    if p == 0 {
        return Err(MatrixError::InvalidParameter("block needs p >= 1".into()));
    }
    let p = p as usize;
    Ok(CrossingMatrix::from_fn((0, 1), 2 * p, |x, y| {
        if (x < p) == (y < p) {
            1
        } else {
            -1
        }
    }))
}

/// Twill-style diagonal matrix: row `k` is row 0 shifted right by `direction * k`.
pub fn gen_diagonal(p: u32, q: u32, direction: i8) -> Result<CrossingMatrix, MatrixError> {
    let seq = CrossingSequence::new(p, q)
        .map_err(|e| MatrixError::InvalidParameter(e.to_string()))?;
    if direction != 1 && direction != -1 {
        return Err(MatrixError::InvalidParameter(format!(
            "direction must be +1 or -1, got {direction}"
        )));
    }
    let word = seq.word();
    let m = word.len() as i64;
    Ok(CrossingMatrix::from_fn((0, 1), word.len(), |x, y| {
        word[(y as i64 - direction as i64 * x as i64).rem_euclid(m) as usize]
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rotation {
    Identity,
    HalfTurn,
    /// Quarter turn together with inversion of every symbol.
    QuarterTurn,
    /// Three-quarter turn together with inversion of every symbol.
    ThreeQuarterTurn,
}

impl Rotation {
    pub const ALL: [Rotation; 4] = [
        Rotation::Identity,
        Rotation::HalfTurn,
        Rotation::QuarterTurn,
        Rotation::ThreeQuarterTurn,
    ];

    pub fn apply(self, m: &CrossingMatrix) -> CrossingMatrix {
        let n = m.m();
        let e = &m.entries;
        let f: Box<dyn Fn(usize, usize) -> i8> = match self {
            Rotation::Identity => Box::new(|x, y| e[x][y]),
            Rotation::HalfTurn => Box::new(|x, y| e[n - 1 - x][n - 1 - y]),
            Rotation::QuarterTurn => Box::new(|x, y| -e[n - 1 - y][x]),
            Rotation::ThreeQuarterTurn => Box::new(|x, y| -e[y][n - 1 - x]),
        };
        CrossingMatrix::from_fn(m.pair, n, f)
    }

    fn name(self) -> &'static str {
        match self {
            Rotation::Identity => "identity",
            Rotation::HalfTurn => "half-turn",
            Rotation::QuarterTurn => "quarter-turn+inversion",
            Rotation::ThreeQuarterTurn => "three-quarter-turn+inversion",
        }
    }
}

/// Cyclic shift of rows and columns followed by a rotation, applied
/// identically to every matrix of a set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MatrixTransform {
    pub row_shift: usize,
    pub col_shift: usize,
    pub rotation: Rotation,
}

impl MatrixTransform {
    pub const IDENTITY: MatrixTransform = MatrixTransform {
        row_shift: 0,
        col_shift: 0,
        rotation: Rotation::Identity,
    };

    pub fn is_shift_free(&self) -> bool {
        self.row_shift == 0 && self.col_shift == 0
    }

    /// Entry `(x, y)` of the result is entry `(x - row_shift, y - col_shift)`
    /// of the input, then the rotation is applied.
    pub fn apply(&self, m: &CrossingMatrix) -> CrossingMatrix {
        let n = m.m();
        let shifted = CrossingMatrix::from_fn(m.pair, n, |x, y| {
            m.entries[(x + n - self.row_shift % n) % n][(y + n - self.col_shift % n) % n]
        });
        self.rotation.apply(&shifted)
    }

    /// The transform `t'` with `complement(t(M)) == t'(complement(M))`.
    pub fn transposed(&self) -> MatrixTransform {
        let rotation = match self.rotation {
            Rotation::QuarterTurn => Rotation::ThreeQuarterTurn,
            Rotation::ThreeQuarterTurn => Rotation::QuarterTurn,
            r => r,
        };
        MatrixTransform {
            row_shift: self.col_shift,
            col_shift: self.row_shift,
            rotation,
        }
    }
}

impl fmt::Display for MatrixTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "row_shift={} col_shift={} rotation={}",
            self.row_shift,
            self.col_shift,
            self.rotation.name()
        )
    }
}

/// One crossing matrix per unordered pair of thread sets, keyed `(i, j)` with `i < j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MatrixSet {
    n_sets: usize,
    matrices: BTreeMap<(usize, usize), CrossingMatrix>,
}

impl MatrixSet {
    /// Matrices given for `(j, i)` with `j > i` are complemented into `(i, j)`.
    pub fn new(
        n_sets: usize,
        matrices: impl IntoIterator<Item = CrossingMatrix>,
    ) -> Result<Self, MatrixError> {
        let mut map = BTreeMap::new();
        for m in matrices {
            let (i, j) = m.pair;
            if i == j || i >= n_sets || j >= n_sets {
                return Err(MatrixError::ShapeMismatch(format!(
                    "pair ({},{}) is not valid for {n_sets} sets",
                    i + 1,
                    j + 1
                )));
            }
            let m = if i > j { complement_matrix(&m) } else { m };
            if map.insert(m.pair, m).is_some() {
                return Err(MatrixError::ShapeMismatch(format!(
                    "pair ({},{}) given twice",
                    i.min(j) + 1,
                    i.max(j) + 1
                )));
            }
        }
        let expected = n_sets * (n_sets - 1) / 2;
        if map.len() != expected {
            return Err(MatrixError::ShapeMismatch(format!(
                "expected {expected} matrices for {n_sets} sets, got {}",
                map.len()
            )));
        }
        Ok(Self {
            n_sets,
            matrices: map,
        })
    }

    /// A two-set collection holding one matrix.
    pub fn single(m: CrossingMatrix) -> Self {
        Self::new(2, [m.with_pair((0, 1))]).expect("one pair for two sets")
    }

    pub fn n_sets(&self) -> usize {
        self.n_sets
    }

    pub fn get(&self, i: usize, j: usize) -> Option<&CrossingMatrix> {
        self.matrices.get(&(i, j))
    }

    pub fn matrices(&self) -> impl Iterator<Item = &CrossingMatrix> {
        self.matrices.values()
    }

    pub fn modules_equal(&self) -> bool {
        let mut it = self.matrices.values().map(CrossingMatrix::m);
        let first = it.next();
        it.all(|m| Some(m) == first)
    }

    /// Checks every matrix against the spec's sequence for its pair.
    pub fn check_against(&self, spec: &WeaveSpec) -> Result<(), MatrixError> {
        if self.n_sets != spec.n_sets() {
            return Err(MatrixError::ShapeMismatch(format!(
                "matrix set has {} sets, spec has {}",
                self.n_sets,
                spec.n_sets()
            )));
        }
        for m in self.matrices.values() {
            let (i, j) = m.pair;
            let seq = spec.sequence(i, j).ok_or_else(|| {
                MatrixError::ShapeMismatch(format!("no sequence for pair ({},{})", i + 1, j + 1))
            })?;
            if !validate_matrix(m, seq)? {
                return Err(MatrixError::ShapeMismatch(format!(
                    "matrix for pair ({},{}) is not valid for {seq}",
                    i + 1,
                    j + 1
                )));
            }
        }
        Ok(())
    }

    pub fn map(&self, f: impl Fn(&CrossingMatrix) -> CrossingMatrix) -> Self {
        Self {
            n_sets: self.n_sets,
            matrices: self.matrices.iter().map(|(&k, m)| (k, f(m))).collect(),
        }
    }
}

pub fn apply_transform(set: &MatrixSet, t: MatrixTransform) -> Result<MatrixSet, MatrixError> {
    if !t.is_shift_free() && !set.modules_equal() {
        return Err(MatrixError::MixedModules);
    }
    Ok(set.map(|m| t.apply(m)))
}

/// Every transform the equivalence search tries, in first-match order:
/// shifts lexicographically, then rotations in [`Rotation::ALL`] order.
/// Sets with mixed modules only get the four shift-free rotations.
pub fn transform_group(set: &MatrixSet) -> Vec<MatrixTransform> {
    let m = if set.modules_equal() {
        set.matrices().next().map_or(1, CrossingMatrix::m)
    } else {
        1
    };
    let mut out = Vec::with_capacity(4 * m * m);
    for row_shift in 0..m {
        for col_shift in 0..m {
            for rotation in Rotation::ALL {
                out.push(MatrixTransform {
                    row_shift,
                    col_shift,
                    rotation,
                });
            }
        }
    }
    out
}

/// A transform taking every matrix of `a` onto the matching matrix of `b`
/// at once, or `None`.
pub fn equivalent_sets(a: &MatrixSet, b: &MatrixSet) -> Result<Option<MatrixTransform>, MatrixError> {
    if a.n_sets != b.n_sets {
        return Err(MatrixError::ShapeMismatch(format!(
            "{} sets vs {} sets",
            a.n_sets, b.n_sets
        )));
    }
    for (k, ma) in &a.matrices {
        let mb = &b.matrices[k];
        if ma.m() != mb.m() {
            return Err(MatrixError::ShapeMismatch(format!(
                "pair ({},{}) has module {} vs {}",
                k.0 + 1,
                k.1 + 1,
                ma.m(),
                mb.m()
            )));
        }
    }
    Ok(transform_group(a).into_iter().find(|t| {
        a.matrices
            .iter()
            .all(|(k, ma)| t.apply(ma).entries == b.matrices[k].entries)
    }))
}

/// Rank over the rationals, by exact Gaussian elimination.
pub fn rank(m: &CrossingMatrix) -> usize {
    let mut rows: Vec<Vec<Ratio<i64>>> = m
        .entries
        .iter()
        .map(|r| r.iter().map(|&e| Ratio::from_integer(e as i64)).collect())
        .collect();
    let n = m.m();
    let mut rank = 0;
    for col in 0..n {
        let Some(pivot) = (rank..n).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && !row[col].is_zero() {
                let factor = row[col] / pivot_row[col];
                for (x, p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                    *x -= factor * p;
                }
            }
        }
        rank += 1;
    }
    rank
}

impl CrossingMatrix {
    /// Header line plus `m` rows of `+`/`-`; set indices are written 1-based.
    pub fn to_text(&self) -> String {
        let seq = self.infer_sequence();
        let (p, q) = match seq {
            Some(s) => (s.p(), s.q()),
            None => {
                let p = self.entries[0].iter().filter(|&&e| e == 1).count() as u32;
                (p, self.m() as u32 - p)
            }
        };
        let mut out = format!(
            "m={} pair={},{} seq=+{},-{}\n",
            self.m(),
            self.pair.0 + 1,
            self.pair.1 + 1,
            p,
            q
        );
        for row in &self.entries {
            out.extend(row.iter().map(|&e| if e == 1 { '+' } else { '-' }));
            out.push('\n');
        }
        out
    }
}

impl MatrixSet {
    pub fn to_text(&self) -> String {
        self.matrices.values().map(CrossingMatrix::to_text).collect()
    }
}

/// A parsed matrix block together with the sequence its header declares.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixBlock {
    pub matrix: CrossingMatrix,
    pub sequence: CrossingSequence,
}

fn parse_header(line: &str, lineno: usize) -> Result<(usize, (usize, usize), CrossingSequence), MatrixError> {
    let err = |message: String| MatrixError::Parse {
        line: lineno,
        message,
    };
    let mut m = None;
    let mut pair = None;
    let mut seq = None;
    for field in line.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| err(format!("expected key=value, got {field:?}")))?;
        match key {
            "m" => m = Some(value.parse::<usize>().map_err(|e| err(format!("m: {e}")))?),
            "pair" => {
                let (i, j) = value
                    .split_once(',')
                    .ok_or_else(|| err("pair must be <i>,<j>".into()))?;
                let i: usize = i.parse().map_err(|e| err(format!("pair: {e}")))?;
                let j: usize = j.parse().map_err(|e| err(format!("pair: {e}")))?;
                if i == 0 || j == 0 {
                    return Err(err("set indices are 1-based".into()));
                }
                pair = Some((i - 1, j - 1));
            }
            "seq" => {
                let (p, q) = value
                    .split_once(',')
                    .ok_or_else(|| err("seq must be +<p>,-<q>".into()))?;
                let p = p
                    .strip_prefix('+')
                    .ok_or_else(|| err("seq must be +<p>,-<q>".into()))?;
                let q = q
                    .strip_prefix('-')
                    .ok_or_else(|| err("seq must be +<p>,-<q>".into()))?;
                let p: u32 = p.parse().map_err(|e| err(format!("seq: {e}")))?;
                let q: u32 = q.parse().map_err(|e| err(format!("seq: {e}")))?;
                seq = Some(CrossingSequence::new(p, q).map_err(|e| err(e.to_string()))?);
            }
            other => return Err(err(format!("unknown key {other:?}"))),
        }
    }
    match (m, pair, seq) {
        (Some(m), Some(pair), Some(seq)) => Ok((m, pair, seq)),
        _ => Err(err("header needs m=, pair= and seq=".into())),
    }
}

/// Parses one or more matrix blocks. Blank lines and `#` comments are skipped.
pub fn parse_matrices(text: &str) -> Result<Vec<MatrixBlock>, MatrixError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(n, l)| (n + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let mut out = Vec::new();
    while let Some((lineno, header)) = lines.next() {
        let (m, pair, sequence) = parse_header(header, lineno)?;
        if m == 0 {
            return Err(MatrixError::Parse {
                line: lineno,
                message: "m must be positive".into(),
            });
        }
        let mut entries = Vec::with_capacity(m);
        for _ in 0..m {
            let (n, row) = lines.next().ok_or(MatrixError::Parse {
                line: lineno,
                message: format!("expected {m} rows"),
            })?;
            let row: Vec<i8> = row
                .chars()
                .map(|c| match c {
                    '+' => Ok(1),
                    '-' => Ok(-1),
                    c => Err(MatrixError::Parse {
                        line: n,
                        message: format!("unexpected character {c:?}"),
                    }),
                })
                .collect::<Result<_, _>>()?;
            if row.len() != m {
                return Err(MatrixError::Parse {
                    line: n,
                    message: format!("row has {} entries, expected {m}", row.len()),
                });
            }
            entries.push(row);
        }
        out.push(MatrixBlock {
            matrix: CrossingMatrix::new(pair, entries)?,
            sequence,
        });
    }
    Ok(out)
}
