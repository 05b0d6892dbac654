//! Domain types shared by every other module: crossing sequences, torus
//! slopes and weave specifications.

use std::collections::BTreeMap;
use std::fmt;

use num::Integer;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WeaveError {
    #[error("crossing sequence (+{p},-{q}) is invalid")]
    InvalidSequence { p: u32, q: u32 },
    #[error("slope ({a},{b}) is not a coprime pair")]
    NotCoprime { a: i64, b: i64 },
    #[error("slope (0,0) does not name a curve")]
    ZeroSlope,
    #[error("set index {index} out of range for {n_sets} sets")]
    IndexOutOfRange { index: usize, n_sets: usize },
}

/// The cyclic pattern `(+p,-q)`: a thread goes over `p` consecutive threads
/// of the other set, then under `q`.
///
/// `(+1,0)` and `(0,-1)` are the two non-crossing sequences (always over,
/// always under). Every other sequence has `p, q >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CrossingSequence {
    p: u32,
    q: u32,
}

impl CrossingSequence {
    pub fn new(p: u32, q: u32) -> Result<Self, WeaveError> {
        let ok = match (p, q) {
            (0, 0) => false,
            (0, q) => q == 1,
            (p, 0) => p == 1,
            _ => true,
        };
        if ok {
            Ok(Self { p, q })
        } else {
            Err(WeaveError::InvalidSequence { p, q })
        }
    }

    pub const ALWAYS_OVER: CrossingSequence = CrossingSequence { p: 1, q: 0 };
    pub const ALWAYS_UNDER: CrossingSequence = CrossingSequence { p: 0, q: 1 };

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// Period length `p + q`, also the size of the crossing matrix.
    pub fn module(&self) -> u32 {
        self.p + self.q
    }

    /// The same pattern seen from the other set: `(+q,-p)`.
    pub fn complement(&self) -> Self {
        Self {
            p: self.q,
            q: self.p,
        }
    }

    pub fn is_crossing(&self) -> bool {
        self.p > 0 && self.q > 0
    }

    /// One period of the word, `+1` repeated `p` times then `-1` repeated `q` times.
    pub fn word(&self) -> Vec<i8> {
        std::iter::repeat_n(1, self.p as usize)
            .chain(std::iter::repeat_n(-1, self.q as usize))
            .collect()
    }
}

impl fmt::Display for CrossingSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(+{},-{})", self.p, self.q)
    }
}

pub fn complement(seq: CrossingSequence) -> CrossingSequence {
    seq.complement()
}

/// Free homotopy class of an essential simple closed curve on the torus.
///
/// Always stored normalized: `b > 0`, or `(a, b) == (1, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Slope {
    a: i64,
    b: i64,
}

impl Slope {
    pub fn new(a: i64, b: i64) -> Result<Self, WeaveError> {
        normalize_slope(a, b)
    }

    pub fn a(&self) -> i64 {
        self.a
    }

    pub fn b(&self) -> i64 {
        self.b
    }

    /// Signed determinant `a1*b2 - a2*b1`.
    pub fn det(&self, other: &Slope) -> i64 {
        self.a * other.b - other.a * self.b
    }

    pub fn max_abs(&self) -> u64 {
        self.a.unsigned_abs().max(self.b.unsigned_abs())
    }

    pub fn l1(&self) -> u64 {
        self.a.unsigned_abs() + self.b.unsigned_abs()
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.a, self.b)
    }
}

pub fn normalize_slope(a: i64, b: i64) -> Result<Slope, WeaveError> {
    if a == 0 && b == 0 {
        return Err(WeaveError::ZeroSlope);
    }
    if a.gcd(&b) != 1 {
        return Err(WeaveError::NotCoprime { a, b });
    }
    let flip = b < 0 || (b == 0 && a < 0);
    Ok(if flip {
        Slope { a: -a, b: -b }
    } else {
        Slope { a, b }
    })
}

/// A doubly periodic untwisted weave: `N` thread sets, the slope of each
/// set in the input tiling, and one crossing sequence per unordered pair.
///
/// Sequences are stored for `i < j` from the viewpoint of set `i`; use
/// [`WeaveSpec::sequence`] to read them from either side.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeaveSpec {
    base_slopes: Vec<Slope>,
    sequences: BTreeMap<(usize, usize), CrossingSequence>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    /// 0-based set indices involved.
    pub sets: Vec<usize>,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        let sets: Vec<String> = self.sets.iter().map(|s| (s + 1).to_string()).collect();
        write!(f, "{tag} [sets {}]: {}", sets.join(","), self.message)
    }
}

impl WeaveSpec {
    /// Builds a spec without checking it; run [`validate_spec`] afterwards.
    /// Keys with `i > j` are flipped and their sequence complemented.
    pub fn new(
        base_slopes: Vec<Slope>,
        sequences: impl IntoIterator<Item = ((usize, usize), CrossingSequence)>,
    ) -> Self {
        let sequences = sequences
            .into_iter()
            .map(|((i, j), s)| if i > j { ((j, i), s.complement()) } else { ((i, j), s) })
            .collect();
        Self {
            base_slopes,
            sequences,
        }
    }

    /// Square tiling: two sets with base slopes (1,0) and (0,1).
    pub fn square(seq: CrossingSequence) -> Self {
        Self::new(
            vec![Slope { a: 1, b: 0 }, Slope { a: 0, b: 1 }],
            [((0, 1), seq)],
        )
    }

    /// Kagome (trihexagonal) tiling: three sets with base slopes (1,0), (0,1), (1,1).
    pub fn kagome(s12: CrossingSequence, s13: CrossingSequence, s23: CrossingSequence) -> Self {
        Self::new(
            vec![Slope { a: 1, b: 0 }, Slope { a: 0, b: 1 }, Slope { a: 1, b: 1 }],
            [((0, 1), s12), ((0, 2), s13), ((1, 2), s23)],
        )
    }

    pub fn n_sets(&self) -> usize {
        self.base_slopes.len()
    }

    pub fn base_slopes(&self) -> &[Slope] {
        &self.base_slopes
    }

    pub fn sequences(&self) -> &BTreeMap<(usize, usize), CrossingSequence> {
        &self.sequences
    }

    /// All unordered pairs `(i, j)`, `i < j`, in lexicographic order.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let n = self.n_sets();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect()
    }

    /// Sequence of set `i` against set `j`, complemented when `i > j`.
    pub fn sequence(&self, i: usize, j: usize) -> Option<CrossingSequence> {
        if i < j {
            self.sequences.get(&(i, j)).copied()
        } else {
            self.sequences.get(&(j, i)).map(|s| s.complement())
        }
    }

    pub(crate) fn check_index(&self, index: usize) -> Result<(), WeaveError> {
        if index < self.n_sets() {
            Ok(())
        } else {
            Err(WeaveError::IndexOutOfRange {
                index,
                n_sets: self.n_sets(),
            })
        }
    }
}

pub fn validate_spec(spec: &WeaveSpec) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let n = spec.n_sets();
    let error = |sets: Vec<usize>, message: String| Diagnostic {
        severity: Severity::Error,
        sets,
        message,
    };
    if n < 2 {
        out.push(error(vec![], format!("need at least 2 thread sets, got {n}")));
    }
    for &(i, j) in spec.sequences.keys() {
        if i == j || j >= n {
            out.push(error(
                vec![i, j],
                "sequence refers to a missing or repeated set".into(),
            ));
        }
    }
    for (i, j) in spec.pairs() {
        let Some(seq) = spec.sequences.get(&(i, j)) else {
            out.push(error(vec![i, j], "missing crossing sequence".into()));
            continue;
        };
        let v = spec.base_slopes[i].det(&spec.base_slopes[j]);
        if v == 0 && seq.is_crossing() {
            out.push(error(
                vec![i, j],
                format!("crossing sequence on parallel sets {seq}"),
            ));
        } else if v != 0 && !seq.is_crossing() {
            out.push(Diagnostic {
                severity: Severity::Warning,
                sets: vec![i, j],
                message: format!(
                    "intersecting sets use the non-crossing sequence {seq}; only valid if blocked by a third set"
                ),
            });
        }
    }
    out
}

pub fn has_errors(diagnostics: &[Diagnostic]) -> bool {
    diagnostics.iter().any(|d| d.severity == Severity::Error)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(p: u32, q: u32) -> CrossingSequence {
        CrossingSequence::new(p, q).unwrap()
    }

    #[test]
    fn complement_examples() {
        assert_eq!(complement(seq(2, 2)), seq(2, 2));
        assert_eq!(complement(seq(4, 1)), seq(1, 4));
        assert_eq!(complement(CrossingSequence::ALWAYS_OVER), CrossingSequence::ALWAYS_UNDER);
    }

    #[test]
    fn sequence_rules() {
        assert!(CrossingSequence::new(0, 0).is_err());
        assert!(CrossingSequence::new(2, 0).is_err());
        assert!(CrossingSequence::new(0, 3).is_err());
        assert_eq!(CrossingSequence::ALWAYS_OVER.module(), 1);
        assert_eq!(seq(3, 2).word(), vec![1, 1, 1, -1, -1]);
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize_slope(-2, -1).unwrap(), Slope::new(2, 1).unwrap());
        let s = normalize_slope(0, -1).unwrap();
        assert_eq!((s.a(), s.b()), (0, 1));
        assert_eq!(normalize_slope(4, 2), Err(WeaveError::NotCoprime { a: 4, b: 2 }));
        assert_eq!(normalize_slope(0, 0), Err(WeaveError::ZeroSlope));
        let s = normalize_slope(-1, 0).unwrap();
        assert_eq!((s.a(), s.b()), (1, 0));
        let s = normalize_slope(2, -1).unwrap();
        assert_eq!((s.a(), s.b()), (-2, 1));
    }

    #[test]
    fn validate_examples() {
        assert!(validate_spec(&WeaveSpec::square(seq(2, 2))).is_empty());

        let parallel = WeaveSpec::new(
            vec![Slope::new(1, 0).unwrap(), Slope::new(1, 0).unwrap()],
            [((0, 1), seq(2, 2))],
        );
        let d = validate_spec(&parallel);
        assert_eq!(d.len(), 1);
        assert!(d[0].message.contains("crossing sequence on parallel sets"));
        assert_eq!(d[0].sets, vec![0, 1]);

        assert!(validate_spec(&WeaveSpec::kagome(seq(1, 1), seq(1, 1), seq(1, 1))).is_empty());
    }

    #[test]
    fn validate_missing_and_warning() {
        let spec = WeaveSpec::new(
            vec![
                Slope::new(1, 0).unwrap(),
                Slope::new(0, 1).unwrap(),
                Slope::new(1, 1).unwrap(),
            ],
            [((0, 1), seq(1, 1)), ((0, 2), CrossingSequence::ALWAYS_OVER)],
        );
        let d = validate_spec(&spec);
        assert!(has_errors(&d));
        assert!(d.iter().any(|d| d.message == "missing crossing sequence" && d.sets == vec![1, 2]));
        assert!(d
            .iter()
            .any(|d| d.severity == Severity::Warning && d.sets == vec![0, 2]));
    }

    #[test]
    fn reversed_keys_are_complemented() {
        let spec = WeaveSpec::new(
            vec![Slope::new(1, 0).unwrap(), Slope::new(0, 1).unwrap()],
            [((1, 0), seq(3, 1))],
        );
        assert_eq!(spec.sequence(0, 1), Some(seq(1, 3)));
        assert_eq!(spec.sequence(1, 0), Some(seq(3, 1)));
    }
}
