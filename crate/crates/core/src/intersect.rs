//! Geometric intersection numbers and pairwise crossing numbers.

use num::Integer;

use crate::weave::{Slope, WeaveError, WeaveSpec};

/// Crossings needed between one pair of thread sets so that both sets see
/// whole periods of every sequence they take part in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairwiseCrossing {
    pub i: usize,
    pub j: usize,
    /// Geometric intersection number of the base slopes.
    pub v: u64,
    pub zeta_i: u64,
    pub zeta_j: u64,
    pub c: u64,
}

impl PairwiseCrossing {
    pub fn is_crossing(&self) -> bool {
        self.c > 0
    }
}

/// `|a1*b2 - a2*b1|`.
pub fn geometric_intersection(s1: Slope, s2: Slope) -> u64 {
    s1.det(&s2).unsigned_abs()
}

/// lcm of the modules of every sequence involving `set`.
fn module_lcm(spec: &WeaveSpec, set: usize) -> u64 {
    (0..spec.n_sets())
        .filter(|&k| k != set)
        .filter_map(|k| spec.sequence(set, k))
        .fold(1u64, |acc, s| acc.lcm(&(s.module() as u64)))
}

pub fn pairwise_crossing_number(
    spec: &WeaveSpec,
    i: usize,
    j: usize,
) -> Result<PairwiseCrossing, WeaveError> {
    spec.check_index(i)?;
    spec.check_index(j)?;
    if i == j {
        return Err(WeaveError::IndexOutOfRange {
            index: j,
            n_sets: spec.n_sets(),
        });
    }
    let v = geometric_intersection(spec.base_slopes()[i], spec.base_slopes()[j]);
    if v == 0 {
        return Ok(PairwiseCrossing {
            i,
            j,
            v,
            zeta_i: 0,
            zeta_j: 0,
            c: 0,
        });
    }
    let zeta_i = v * module_lcm(spec, i);
    let zeta_j = v * module_lcm(spec, j);
    Ok(PairwiseCrossing {
        i,
        j,
        v,
        zeta_i,
        zeta_j,
        c: zeta_i.lcm(&zeta_j),
    })
}

/// Pairwise crossing numbers for every `i < j`, in [`WeaveSpec::pairs`] order.
pub fn all_pairwise(spec: &WeaveSpec) -> Result<Vec<PairwiseCrossing>, WeaveError> {
    spec.pairs()
        .into_iter()
        .map(|(i, j)| pairwise_crossing_number(spec, i, j))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weave::CrossingSequence;

    fn slope(a: i64, b: i64) -> Slope {
        Slope::new(a, b).unwrap()
    }

    #[test]
    fn intersection_examples() {
        assert_eq!(geometric_intersection(slope(1, 0), slope(0, 1)), 1);
        assert_eq!(geometric_intersection(slope(2, 1), slope(-2, 1)), 4);
        assert_eq!(geometric_intersection(slope(1, 1), slope(1, 1)), 0);
    }

    #[test]
    fn square_two_two() {
        let spec = WeaveSpec::square(CrossingSequence::new(2, 2).unwrap());
        let pc = pairwise_crossing_number(&spec, 0, 1).unwrap();
        assert_eq!((pc.v, pc.zeta_i, pc.zeta_j, pc.c), (1, 4, 4, 4));
    }

    #[test]
    fn kagome_plain() {
        let s = CrossingSequence::new(1, 1).unwrap();
        let spec = WeaveSpec::kagome(s, s, s);
        for (i, j) in spec.pairs() {
            let pc = pairwise_crossing_number(&spec, i, j).unwrap();
            assert_eq!((pc.v, pc.zeta_i, pc.zeta_j, pc.c), (1, 2, 2, 2));
        }
    }

    #[test]
    fn parallel_pair_is_zero() {
        let spec = WeaveSpec::new(
            vec![slope(1, 0), slope(1, 0)],
            [((0, 1), CrossingSequence::ALWAYS_OVER)],
        );
        let pc = pairwise_crossing_number(&spec, 0, 1).unwrap();
        assert_eq!((pc.v, pc.c), (0, 0));
        assert!(!pc.is_crossing());
    }

    #[test]
    fn bad_indices() {
        let spec = WeaveSpec::square(CrossingSequence::new(1, 1).unwrap());
        assert!(pairwise_crossing_number(&spec, 0, 2).is_err());
        assert!(pairwise_crossing_number(&spec, 1, 1).is_err());
    }
}
