//! Base diversity indices over a single [`CategoryDistribution`].
//!
//! All logarithms are natural. Empty categories contribute nothing to Shannon
//! entropy (`0 ln 0 = 0`).

use crate::distribution::{CategoryDistribution, DisparityMatrix, Provenance};
use crate::error::IndexError;

/// Shannon index `H' = -sum p_i ln p_i`.
pub fn shannon_index(dist: &CategoryDistribution) -> Result<f64, IndexError> {
    let p = dist.proportions()?;
    Ok(entropy(&p))
}

pub(crate) fn entropy(p: &[f64]) -> f64 {
    let h = p
        .iter()
        .filter(|&&x| x > 0.0)
        .fold(0.0, |acc, &x| acc - x * x.ln());
    // rounding can leave -1e-17 for a single certain category
    h.max(0.0)
}

/// Maximum Shannon index for `s` equally likely categories, `ln s`.
pub fn h_max(s: usize) -> Result<f64, IndexError> {
    if s == 0 {
        return Err(IndexError::ZeroRichness);
    }
    Ok((s as f64).ln())
}

/// Pielou evenness `J' = H' / ln(s_reference)`.
///
/// `s_reference` is the schema richness (2 for binary gender, 3 for sectors),
/// not necessarily the observed one. A single-category reference scores 0.
pub fn pielou_index(dist: &CategoryDistribution, s_reference: usize) -> Result<f64, IndexError> {
    let h = shannon_index(dist)?;
    let observed = dist.observed_richness();
    if s_reference < observed {
        return Err(IndexError::ReferenceBelowObserved {
            reference: s_reference,
            observed,
        });
    }
    let max = h_max(s_reference)?;
    if max == 0.0 {
        return Ok(0.0);
    }
    Ok((h / max).clamp(0.0, 1.0))
}

/// Simpson's dominance `D` with its complement `1 - D`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Simpson {
    pub dominance: f64,
    pub complement: f64,
}

/// Finite-sample Simpson index `D = sum n_i(n_i - 1) / (N(N - 1))`.
///
/// Requires integer counts and at least two individuals.
pub fn simpson_index(dist: &CategoryDistribution) -> Result<Simpson, IndexError> {
    if dist.provenance() != Provenance::Counts {
        return Err(IndexError::NonIntegerCounts);
    }
    let counts = dist.values();
    if counts.iter().any(|c| c.fract() != 0.0) {
        return Err(IndexError::NonIntegerCounts);
    }
    let total: f64 = counts.iter().sum();
    if total < 2.0 {
        return Err(IndexError::SimpsonTooSmall(total));
    }
    let same: f64 = counts.iter().map(|n| n * (n - 1.0)).sum();
    let dominance = same / (total * (total - 1.0));
    Ok(Simpson {
        dominance,
        complement: 1.0 - dominance,
    })
}

/// Rao-Stirling diversity `sum_{i != j} d_ij^alpha (p_i p_j)^beta`.
///
/// The sum runs over ordered pairs, so each unordered pair is counted twice.
pub fn rao_stirling(
    dist: &CategoryDistribution,
    disparity: &DisparityMatrix,
) -> Result<f64, IndexError> {
    if disparity.side() != dist.len() {
        return Err(IndexError::DimensionMismatch {
            matrix: disparity.side(),
            categories: dist.len(),
        });
    }
    let p = dist.proportions()?;
    let (alpha, beta) = (disparity.alpha(), disparity.beta());
    let mut total = 0.0;
    for (i, &pi) in p.iter().enumerate() {
        for (j, &pj) in p.iter().enumerate() {
            if i == j {
                continue;
            }
            let d = disparity.get(i, j);
            let prod = pi * pj;
            if d == 0.0 || prod == 0.0 {
                continue;
            }
            total += d.powf(alpha) * prod.powf(beta);
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn counts(c: &[u64]) -> CategoryDistribution {
        CategoryDistribution::from_counts(c.iter().enumerate().map(|(i, &n)| (format!("c{i}"), n)))
            .unwrap()
    }

    fn shares(p: &[f64]) -> CategoryDistribution {
        CategoryDistribution::from_percentages(
            p.iter().enumerate().map(|(i, &v)| (format!("c{i}"), v * 100.0)),
        )
        .unwrap()
    }

    #[test]
    fn shannon_examples() {
        assert_abs_diff_eq!(shannon_index(&counts(&[50, 50])).unwrap(), 0.693147, epsilon = 1e-6);
        assert_eq!(shannon_index(&counts(&[10])).unwrap(), 0.0);
        // hand evaluation: -(0.471 ln 0.471 + 0.529 ln 0.529)
        assert_abs_diff_eq!(shannon_index(&shares(&[0.471, 0.529])).unwrap(), 0.69146, epsilon = 1e-4);
    }

    #[test]
    fn shannon_empty_is_error() {
        assert_eq!(shannon_index(&counts(&[0, 0])), Err(IndexError::EmptyCommunity));
        let none = CategoryDistribution::from_counts(Vec::<(String, u64)>::new()).unwrap();
        assert_eq!(shannon_index(&none), Err(IndexError::EmptyCommunity));
    }

    #[test]
    fn h_max_examples() {
        assert_abs_diff_eq!(h_max(3).unwrap(), 1.098612, epsilon = 1e-6);
        assert_eq!(h_max(1).unwrap(), 0.0);
        assert_abs_diff_eq!(h_max(7).unwrap(), 1.945910, epsilon = 1e-6);
        assert_eq!(h_max(0), Err(IndexError::ZeroRichness));
    }

    #[test]
    fn pielou_examples() {
        assert_abs_diff_eq!(pielou_index(&counts(&[50, 50]), 2).unwrap(), 1.0, epsilon = 1e-12);
        // -(0.429 ln 0.429 + 0.571 ln 0.571) / ln 2, evaluated independently
        assert_abs_diff_eq!(pielou_index(&shares(&[0.429, 0.571]), 2).unwrap(), 0.985405, epsilon = 1e-6);
        assert_eq!(pielou_index(&counts(&[7, 0]), 2).unwrap(), 0.0);
        assert_eq!(pielou_index(&counts(&[7]), 1).unwrap(), 0.0);
    }

    #[test]
    fn pielou_reference_below_observed() {
        let err = pielou_index(&counts(&[1, 1, 1]), 2).unwrap_err();
        assert_eq!(err, IndexError::ReferenceBelowObserved { reference: 2, observed: 3 });
    }

    #[test]
    fn simpson_examples() {
        let s = simpson_index(&counts(&[2, 3])).unwrap();
        assert_abs_diff_eq!(s.dominance, 0.4, epsilon = 1e-12);
        assert_abs_diff_eq!(s.complement, 0.6, epsilon = 1e-12);
        let s = simpson_index(&counts(&[5])).unwrap();
        assert_eq!((s.dominance, s.complement), (1.0, 0.0));
        let s = simpson_index(&counts(&[1, 1])).unwrap();
        assert_eq!((s.dominance, s.complement), (0.0, 1.0));
    }

    #[test]
    fn simpson_errors() {
        assert_eq!(simpson_index(&counts(&[1])), Err(IndexError::SimpsonTooSmall(1.0)));
        assert_eq!(simpson_index(&shares(&[0.5, 0.5])), Err(IndexError::NonIntegerCounts));
        let frac = CategoryDistribution::new(["a", "b"], [1.5, 2.0]).unwrap();
        assert_eq!(simpson_index(&frac), Err(IndexError::NonIntegerCounts));
    }

    /// Counts unordered same-category pairs by listing every pair of individuals.
    fn simpson_by_pairs(c: &[u64]) -> f64 {
        let people: Vec<usize> = c
            .iter()
            .enumerate()
            .flat_map(|(i, &n)| std::iter::repeat(i).take(n as usize))
            .collect();
        let (mut same, mut all) = (0u64, 0u64);
        for a in 0..people.len() {
            for b in a + 1..people.len() {
                all += 1;
                same += u64::from(people[a] == people[b]);
            }
        }
        same as f64 / all as f64
    }

    #[test]
    fn simpson_matches_pair_listing() {
        assert_eq!(simpson_by_pairs(&[2, 3]), 0.4);
        for c in [[1, 2, 3], [4, 0, 4], [0, 0, 2], [3, 3, 1]] {
            let d = simpson_index(&counts(&c)).unwrap().dominance;
            assert_abs_diff_eq!(d, simpson_by_pairs(&c), epsilon = 1e-12);
        }
    }

    #[test]
    fn rao_stirling_examples() {
        let m = DisparityMatrix::uniform(2, 1.0, 1.0);
        assert_abs_diff_eq!(rao_stirling(&shares(&[0.5, 0.5]), &m).unwrap(), 0.5, epsilon = 1e-12);
        let one = DisparityMatrix::uniform(1, 1.0, 1.0);
        assert_eq!(rao_stirling(&counts(&[4]), &one).unwrap(), 0.0);
        let zero = DisparityMatrix::new(vec![vec![0.0; 3]; 3], 2.0, 0.5).unwrap();
        assert_eq!(rao_stirling(&counts(&[1, 2, 3]), &zero).unwrap(), 0.0);
    }

    #[test]
    fn rao_stirling_dimension_mismatch() {
        let m = DisparityMatrix::uniform(3, 1.0, 1.0);
        assert_eq!(
            rao_stirling(&counts(&[1, 1]), &m),
            Err(IndexError::DimensionMismatch { matrix: 3, categories: 2 })
        );
    }

    #[test]
    fn rao_stirling_with_unit_disparity_is_gini_simpson() {
        // with d = 1 off-diagonal and alpha = beta = 1, the ordered sum is 1 - sum p_i^2
        let d = counts(&[1, 2, 5]);
        let p = d.proportions().unwrap();
        let gini = 1.0 - p.iter().map(|x| x * x).sum::<f64>();
        let m = DisparityMatrix::uniform(3, 1.0, 1.0);
        assert_abs_diff_eq!(rao_stirling(&d, &m).unwrap(), gini, epsilon = 1e-12);
    }
}
