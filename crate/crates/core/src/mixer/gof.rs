//! Chi-square goodness-of-fit helper for schedule sanity checks.
//!
//! Sampling tests compare drawn frequencies against the configured
//! distribution; the critical values are pinned so the check needs no
//! stats dependency at runtime.

use crate::error::{Error, Result};
use crate::scalar::{from_count, Real};
use crate::Score;

/// Upper critical values of the chi-square distribution at significance
/// 0.01 for 1 through 30 degrees of freedom.
pub const CHI_SQUARE_CRITICAL_001: [Score; 30] = [
    6.634897, 9.210340, 11.344867, 13.276704, 15.086272, 16.811894, 18.475307, 20.090235,
    21.665994, 23.209251, 24.724970, 26.216967, 27.688250, 29.141238, 30.577914, 31.999927,
    33.408664, 34.805306, 36.190869, 37.566235, 38.932173, 40.289360, 41.638398, 42.979820,
    44.314105, 45.641683, 46.962942, 48.278236, 49.587884, 50.892181,
];

/// Critical value at significance 0.01, if the table covers `dof`.
pub fn chi_square_critical_001(dof: usize) -> Option<Score> {
    (1..=CHI_SQUARE_CRITICAL_001.len())
        .contains(&dof)
        .then(|| CHI_SQUARE_CRITICAL_001[dof - 1])
}

/// Pearson statistic `Σ (o_i - n p_i)^2 / (n p_i)` for observed counts
/// against a reference distribution.
pub fn chi_square_statistic<F: Real>(observed: &[u64], probabilities: &[F]) -> Result<F> {
    if observed.is_empty() || observed.len() != probabilities.len() {
        return Err(Error::InvalidArgument {
            detail: format!(
                "observed ({}) and probabilities ({}) must be equal-length and non-empty",
                observed.len(),
                probabilities.len()
            ),
        });
    }
    let sum: F = probabilities.iter().copied().sum();
    if probabilities.iter().any(|p| *p <= F::zero())
        || (sum - F::one()).abs() > F::from_f64(1e-9).unwrap()
    {
        return Err(Error::InvalidArgument {
            detail: "probabilities must be positive and sum to 1".to_string(),
        });
    }
    let total: u64 = observed.iter().sum();
    if total == 0 {
        return Err(Error::InvalidArgument {
            detail: "observed counts are all zero".to_string(),
        });
    }
    let n = from_count::<F>(total);
    Ok(observed
        .iter()
        .zip(probabilities)
        .map(|(&o, &p)| {
            let expected = n * p;
            let diff = from_count::<F>(o) - expected;
            diff * diff / expected
        })
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn statistic_matches_hand_computation() {
        // n = 100, expected [25, 75]: (5^2/25) + (5^2/75) = 4/3.
        let statistic: f64 = chi_square_statistic(&[30, 70], &[0.25, 0.75]).unwrap();
        assert_abs_diff_eq!(statistic, 4.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn exact_fit_scores_zero() {
        let statistic: f64 = chi_square_statistic(&[25, 75], &[0.25, 0.75]).unwrap();
        assert_abs_diff_eq!(statistic, 0.0);
    }

    #[test]
    fn critical_values_are_tabulated_and_increasing() {
        assert_abs_diff_eq!(chi_square_critical_001(1).unwrap(), 6.634897);
        assert_abs_diff_eq!(chi_square_critical_001(5).unwrap(), 15.086272);
        assert_abs_diff_eq!(chi_square_critical_001(30).unwrap(), 50.892181);
        assert!(chi_square_critical_001(0).is_none());
        assert!(chi_square_critical_001(31).is_none());
        for dof in 2..=30 {
            assert!(
                chi_square_critical_001(dof).unwrap() > chi_square_critical_001(dof - 1).unwrap()
            );
        }
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        assert!(chi_square_statistic::<f64>(&[], &[]).is_err());
        assert!(chi_square_statistic(&[1, 2], &[0.5f64]).is_err());
        assert!(chi_square_statistic(&[1, 2], &[0.7f64, 0.7]).is_err());
        assert!(chi_square_statistic(&[0, 0], &[0.5f64, 0.5]).is_err());
    }
}
