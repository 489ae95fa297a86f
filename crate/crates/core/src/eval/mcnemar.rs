//! McNemar's test for paired system comparisons.
//!
//! Two systems scored on the same instances disagree in two directions:
//! `b` instances only system A got right, `c` instances only system B got
//! right. The continuity-corrected statistic `(|b - c| - 1)^2 / (b + c)`
//! is compared against fixed chi-square critical values (1 dof), so
//! significance reporting needs no stats dependency.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{from_count, Real};
use crate::Score;

/// Significance levels reported by the test, weakest to strongest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Significance {
    #[serde(rename = "p<0.05")]
    P05,
    #[serde(rename = "p<0.01")]
    P01,
    #[serde(rename = "p<0.001")]
    P001,
}

impl Significance {
    pub fn threshold(&self) -> Score {
        match self {
            Significance::P05 => 3.841,
            Significance::P01 => 6.635,
            Significance::P001 => 10.828,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Significance::P05 => "p<0.05",
            Significance::P01 => "p<0.01",
            Significance::P001 => "p<0.001",
        }
    }
}

/// Test outcome. `significance` is the strongest level whose threshold the
/// statistic exceeds, `None` when even p<0.05 is not reached.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McNemarResult {
    /// Instances system A got right and system B got wrong.
    pub b: u64,
    /// Instances system B got right and system A got wrong.
    pub c: u64,
    pub statistic: Score,
    pub significance: Option<Significance>,
}

/// Continuity-corrected McNemar statistic. Zero when the systems never
/// disagree: no evidence either way.
pub fn mcnemar_statistic<F: Real>(b: u64, c: u64) -> F {
    if b + c == 0 {
        return F::zero();
    }
    let diff = from_count::<F>(b.abs_diff(c)) - F::one();
    diff * diff / from_count::<F>(b + c)
}

fn significance_of(statistic: Score) -> Option<Significance> {
    [Significance::P001, Significance::P01, Significance::P05]
        .into_iter()
        .find(|level| statistic > level.threshold())
}

/// Runs the test on paired per-instance correctness vectors.
pub fn mcnemar(a_correct: &[bool], b_correct: &[bool]) -> Result<McNemarResult> {
    if a_correct.len() != b_correct.len() {
        return Err(Error::InvalidArgument {
            detail: format!(
                "correctness vectors differ in length: {} vs {}",
                a_correct.len(),
                b_correct.len()
            ),
        });
    }
    let mut b = 0u64;
    let mut c = 0u64;
    for (&a_ok, &b_ok) in a_correct.iter().zip(b_correct) {
        match (a_ok, b_ok) {
            (true, false) => b += 1,
            (false, true) => c += 1,
            _ => {}
        }
    }
    let statistic: Score = mcnemar_statistic(b, c);
    Ok(McNemarResult {
        b,
        c,
        statistic,
        significance: significance_of(statistic),
    })
}
