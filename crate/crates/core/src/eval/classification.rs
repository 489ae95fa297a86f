//! Binary classification metrics with the positive class as target.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::corpus::Label;
use crate::error::{Error, Result};
use crate::scalar::{from_count, Real};
use crate::Score;

/// Confusion counts for the positive class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationCounts {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
}

/// Precision, recall, and F1 from raw counts. Empty denominators score 0,
/// so a system that predicts nothing gets zeros rather than NaN.
pub fn f1_from_counts<F: Real>(tp: u64, fp: u64, fn_: u64) -> (F, F, F) {
    let zero = F::zero();
    let ratio = |num: u64, den: u64| {
        if den == 0 {
            zero
        } else {
            from_count::<F>(num) / from_count::<F>(den)
        }
    };
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fn_);
    let f1 = if precision + recall == zero {
        zero
    } else {
        F::from_f64(2.0).unwrap() * precision * recall / (precision + recall)
    };
    (precision, recall, f1)
}

/// Classification scores plus the counts and coverage they came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub precision: Score,
    pub recall: Score,
    pub f1: Score,
    pub counts: ClassificationCounts,
    /// Gold ids with no prediction; each was scored as Negative.
    pub missing_predictions: u64,
}

/// Scores predicted labels against gold labels.
///
/// Prediction ids must be a subset of gold ids; gold ids without a
/// prediction fall back to Negative and are tallied in
/// `missing_predictions`. Gold must be fully labeled and non-empty.
pub fn classification_prf(
    predictions: &BTreeMap<String, Label>,
    gold: &BTreeMap<String, Label>,
) -> Result<ClassificationReport> {
    if gold.is_empty() {
        return Err(Error::EmptyGold);
    }
    for (id, label) in gold {
        if *label == Label::Unlabeled {
            return Err(Error::InvalidArgument {
                detail: format!("gold record {id:?} is unlabeled"),
            });
        }
    }
    if let Some(id) = predictions.keys().find(|id| !gold.contains_key(*id)) {
        return Err(Error::UnknownPredictionId { id: id.clone() });
    }

    let mut counts = ClassificationCounts::default();
    let mut missing = 0u64;
    for (id, gold_label) in gold {
        let predicted = match predictions.get(id) {
            Some(label) => *label,
            None => {
                missing += 1;
                Label::Negative
            }
        };
        match (predicted == Label::Positive, *gold_label == Label::Positive) {
            (true, true) => counts.tp += 1,
            (true, false) => counts.fp += 1,
            (false, true) => counts.fn_ += 1,
            (false, false) => counts.tn += 1,
        }
    }
    let (precision, recall, f1) = f1_from_counts(counts.tp, counts.fp, counts.fn_);
    Ok(ClassificationReport {
        precision,
        recall,
        f1,
        counts,
        missing_predictions: missing,
    })
}
