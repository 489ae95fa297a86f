//! Seeded stratified splitting.
//!
//! Records are partitioned per label class so every split preserves class
//! ratios as closely as integer counts allow. Quotas come from
//! largest-remainder rounding; a post-pass guarantees each class keeps at
//! least one record per split whenever it has at least three records.
//!
//! Assignment is a pure function of `(seed, sorted record ids, ratios)`:
//! ids are sorted before the seeded shuffle, and each class draws from its
//! own RNG substream, so input order and other classes' sizes never
//! influence where a record lands.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::corpus::{Dataset, Label, Split};
use crate::error::{Error, Result};

/// Fractions for train/validation/test. Each must be positive and the
/// three must sum to 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitRatios {
    pub train: f64,
    pub validation: f64,
    pub test: f64,
}

impl SplitRatios {
    pub fn new(train: f64, validation: f64, test: f64) -> Result<SplitRatios> {
        let ratios = SplitRatios {
            train,
            validation,
            test,
        };
        ratios.validate()?;
        Ok(ratios)
    }

    pub fn validate(&self) -> Result<()> {
        let parts = [self.train, self.validation, self.test];
        if parts.iter().any(|r| !r.is_finite() || *r <= 0.0) {
            return Err(Error::InvalidRatios {
                detail: format!("all ratios must be positive, got {parts:?}"),
            });
        }
        let sum: f64 = parts.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidRatios {
                detail: format!("ratios must sum to 1, got {sum}"),
            });
        }
        Ok(())
    }

    fn as_array(&self) -> [f64; 3] {
        [self.train, self.validation, self.test]
    }
}

impl Default for SplitRatios {
    fn default() -> Self {
        SplitRatios {
            train: 0.8,
            validation: 0.1,
            test: 0.1,
        }
    }
}

/// Apportions `total` into integer buckets proportional to `ratios` using
/// largest-remainder rounding. Remainder ties break toward lower indices.
pub fn largest_remainder(total: usize, ratios: &[f64]) -> Vec<usize> {
    let mut counts: Vec<usize> = Vec::with_capacity(ratios.len());
    let mut remainders: Vec<(usize, f64)> = Vec::with_capacity(ratios.len());
    for (index, ratio) in ratios.iter().enumerate() {
        let exact = total as f64 * ratio;
        let floor = exact.floor();
        counts.push(floor as usize);
        remainders.push((index, exact - floor));
    }
    let assigned: usize = counts.iter().sum();
    remainders.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    for (index, _) in remainders.iter().take(total.saturating_sub(assigned)) {
        counts[*index] += 1;
    }
    counts
}

/// Largest-remainder quotas with a floor: every bucket gets at least one
/// element when `total >= ratios.len()`.
fn quotas_with_floor(total: usize, ratios: &[f64]) -> Vec<usize> {
    let mut counts = largest_remainder(total, ratios);
    if total < ratios.len() {
        return counts;
    }
    while counts.contains(&0) {
        let zero = counts.iter().position(|&c| c == 0).expect("checked above");
        let donor = counts
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
            .map(|(i, _)| i)
            .expect("non-empty");
        counts[donor] -= 1;
        counts[zero] += 1;
    }
    counts
}

const SPLIT_ORDER: [Split; 3] = [Split::Train, Split::Validation, Split::Test];

fn class_stream(label: Label) -> u64 {
    match label {
        Label::Positive => 0,
        Label::Negative => 1,
        Label::Unlabeled => 2,
    }
}

/// Assigns every record to train/validation/test, stratified by label.
///
/// Any existing assignments are replaced. Errors when the dataset is
/// test-only or some class has fewer than three records.
pub fn stratified_split(dataset: &Dataset, ratios: &SplitRatios, seed: u64) -> Result<Dataset> {
    ratios.validate()?;
    if dataset.manifest().test_only {
        return Err(Error::TestOnlySplit {
            dataset: dataset.id().to_string(),
        });
    }

    let mut classes: BTreeMap<Label, Vec<&str>> = BTreeMap::new();
    for record in dataset.records() {
        classes
            .entry(record.label)
            .or_default()
            .push(record.id.as_str());
    }

    let mut assignment: BTreeMap<&str, Split> = BTreeMap::new();
    for (label, mut ids) in classes {
        if ids.len() < 3 {
            return Err(Error::ClassTooSmall {
                label: label.to_string(),
                count: ids.len(),
            });
        }
        ids.sort_unstable();
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(class_stream(label));
        ids.shuffle(&mut rng);

        let quotas = quotas_with_floor(ids.len(), &ratios.as_array());
        let mut cursor = 0usize;
        for (split, quota) in SPLIT_ORDER.iter().zip(&quotas) {
            for id in &ids[cursor..cursor + quota] {
                assignment.insert(id, *split);
            }
            cursor += quota;
        }
    }

    let records = dataset
        .records()
        .iter()
        .cloned()
        .map(|mut record| {
            record.split = Some(assignment[record.id.as_str()]);
            record
        })
        .collect();
    Dataset::new(dataset.id(), records)
}
