//! Deterministic schedule sampling.
//!
//! A schedule is a sequence of framed instances drawn with replacement:
//! task by θ, dataset by ρ conditional on the task, record uniformly from
//! that (task, dataset) training pool. All draws come from one seed
//! through fixed substreams (task = 0, dataset = 1, record = 2), so a
//! schedule is reproducible byte for byte and draw positions stay aligned
//! regardless of which branch earlier draws took.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::corpus::{Dataset, Record};
use crate::error::{Error, Result};
use crate::framing::{render_instance, TaskId, TaskInstance};
use crate::mixer::MixtureWeights;
use crate::Prob;

const TASK_STREAM: u64 = 0;
const DATASET_STREAM: u64 = 1;
const RECORD_STREAM: u64 = 2;

fn draw_key<'m, K: Ord>(rng: &mut impl Rng, distribution: &'m BTreeMap<K, Prob>) -> &'m K {
    let u: f64 = rng.gen();
    let mut cumulative = 0.0;
    let mut last = None;
    for (key, weight) in distribution {
        cumulative += weight;
        last = Some(key);
        if u < cumulative {
            return key;
        }
    }
    // Floating-point residue can leave u just above the final cumulative
    // sum; the draw belongs to the last bucket.
    last.expect("validated distributions are non-empty")
}

/// Draws `length` instances from `datasets` under `weights`.
///
/// The datasets must be the ones the weights were built from: every
/// (task, dataset) pool is checked against the recorded counts.
pub fn sample_schedule(
    datasets: &[Dataset],
    weights: &MixtureWeights,
    seed: u64,
    length: u64,
) -> Result<Vec<TaskInstance>> {
    weights.validate()?;

    let mut by_id: BTreeMap<&str, &Dataset> = BTreeMap::new();
    for dataset in datasets {
        if by_id.insert(dataset.id(), dataset).is_some() {
            return Err(Error::InvalidArgument {
                detail: format!("dataset {:?} provided twice", dataset.id()),
            });
        }
    }

    let mut pools: BTreeMap<(TaskId, &str), Vec<&Record>> = BTreeMap::new();
    for (&task, per_dataset) in &weights.dataset_counts {
        for (dataset_id, &expected) in per_dataset {
            let dataset = by_id
                .get(dataset_id.as_str())
                .ok_or_else(|| Error::WeightsMismatch {
                    detail: format!("dataset {dataset_id:?} not provided"),
                })?;
            let pool = dataset.training_pool(task);
            if pool.len() as u64 != expected {
                return Err(Error::WeightsMismatch {
                    detail: format!(
                        "training pool for ({task}, {dataset_id:?}) has {} records, weights expect {expected}",
                        pool.len()
                    ),
                });
            }
            pools.insert((task, dataset.id()), pool);
        }
    }

    let mut task_rng = ChaCha20Rng::seed_from_u64(seed);
    task_rng.set_stream(TASK_STREAM);
    let mut dataset_rng = ChaCha20Rng::seed_from_u64(seed);
    dataset_rng.set_stream(DATASET_STREAM);
    let mut record_rng = ChaCha20Rng::seed_from_u64(seed);
    record_rng.set_stream(RECORD_STREAM);

    let mut schedule = Vec::with_capacity(length as usize);
    for _ in 0..length {
        let task = *draw_key(&mut task_rng, &weights.theta);
        let dataset_id = draw_key(&mut dataset_rng, &weights.rho[&task]);
        let pool = &pools[&(task, dataset_id.as_str())];
        let record = pool[record_rng.gen_range(0..pool.len())];
        let instance = render_instance(record, task)
            .map_err(|e| Error::internal(format!("pooled record failed to render: {e}")))?;
        schedule.push(instance);
    }
    Ok(schedule)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mixer::gof::{chi_square_critical_001, chi_square_statistic};
    use crate::mixer::tests::{config, labeled_dataset, spanned_dataset};
    use crate::mixer::{build_weights, Balancing, MixStrategy};

    fn two_task_setup() -> (Vec<Dataset>, MixtureWeights) {
        // 100 classification records vs 300 extraction records: θ = {0.25, 0.75}.
        let classify = labeled_dataset("classify", 100);
        let extract = spanned_dataset("extract", 300);
        let weights = build_weights(
            &[classify.manifest().clone(), extract.manifest().clone()],
            &config(MixStrategy::ProportionalMixing, Balancing::TaskOnly),
        )
        .unwrap();
        (vec![classify, extract], weights)
    }

    #[test]
    fn schedules_are_deterministic_and_seed_sensitive() {
        let (datasets, weights) = two_task_setup();
        let a = sample_schedule(&datasets, &weights, 42, 500).unwrap();
        let b = sample_schedule(&datasets, &weights, 42, 500).unwrap();
        assert_eq!(a, b);
        let c = sample_schedule(&datasets, &weights, 43, 500).unwrap();
        assert_ne!(a, c);
        assert_eq!(a.len(), 500);
    }

    #[test]
    fn zero_length_schedules_are_empty() {
        let (datasets, weights) = two_task_setup();
        assert!(sample_schedule(&datasets, &weights, 1, 0)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn instances_come_from_declared_pools_with_correct_framing() {
        let (datasets, weights) = two_task_setup();
        let schedule = sample_schedule(&datasets, &weights, 9, 300).unwrap();
        for instance in &schedule {
            match instance.task {
                TaskId::AssertAe => {
                    assert_eq!(instance.dataset, "classify");
                    assert!(instance.input.starts_with("assert ade: "));
                    assert!(
                        instance.target == "adverse event problem"
                            || instance.target == "health ok"
                    );
                }
                TaskId::NerAe => {
                    assert_eq!(instance.dataset, "extract");
                    assert!(instance.input.starts_with("ner ade: "));
                    assert_eq!(instance.target, "dizziness");
                }
                other => panic!("unexpected task {other}"),
            }
        }
    }

    #[test]
    fn empirical_task_frequencies_match_theta() {
        let (datasets, weights) = two_task_setup();
        let n = 50_000u64;
        let schedule = sample_schedule(&datasets, &weights, 1234, n).unwrap();
        let classify_draws = schedule
            .iter()
            .filter(|i| i.task == TaskId::AssertAe)
            .count() as u64;
        let fraction = classify_draws as f64 / n as f64;
        assert!(
            (fraction - 0.25).abs() <= 0.01,
            "classification fraction {fraction}"
        );
        let statistic: f64 =
            chi_square_statistic(&[classify_draws, n - classify_draws], &[0.25f64, 0.75f64])
                .unwrap();
        assert!(
            statistic < chi_square_critical_001(1).unwrap(),
            "chi-square {statistic}"
        );
    }

    #[test]
    fn empirical_dataset_frequencies_match_rho() {
        // One task, two pools of 100 and 200: ρ = {1/3, 2/3}.
        let small = labeled_dataset("small", 100);
        let large = labeled_dataset("large", 200);
        let weights = build_weights(
            &[small.manifest().clone(), large.manifest().clone()],
            &config(MixStrategy::ProportionalMixing, Balancing::TaskOnly),
        )
        .unwrap();
        let n = 30_000u64;
        let schedule = sample_schedule(&[small, large], &weights, 77, n).unwrap();
        let small_draws = schedule.iter().filter(|i| i.dataset == "small").count() as u64;
        let fraction = small_draws as f64 / n as f64;
        assert!((fraction - 1.0 / 3.0).abs() <= 0.01, "{fraction}");
        let statistic: f64 =
            chi_square_statistic(&[small_draws, n - small_draws], &[1.0 / 3.0, 2.0 / 3.0]).unwrap();
        assert!(statistic < chi_square_critical_001(1).unwrap());
    }

    #[test]
    fn mismatched_datasets_are_rejected() {
        let (datasets, weights) = two_task_setup();

        let err = sample_schedule(&datasets[..1], &weights, 1, 10).unwrap_err();
        assert!(matches!(err, Error::WeightsMismatch { .. }));

        let shrunk = labeled_dataset("classify", 99);
        let err = sample_schedule(&[shrunk, datasets[1].clone()], &weights, 1, 10).unwrap_err();
        assert!(matches!(err, Error::WeightsMismatch { .. }));
    }
}
