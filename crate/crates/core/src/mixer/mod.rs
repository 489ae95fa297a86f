//! Multi-task mixture weights and schedule sampling.
//!
//! Training on several tasks and datasets at once needs two distributions:
//! task weights θ and, within each task, dataset weights ρ. Both come from
//! capped proportions: a pool of size `n` contributes `min(γ, n)`, so small
//! pools keep proportional presence while huge pools stop drowning out the
//! rest once they pass the cap γ (default 2^14 = 16384).
//!
//! Balancing modes differ only in ρ:
//!
//! * [`Balancing::TaskOnly`]: θ capped, ρ strictly proportional to pool
//!   sizes (equivalent to concatenating a task's datasets);
//! * [`Balancing::TaskAndDataset`]: θ capped, ρ capped as well.
//!
//! [`MixStrategy::TemperatureScaling`] additionally flattens distributions
//! by `w ↦ w^(1/T)` with renormalization (default T = 2). It always
//! applies to θ; it applies to ρ only under task-and-dataset balancing,
//! matching the idea that proportional ρ represents plain concatenation.

pub mod gof;
pub mod schedule;

pub use schedule::sample_schedule;

use std::collections::BTreeMap;
use std::fmt::Display;

use serde::{Deserialize, Serialize};

use crate::corpus::DatasetManifest;
use crate::error::{Error, Result};
use crate::framing::TaskId;
use crate::scalar::{from_count, real, Real};
use crate::Prob;

/// Default cap on the examples a single task or dataset contributes.
pub const DEFAULT_GAMMA: u64 = 1 << 14;

/// Default temperature for [`MixStrategy::TemperatureScaling`].
pub const DEFAULT_TEMPERATURE: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MixStrategy {
    ProportionalMixing,
    TemperatureScaling,
}

impl std::str::FromStr for MixStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "proportional-mixing" | "proportional" | "pm" => Ok(MixStrategy::ProportionalMixing),
            "temperature-scaling" | "temperature" | "ts" => Ok(MixStrategy::TemperatureScaling),
            other => Err(Error::InvalidArgument {
                detail: format!("unknown mix strategy {other:?}"),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Balancing {
    TaskOnly,
    TaskAndDataset,
}

impl std::str::FromStr for Balancing {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "task-only" | "task" | "tb" => Ok(Balancing::TaskOnly),
            "task-and-dataset" | "task-dataset" | "tdb" => Ok(Balancing::TaskAndDataset),
            other => Err(Error::InvalidArgument {
                detail: format!("unknown balancing mode {other:?}"),
            }),
        }
    }
}

/// Full mixing configuration. `seed` and `length` drive schedule sampling;
/// the rest shape the weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixerConfig {
    pub strategy: MixStrategy,
    pub balancing: Balancing,
    #[serde(default = "default_temperature")]
    pub temperature: f64,
    #[serde(default = "default_gamma")]
    pub gamma: u64,
    pub seed: u64,
    pub length: u64,
}

fn default_temperature() -> f64 {
    DEFAULT_TEMPERATURE
}

fn default_gamma() -> u64 {
    DEFAULT_GAMMA
}

impl MixerConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.temperature.is_finite() || self.temperature < 1.0 {
            return Err(Error::InvalidConfig {
                detail: format!("temperature must be >= 1, got {}", self.temperature),
            });
        }
        if self.gamma == 0 {
            return Err(Error::InvalidConfig {
                detail: "gamma must be >= 1".to_string(),
            });
        }
        Ok(())
    }
}

/// Normalized capped proportions: `min(cap, n_k) / Σ_j min(cap, n_j)`.
///
/// Every key must contribute at least one example; an empty map has no
/// distribution to build.
pub fn capped_proportions<F: Real, K: Ord + Clone + Display>(
    counts: &BTreeMap<K, u64>,
    cap: u64,
    what: &'static str,
) -> Result<BTreeMap<K, F>> {
    if counts.is_empty() {
        return Err(Error::NoTasks);
    }
    for (key, &count) in counts {
        if count == 0 {
            return Err(Error::ZeroCount {
                what,
                key: key.to_string(),
            });
        }
    }
    let capped: BTreeMap<&K, u64> = counts.iter().map(|(k, &n)| (k, n.min(cap))).collect();
    let total: u64 = capped.values().sum();
    let denominator = from_count::<F>(total);
    Ok(capped
        .into_iter()
        .map(|(k, n)| (k.clone(), from_count::<F>(n) / denominator))
        .collect())
}

/// Task weights θ over per-task training-pool totals.
pub fn task_weights<F: Real>(
    task_counts: &BTreeMap<TaskId, u64>,
    gamma: u64,
) -> Result<BTreeMap<TaskId, F>> {
    capped_proportions(task_counts, gamma, "task weights")
}

/// Dataset weights ρ (conditional on one task) over per-dataset pools.
pub fn dataset_weights<F: Real>(
    dataset_counts: &BTreeMap<String, u64>,
    gamma: u64,
) -> Result<BTreeMap<String, F>> {
    capped_proportions(dataset_counts, gamma, "dataset weights")
}

/// Flattens a distribution by `w ↦ w^(1/T)` and renormalizes.
///
/// `T = 1` returns the input bit for bit: callers rely on the no-op being
/// exact. Temperatures in `(0, 1)` sharpen instead of flatten and are
/// accepted; only `T <= 0` is rejected.
pub fn temperature_scale<F: Real, K: Ord + Clone>(
    weights: &BTreeMap<K, F>,
    temperature: F,
) -> Result<BTreeMap<K, F>> {
    if temperature <= F::zero() {
        return Err(Error::NonPositiveTemperature {
            temperature: temperature.to_f64().unwrap_or(f64::NAN),
        });
    }
    if temperature == F::one() {
        return Ok(weights.clone());
    }
    let exponent = F::one() / temperature;
    let powered: BTreeMap<K, F> = weights
        .iter()
        .map(|(k, w)| (k.clone(), w.powf(exponent)))
        .collect();
    let total: F = powered.values().copied().sum();
    Ok(powered.into_iter().map(|(k, w)| (k, w / total)).collect())
}

/// The two distributions plus everything they were derived from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureWeights {
    pub config: MixerConfig,
    /// Training-pool total per task (sum over contributing datasets).
    pub task_counts: BTreeMap<TaskId, u64>,
    /// Training-pool size per (task, dataset).
    pub dataset_counts: BTreeMap<TaskId, BTreeMap<String, u64>>,
    /// P(task).
    pub theta: BTreeMap<TaskId, Prob>,
    /// P(dataset | task); inner maps each sum to 1.
    pub rho: BTreeMap<TaskId, BTreeMap<String, Prob>>,
}

impl MixtureWeights {
    /// Checks the distribution invariants: matching key sets, entries in
    /// `(0, 1]`, sums within 1e-12 of 1.
    pub fn validate(&self) -> Result<()> {
        let bad = |detail: String| Err(Error::WeightsMismatch { detail });
        if self.theta.keys().ne(self.task_counts.keys())
            || self.rho.keys().ne(self.theta.keys())
            || self.dataset_counts.keys().ne(self.theta.keys())
        {
            return bad("task key sets disagree".to_string());
        }
        let check_sum = |values: Vec<Prob>, what: String| {
            if values.iter().any(|w| *w <= 0.0 || *w > 1.0) {
                return bad(format!("{what} has entries outside (0, 1]"));
            }
            let sum: Prob = values.iter().sum();
            if (sum - 1.0).abs() > 1e-12 {
                return bad(format!("{what} sums to {sum}, not 1"));
            }
            Ok(())
        };
        check_sum(self.theta.values().copied().collect(), "theta".to_string())?;
        for (task, datasets) in &self.rho {
            if datasets.keys().ne(self.dataset_counts[task].keys()) {
                return bad(format!("dataset key sets disagree for {task}"));
            }
            check_sum(datasets.values().copied().collect(), format!("rho[{task}]"))?;
        }
        Ok(())
    }
}

/// Builds θ and ρ from dataset manifests.
///
/// Test-only manifests contribute nothing. A dataset joins a task's pool
/// only with a positive train-split count; a task with no contributing
/// dataset is dropped, and if none remains the mix is an error.
pub fn build_weights(
    manifests: &[DatasetManifest],
    config: &MixerConfig,
) -> Result<MixtureWeights> {
    config.validate()?;

    let mut seen = std::collections::BTreeSet::new();
    for manifest in manifests {
        if !seen.insert(&manifest.dataset) {
            return Err(Error::InvalidArgument {
                detail: format!(
                    "dataset {:?} appears in more than one manifest",
                    manifest.dataset
                ),
            });
        }
    }

    let mut dataset_counts: BTreeMap<TaskId, BTreeMap<String, u64>> = BTreeMap::new();
    for manifest in manifests {
        if manifest.test_only {
            continue;
        }
        for &task in &manifest.capabilities {
            let size = manifest.train_size(task);
            if size > 0 {
                dataset_counts
                    .entry(task)
                    .or_default()
                    .insert(manifest.dataset.clone(), size);
            }
        }
    }
    if dataset_counts.is_empty() {
        return Err(Error::NoTasks);
    }

    let task_counts: BTreeMap<TaskId, u64> = dataset_counts
        .iter()
        .map(|(&task, per_dataset)| (task, per_dataset.values().sum()))
        .collect();

    let mut theta = task_weights::<Prob>(&task_counts, config.gamma)?;
    let mut rho: BTreeMap<TaskId, BTreeMap<String, Prob>> = BTreeMap::new();
    for (&task, per_dataset) in &dataset_counts {
        let weights = match config.balancing {
            Balancing::TaskOnly => {
                let total = from_count::<Prob>(task_counts[&task]);
                per_dataset
                    .iter()
                    .map(|(d, &m)| (d.clone(), from_count::<Prob>(m) / total))
                    .collect()
            }
            Balancing::TaskAndDataset => dataset_weights::<Prob>(per_dataset, config.gamma)?,
        };
        rho.insert(task, weights);
    }

    if config.strategy == MixStrategy::TemperatureScaling {
        let temperature = real::<Prob>(config.temperature);
        theta = temperature_scale(&theta, temperature)?;
        if config.balancing == Balancing::TaskAndDataset {
            for weights in rho.values_mut() {
                *weights = temperature_scale(weights, temperature)?;
            }
        }
    }

    let weights = MixtureWeights {
        config: config.clone(),
        task_counts,
        dataset_counts,
        theta,
        rho,
    };
    weights.validate()?;
    Ok(weights)
}
