//! Model stand-ins that exercise the pipeline without a trained model.
//!
//! Echo emits each instance's gold target, so scoring its output checks
//! the render/parse/score loop end to end. Majority always answers
//! "health ok" (classification) or nothing (extraction). NoisyEcho
//! corrupts the echo independently per instance with a fixed probability,
//! giving predictable metric curves for sanity checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::framing::{
    parse_span_output, TaskInstance, NEGATIVE_TARGET, POSITIVE_TARGET, SPAN_SEPARATOR,
};
use crate::predictions::{Prediction, PredictionSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleKind {
    Echo,
    Majority,
    NoisyEcho,
}

impl OracleKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            OracleKind::Echo => "echo",
            OracleKind::Majority => "majority",
            OracleKind::NoisyEcho => "noisy_echo",
        }
    }
}

impl std::fmt::Display for OracleKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for OracleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<OracleKind> {
        match s.to_lowercase().as_str() {
            "echo" => Ok(OracleKind::Echo),
            "majority" => Ok(OracleKind::Majority),
            "noisy_echo" | "noisy-echo" => Ok(OracleKind::NoisyEcho),
            other => Err(Error::InvalidArgument {
                detail: format!("unknown oracle kind {other:?}"),
            }),
        }
    }
}

/// Which oracle to run and, for NoisyEcho, how often and under which seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleSpec {
    pub kind: OracleKind,
    pub corruption_rate: f64,
    pub seed: u64,
}

impl OracleSpec {
    pub fn echo() -> OracleSpec {
        OracleSpec {
            kind: OracleKind::Echo,
            corruption_rate: 0.0,
            seed: 0,
        }
    }

    pub fn majority() -> OracleSpec {
        OracleSpec {
            kind: OracleKind::Majority,
            corruption_rate: 0.0,
            seed: 0,
        }
    }

    pub fn noisy_echo(corruption_rate: f64, seed: u64) -> OracleSpec {
        OracleSpec {
            kind: OracleKind::NoisyEcho,
            corruption_rate,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.corruption_rate) {
            return Err(Error::InvalidConfig {
                detail: format!("corruption rate {} is outside [0, 1]", self.corruption_rate),
            });
        }
        Ok(())
    }
}

/// One corruption step: flip a classification target, or delete one whole
/// span from an extraction target. A spanless target has nothing to delete
/// and passes through unchanged.
fn corrupted(instance: &TaskInstance, rng: &mut ChaCha20Rng) -> String {
    match instance.task.span_kind() {
        None => {
            if instance.target == POSITIVE_TARGET {
                NEGATIVE_TARGET.to_string()
            } else {
                POSITIVE_TARGET.to_string()
            }
        }
        Some(_) => {
            let mut pieces = parse_span_output(&instance.target);
            if pieces.is_empty() {
                return instance.target.clone();
            }
            pieces.remove(rng.gen_range(0..pieces.len()));
            pieces.join(SPAN_SEPARATOR)
        }
    }
}

/// Runs the oracle over rendered instances.
///
/// NoisyEcho decides per instance on its own seed substream (stream =
/// instance index), so outputs are independent of list length and stable
/// under parallel evaluation. Instances must be unique per (task, record
/// id); a repeat is rejected as a duplicate prediction.
pub fn run_oracle(spec: &OracleSpec, instances: &[TaskInstance]) -> Result<PredictionSet> {
    spec.validate()?;
    let mut set = PredictionSet::new();
    for (index, instance) in instances.iter().enumerate() {
        let output = match spec.kind {
            OracleKind::Echo => instance.target.clone(),
            OracleKind::Majority => match instance.task.span_kind() {
                None => NEGATIVE_TARGET.to_string(),
                Some(_) => String::new(),
            },
            OracleKind::NoisyEcho => {
                let mut rng = ChaCha20Rng::seed_from_u64(spec.seed);
                rng.set_stream(index as u64);
                if rng.gen::<f64>() < spec.corruption_rate {
                    corrupted(instance, &mut rng)
                } else {
                    instance.target.clone()
                }
            }
        };
        set.insert(Prediction {
            id: instance.record_id.clone(),
            task: instance.task,
            output,
        })?;
    }
    Ok(set)
}
