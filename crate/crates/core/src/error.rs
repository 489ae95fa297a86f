//! Error type shared across the crate.
//!
//! Data problems carry enough context (source name, line-numbered issues,
//! record ids) to be actionable without a debugger. [`Error::Internal`] is
//! reserved for violated invariants that indicate a bug in this crate, not
//! in the caller's data; the CLI maps it to a distinct exit code.

use crate::framing::TaskId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// Malformed file or dataset. Loading is total over its error set: every
    /// bad line or record contributes one issue here, none are dropped.
    #[error("invalid data in {source_name}: {}", render_issues(.issues))]
    InvalidData {
        source_name: String,
        issues: Vec<String>,
    },

    #[error("token/tag length mismatch: {tokens} tokens vs {tags} tags")]
    TagLengthMismatch { tokens: usize, tags: usize },

    #[error("malformed IOB tag {tag:?} at token {index}")]
    BadTag { index: usize, tag: String },

    #[error("invalid split ratios: {detail}")]
    InvalidRatios { detail: String },

    #[error("class {label:?} has {count} records; stratified splitting needs at least 3")]
    ClassTooSmall { label: String, count: usize },

    #[error("dataset {dataset:?} is test-only and must not be re-split")]
    TestOnlySplit { dataset: String },

    #[error("record {id:?} has no label; classification framing requires one")]
    UnlabeledRecord { id: String },

    #[error("task {task} is not supported by dataset {dataset:?}")]
    TaskNotSupported { task: TaskId, dataset: String },

    #[error("no task has a dataset with training examples")]
    NoTasks,

    #[error("{key:?} contributes zero examples to {what}")]
    ZeroCount { what: &'static str, key: String },

    #[error("temperature must be positive, got {temperature}")]
    NonPositiveTemperature { temperature: f64 },

    #[error("invalid mixer config: {detail}")]
    InvalidConfig { detail: String },

    #[error("mixture weights do not match the provided datasets: {detail}")]
    WeightsMismatch { detail: String },

    #[error("gold standard is empty")]
    EmptyGold,

    #[error("prediction {id:?} does not match any gold record")]
    UnknownPredictionId { id: String },

    #[error("duplicate prediction for record {id:?}, task {task}")]
    DuplicatePrediction { id: String, task: TaskId },

    #[error("text has no words; readability is undefined")]
    NoWords,

    #[error("invalid argument: {detail}")]
    InvalidArgument { detail: String },

    #[error("internal invariant violated: {detail}")]
    Internal { detail: String },
}

impl Error {
    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    pub fn internal(detail: impl Into<String>) -> Self {
        Error::Internal {
            detail: detail.into(),
        }
    }

    /// True for errors that indicate a bug in this crate rather than bad
    /// input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Internal { .. })
    }
}

fn render_issues(issues: &[String]) -> String {
    const SHOWN: usize = 8;
    let mut out = format!("{} issue(s)", issues.len());
    for issue in issues.iter().take(SHOWN) {
        out.push_str("\n  - ");
        out.push_str(issue);
    }
    if issues.len() > SHOWN {
        out.push_str(&format!("\n  ... and {} more", issues.len() - SHOWN));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invalid_data_lists_issues() {
        let err = Error::InvalidData {
            source_name: "cadec.tsv".into(),
            issues: vec!["line 3: expected 4 columns, found 2".into()],
        };
        let text = err.to_string();
        assert!(text.contains("cadec.tsv"));
        assert!(text.contains("line 3"));
    }

    #[test]
    fn issue_list_is_truncated() {
        let issues: Vec<String> = (1..=20).map(|n| format!("line {n}: bad")).collect();
        let err = Error::InvalidData {
            source_name: "x".into(),
            issues,
        };
        let text = err.to_string();
        assert!(text.contains("20 issue(s)"));
        assert!(text.contains("and 12 more"));
        assert!(!text.contains("line 9:"));
    }
}
