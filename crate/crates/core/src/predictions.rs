//! Model outputs awaiting scoring.
//!
//! Predictions travel as JSONL, one object per line with `id`, `task`, and
//! the raw `output` string. A [`PredictionSet`] indexes them by task and
//! record id so scoring can look up each gold record's output directly.

use std::collections::BTreeMap;
use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::corpus::formats::is_header_line;
use crate::error::{Error, Result};
use crate::framing::TaskId;

/// One raw model output for one record under one task.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prediction {
    pub id: String,
    pub task: TaskId,
    pub output: String,
}

/// Predictions indexed by task, then record id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PredictionSet {
    by_task: BTreeMap<TaskId, BTreeMap<String, String>>,
}

impl PredictionSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds one prediction. A second output for the same (task, id) pair is
    /// ambiguous, so it is rejected rather than silently overwritten.
    pub fn insert(&mut self, prediction: Prediction) -> Result<()> {
        let Prediction { id, task, output } = prediction;
        let per_task = self.by_task.entry(task).or_default();
        if per_task.contains_key(&id) {
            return Err(Error::DuplicatePrediction { id, task });
        }
        per_task.insert(id, output);
        Ok(())
    }

    pub fn from_predictions<I>(predictions: I) -> Result<Self>
    where
        I: IntoIterator<Item = Prediction>,
    {
        let mut set = Self::new();
        for prediction in predictions {
            set.insert(prediction)?;
        }
        Ok(set)
    }

    pub fn get(&self, task: TaskId, id: &str) -> Option<&str> {
        self.by_task.get(&task)?.get(id).map(String::as_str)
    }

    /// Outputs recorded for one task, in record-id order.
    pub fn task_outputs(&self, task: TaskId) -> Option<&BTreeMap<String, String>> {
        self.by_task.get(&task)
    }

    pub fn tasks(&self) -> impl Iterator<Item = TaskId> + '_ {
        self.by_task.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.by_task.values().map(BTreeMap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.by_task.values().all(BTreeMap::is_empty)
    }

    pub fn iter(&self) -> impl Iterator<Item = Prediction> + '_ {
        self.by_task.iter().flat_map(|(&task, outputs)| {
            outputs.iter().map(move |(id, output)| Prediction {
                id: id.clone(),
                task,
                output: output.clone(),
            })
        })
    }

    /// Reads prediction JSONL. A tool header on the first line is skipped;
    /// blank lines are ignored. All malformed lines are reported together.
    pub fn read_jsonl<R: BufRead>(reader: R, source_name: &str) -> Result<Self> {
        let mut set = Self::new();
        let mut issues = Vec::new();
        for (index, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::io(source_name, e))?;
            let trimmed = line.trim();
            if trimmed.is_empty() || (index == 0 && is_header_line(trimmed)) {
                continue;
            }
            match serde_json::from_str::<Prediction>(trimmed) {
                Ok(prediction) => {
                    if let Err(err) = set.insert(prediction) {
                        issues.push(format!("line {}: {err}", index + 1));
                    }
                }
                Err(err) => issues.push(format!("line {}: {err}", index + 1)),
            }
        }
        if issues.is_empty() {
            Ok(set)
        } else {
            Err(Error::InvalidData {
                source_name: source_name.to_string(),
                issues,
            })
        }
    }

    /// Writes predictions as JSONL in (task, id) order.
    pub fn write_jsonl<W: Write>(&self, mut writer: W) -> io::Result<()> {
        for prediction in self.iter() {
            let line = serde_json::to_string(&prediction).expect("prediction serializes");
            writeln!(writer, "{line}")?;
        }
        Ok(())
    }
}
