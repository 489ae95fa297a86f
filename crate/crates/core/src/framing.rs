//! Text-to-text task framing.
//!
//! Records become [`TaskInstance`]s: the input is the record text behind a
//! task prefix, the target is a plain string a generative model can emit.
//! Classification targets are fixed verbalizations; extraction targets join
//! span surfaces with `"; "`. Parsing inverts the target side, and
//! [`ground_spans`] maps parsed surface strings back to character offsets
//! so span outputs can be scored against gold offsets.

use serde::{Deserialize, Serialize};

use crate::corpus::{Dataset, Label, Record, SpanKind, Split};
use crate::error::{Error, Result};

/// Target string for a positive classification instance.
pub const POSITIVE_TARGET: &str = "adverse event problem";

/// Target string for a negative classification instance.
pub const NEGATIVE_TARGET: &str = "health ok";

/// Separator between span surfaces in an extraction target.
pub const SPAN_SEPARATOR: &str = "; ";

/// The tasks instances can be framed as.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskId {
    AssertAe,
    NerAe,
    NerDrug,
    NerDosage,
}

/// What a task asks the model to produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    Classification,
    SpanExtraction,
}

impl TaskId {
    pub const ALL: [TaskId; 4] = [
        TaskId::AssertAe,
        TaskId::NerAe,
        TaskId::NerDrug,
        TaskId::NerDosage,
    ];

    /// Prefix prepended to the record text, colon included.
    pub fn prefix(&self) -> &'static str {
        match self {
            TaskId::AssertAe => "assert ade:",
            TaskId::NerAe => "ner ade:",
            TaskId::NerDrug => "ner drug:",
            TaskId::NerDosage => "ner dosage:",
        }
    }

    pub fn kind(&self) -> TaskKind {
        match self {
            TaskId::AssertAe => TaskKind::Classification,
            _ => TaskKind::SpanExtraction,
        }
    }

    /// Span kind an extraction task targets; `None` for classification.
    pub fn span_kind(&self) -> Option<SpanKind> {
        match self {
            TaskId::AssertAe => None,
            TaskId::NerAe => Some(SpanKind::Ae),
            TaskId::NerDrug => Some(SpanKind::Drug),
            TaskId::NerDosage => Some(SpanKind::Dosage),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            TaskId::AssertAe => "assert_ae",
            TaskId::NerAe => "ner_ae",
            TaskId::NerDrug => "ner_drug",
            TaskId::NerDosage => "ner_dosage",
        }
    }
}

impl std::fmt::Display for TaskId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for TaskId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "assert_ae" => Ok(TaskId::AssertAe),
            "ner_ae" => Ok(TaskId::NerAe),
            "ner_drug" => Ok(TaskId::NerDrug),
            "ner_dosage" => Ok(TaskId::NerDosage),
            other => Err(Error::InvalidArgument {
                detail: format!("unknown task {other:?}"),
            }),
        }
    }
}

/// One text-to-text training or evaluation example.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskInstance {
    pub record_id: String,
    pub task: TaskId,
    pub dataset: String,
    pub input: String,
    pub target: String,
}

/// Frames one record as an instance of `task`.
///
/// Extraction targets join the record's task-kind spans in document order;
/// a record with no such spans gets an empty target. Semicolons inside a
/// surface are replaced with commas so the separator stays unambiguous.
pub fn render_instance(record: &Record, task: TaskId) -> Result<TaskInstance> {
    let target = match task.span_kind() {
        None => match record.label {
            Label::Positive => POSITIVE_TARGET.to_string(),
            Label::Negative => NEGATIVE_TARGET.to_string(),
            Label::Unlabeled => {
                return Err(Error::UnlabeledRecord {
                    id: record.id.clone(),
                })
            }
        },
        Some(kind) => record
            .spans_of(kind)
            .map(|s| s.surface.replace(';', ","))
            .collect::<Vec<_>>()
            .join(SPAN_SEPARATOR),
    };
    Ok(TaskInstance {
        record_id: record.id.clone(),
        task,
        dataset: record.dataset.clone(),
        input: format!("{} {}", task.prefix(), record.text),
        target,
    })
}

/// Frames every record of `dataset` (optionally restricted to one split)
/// as instances of `task`. Errors unless the dataset supports the task.
pub fn render_dataset(
    dataset: &Dataset,
    task: TaskId,
    split: Option<Split>,
) -> Result<Vec<TaskInstance>> {
    if !dataset.manifest().supports(task) {
        return Err(Error::TaskNotSupported {
            task,
            dataset: dataset.id().to_string(),
        });
    }
    dataset
        .records()
        .iter()
        .filter(|r| split.is_none() || r.split == split)
        .map(|r| render_instance(r, task))
        .collect()
}

/// Outcome of parsing a classification output string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParsedLabel {
    Positive,
    Negative,
    Unparseable,
}

/// Maps a raw model output to a label by exact match after trimming and
/// case-folding. Anything else is [`ParsedLabel::Unparseable`]; scorers
/// decide how to fall back.
pub fn parse_classification_output(raw: &str) -> ParsedLabel {
    let folded = raw.trim().to_lowercase();
    if folded == POSITIVE_TARGET {
        ParsedLabel::Positive
    } else if folded == NEGATIVE_TARGET {
        ParsedLabel::Negative
    } else {
        ParsedLabel::Unparseable
    }
}

/// Splits a span output on `;`, trims each piece, drops empties, and
/// deduplicates keeping first occurrences. Any string parses; an output
/// with no usable pieces is simply empty.
pub fn parse_span_output(raw: &str) -> Vec<String> {
    let mut pieces: Vec<String> = Vec::new();
    for piece in raw.split(';') {
        let piece = piece.trim();
        if piece.is_empty() || pieces.iter().any(|p| p == piece) {
            continue;
        }
        pieces.push(piece.to_string());
    }
    pieces
}

/// Where a parsed surface string landed in the source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "grounding")]
pub enum Grounding {
    Found { start: usize, end: usize },
    Unfindable,
}

/// Locates each piece in `text` by case-insensitive substring search over
/// characters. Pieces are processed in order; each search starts one past
/// the previous found match's start, so repeated surfaces ground to
/// successive occurrences. Pieces that never occur are [`Grounding::Unfindable`].
///
/// Case folding is per character (first lowercase mapping), which keeps
/// offsets aligned with the original text.
pub fn ground_spans(pieces: &[String], text: &str) -> Vec<Grounding> {
    let haystack = fold_chars(text);
    let mut from = 0usize;
    pieces
        .iter()
        .map(|piece| {
            let needle = fold_chars(piece);
            if needle.is_empty() {
                return Grounding::Unfindable;
            }
            match find_from(&haystack, &needle, from) {
                Some(start) => {
                    from = start + 1;
                    Grounding::Found {
                        start,
                        end: start + needle.len(),
                    }
                }
                None => Grounding::Unfindable,
            }
        })
        .collect()
}

fn fold_chars(s: &str) -> Vec<char> {
    s.chars()
        .map(|c| c.to_lowercase().next().unwrap_or(c))
        .collect()
}

fn find_from(haystack: &[char], needle: &[char], from: usize) -> Option<usize> {
    if needle.len() > haystack.len() {
        return None;
    }
    (from..=haystack.len() - needle.len()).find(|&i| haystack[i..i + needle.len()] == *needle)
}
