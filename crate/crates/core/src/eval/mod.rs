//! Scoring model outputs against gold corpora.
//!
//! [`score_run`] takes a gold dataset, a task, and a prediction set and
//! produces one [`MetricReport`]: classification precision/recall/F1 for
//! the assertion task, strict and partial span F1 for extraction tasks.
//! [`correctness_vector`] reduces the same inputs to per-record booleans
//! for paired significance testing.
//!
//! Fallbacks are deliberate and tallied: a missing prediction scores as
//! the negative label (classification) or an empty output (extraction),
//! an unparseable label scores as negative, and a predicted span that
//! cannot be located in the record text is a false positive.

pub mod classification;
pub mod mcnemar;
pub mod readability;
pub mod span_match;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::corpus::{Dataset, Label};
use crate::error::{Error, Result};
use crate::framing::{
    ground_spans, parse_classification_output, parse_span_output, Grounding, ParsedLabel, TaskId,
};
use crate::predictions::PredictionSet;
use crate::Score;
use classification::{classification_prf, ClassificationReport};
use readability::{count_text, scores_from_counts, ReadabilityScores, TextCounts};
use span_match::{span_match, MatchCounts, MatchMode, MatchSpan};

/// How many gold records actually had predictions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coverage {
    pub expected: u64,
    pub received: u64,
    pub missing: u64,
}

/// Span scores for one matching mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtractionScore {
    pub counts: MatchCounts,
    pub precision: Score,
    pub recall: Score,
    pub f1: Score,
}

impl ExtractionScore {
    fn from_counts(counts: MatchCounts) -> ExtractionScore {
        let (precision, recall, f1) =
            classification::f1_from_counts(counts.tp, counts.fp, counts.fn_);
        ExtractionScore {
            counts,
            precision,
            recall,
            f1,
        }
    }
}

/// Everything one scoring run produces. Classification and extraction
/// fields are mutually exclusive; which side is filled follows the task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub task: TaskId,
    pub dataset: String,
    pub gold_records: u64,
    pub coverage: Coverage,
    /// Classification outputs matching neither target phrase.
    pub unparseable_outputs: u64,
    pub classification: Option<ClassificationReport>,
    pub strict: Option<ExtractionScore>,
    pub partial: Option<ExtractionScore>,
    /// Predicted spans absent from their record text; each is a false positive.
    pub unfindable_spans: u64,
    /// Readability of the parsed span outputs, when they contain any words.
    pub prediction_readability: Option<ReadabilityScores>,
    pub warnings: Vec<String>,
}

impl MetricReport {
    /// The headline metric: classification F1 or strict span F1.
    pub fn primary(&self) -> (&'static str, Score) {
        if let Some(report) = &self.classification {
            return ("f1", report.f1);
        }
        let strict = self
            .strict
            .as_ref()
            .expect("extraction report has strict scores");
        ("strict_f1", strict.f1)
    }
}

/// Rejects prediction/gold pairs that cannot be scored: unsupported task,
/// empty gold, or prediction ids outside the gold dataset.
fn check_alignment(dataset: &Dataset, task: TaskId, predictions: &PredictionSet) -> Result<()> {
    if !dataset.manifest().supports(task) {
        return Err(Error::TaskNotSupported {
            task,
            dataset: dataset.id().to_string(),
        });
    }
    if dataset.is_empty() {
        return Err(Error::EmptyGold);
    }
    if let Some(outputs) = predictions.task_outputs(task) {
        let gold_ids: BTreeSet<&str> = dataset.records().iter().map(|r| r.id.as_str()).collect();
        if let Some(id) = outputs.keys().find(|id| !gold_ids.contains(id.as_str())) {
            return Err(Error::UnknownPredictionId { id: id.clone() });
        }
    }
    Ok(())
}

fn default_label(raw: &str) -> (Label, bool) {
    match parse_classification_output(raw) {
        ParsedLabel::Positive => (Label::Positive, true),
        ParsedLabel::Negative => (Label::Negative, true),
        ParsedLabel::Unparseable => (Label::Negative, false),
    }
}

/// Parses one extraction output and grounds it in the record text.
/// Returns match candidates (None for unfindable pieces) and the pieces.
fn grounded_predictions(
    output: &str,
    text: &str,
    task: TaskId,
) -> (Vec<Option<MatchSpan>>, Vec<String>) {
    let kind = task.span_kind().expect("extraction task has a span kind");
    let pieces = parse_span_output(output);
    let candidates = ground_spans(&pieces, text)
        .into_iter()
        .map(|grounding| match grounding {
            Grounding::Found { start, end } => Some(MatchSpan::new(start, end, kind)),
            Grounding::Unfindable => None,
        })
        .collect();
    (candidates, pieces)
}

fn gold_match_spans(record: &crate::corpus::Record, task: TaskId) -> Vec<MatchSpan> {
    let kind = task.span_kind().expect("extraction task has a span kind");
    record
        .spans_of(kind)
        .map(|s| MatchSpan::new(s.start, s.end, kind))
        .collect()
}

/// Scores one prediction set against one gold dataset for one task.
///
/// Every gold record is scored. Records without a prediction fall back as
/// documented on the module and are counted in `coverage.missing`.
pub fn score_run(
    dataset: &Dataset,
    task: TaskId,
    predictions: &PredictionSet,
) -> Result<MetricReport> {
    check_alignment(dataset, task, predictions)?;
    let expected = dataset.len() as u64;
    let mut received = 0u64;
    let mut unparseable = 0u64;
    let mut unfindable = 0u64;
    let mut report = MetricReport {
        task,
        dataset: dataset.id().to_string(),
        gold_records: expected,
        coverage: Coverage {
            expected,
            received: 0,
            missing: 0,
        },
        unparseable_outputs: 0,
        classification: None,
        strict: None,
        partial: None,
        unfindable_spans: 0,
        prediction_readability: None,
        warnings: Vec::new(),
    };

    if task.span_kind().is_none() {
        let mut gold = BTreeMap::new();
        let mut predicted = BTreeMap::new();
        for record in dataset.records() {
            gold.insert(record.id.clone(), record.label);
            if let Some(output) = predictions.get(task, &record.id) {
                received += 1;
                let (label, parsed) = default_label(output);
                if !parsed {
                    unparseable += 1;
                }
                predicted.insert(record.id.clone(), label);
            }
        }
        report.classification = Some(classification_prf(&predicted, &gold)?);
    } else {
        let mut strict = MatchCounts::default();
        let mut partial = MatchCounts::default();
        let mut piece_counts = TextCounts::default();
        for record in dataset.records() {
            let output = match predictions.get(task, &record.id) {
                Some(output) => {
                    received += 1;
                    output
                }
                None => "",
            };
            let (candidates, pieces) = grounded_predictions(output, &record.text, task);
            unfindable += candidates.iter().filter(|c| c.is_none()).count() as u64;
            for piece in &pieces {
                piece_counts.add(&count_text(piece));
            }
            let gold = gold_match_spans(record, task);
            strict.add(&span_match(&candidates, &gold, MatchMode::Strict).counts);
            partial.add(&span_match(&candidates, &gold, MatchMode::Partial).counts);
        }
        report.strict = Some(ExtractionScore::from_counts(strict));
        report.partial = Some(ExtractionScore::from_counts(partial));
        report.prediction_readability = scores_from_counts(&piece_counts).ok();
    }

    let missing = expected - received;
    report.coverage = Coverage {
        expected,
        received,
        missing,
    };
    report.unparseable_outputs = unparseable;
    report.unfindable_spans = unfindable;
    if missing > 0 {
        let fallback = if task.span_kind().is_none() {
            "the negative label"
        } else {
            "an empty output"
        };
        report.warnings.push(format!(
            "{missing} of {expected} gold records had no prediction and were scored as {fallback}"
        ));
    }
    if unparseable > 0 {
        report.warnings.push(format!(
            "{unparseable} outputs matched neither target phrase and were scored as negative"
        ));
    }
    if unfindable > 0 {
        report.warnings.push(format!(
            "{unfindable} predicted spans were not found in their record text and count as false positives"
        ));
    }
    Ok(report)
}

/// Per-record correctness in dataset record order, for paired tests.
///
/// A classification record is correct when the defaulted predicted label
/// equals gold. An extraction record is correct only on an exact strict
/// match: every gold span recovered and no spurious prediction.
pub fn correctness_vector(
    dataset: &Dataset,
    task: TaskId,
    predictions: &PredictionSet,
) -> Result<Vec<bool>> {
    check_alignment(dataset, task, predictions)?;
    let mut out = Vec::with_capacity(dataset.len());
    for record in dataset.records() {
        let output = predictions.get(task, &record.id).unwrap_or("");
        let correct = if task.span_kind().is_none() {
            let (label, _) = default_label(output);
            label == record.label
        } else {
            let (candidates, _) = grounded_predictions(output, &record.text, task);
            let gold = gold_match_spans(record, task);
            let counts = span_match(&candidates, &gold, MatchMode::Strict).counts;
            counts.tp == gold.len() as u64 && counts.fp == 0
        };
        out.push(correct);
    }
    Ok(out)
}
