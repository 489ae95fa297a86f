//! Record model, dataset container, and corpus operations.
//!
//! Every input format normalizes into [`Record`]: raw text, an optional
//! classification label, and character-offset entity spans. A [`Dataset`]
//! owns validated records plus a [`DatasetManifest`] derived from them;
//! the manifest is the only thing downstream stages (mixing, scoring) need
//! to decide which tasks a dataset supports and how much training data it
//! contributes.
//!
//! Offsets are character positions (not bytes), `end` exclusive, measured
//! on the record text exactly as stored.

pub mod formats;
pub mod iob;
pub mod split;
pub mod stats;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::framing::TaskId;

/// Entity kind a span can carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpanKind {
    Ae,
    Drug,
    Dosage,
}

impl SpanKind {
    pub const ALL: [SpanKind; 3] = [SpanKind::Ae, SpanKind::Drug, SpanKind::Dosage];

    pub fn as_str(&self) -> &'static str {
        match self {
            SpanKind::Ae => "ae",
            SpanKind::Drug => "drug",
            SpanKind::Dosage => "dosage",
        }
    }
}

impl fmt::Display for SpanKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for SpanKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ae" => Ok(SpanKind::Ae),
            "drug" => Ok(SpanKind::Drug),
            "dosage" => Ok(SpanKind::Dosage),
            other => Err(Error::InvalidArgument {
                detail: format!("unknown span kind {other:?}"),
            }),
        }
    }
}

/// Entity mention with character offsets into the record text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Span {
    pub kind: SpanKind,
    pub start: usize,
    pub end: usize,
    pub surface: String,
}

impl Span {
    pub fn new(kind: SpanKind, start: usize, end: usize, surface: impl Into<String>) -> Self {
        Span {
            kind,
            start,
            end,
            surface: surface.into(),
        }
    }
}

/// Document-level classification label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Positive,
    Negative,
    Unlabeled,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Positive => "positive",
            Label::Negative => "negative",
            Label::Unlabeled => "unlabeled",
        })
    }
}

/// Split bucket a record is assigned to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Validation,
    Test,
    TestOnly,
}

impl Split {
    pub fn as_str(&self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Validation => "validation",
            Split::Test => "test",
            Split::TestOnly => "test_only",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Split {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "train" => Ok(Split::Train),
            "validation" => Ok(Split::Validation),
            "test" => Ok(Split::Test),
            "test_only" | "test-only" => Ok(Split::TestOnly),
            other => Err(Error::InvalidArgument {
                detail: format!("unknown split {other:?}"),
            }),
        }
    }
}

/// One document: the unit every format normalizes into.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Record {
    pub id: String,
    pub text: String,
    #[serde(with = "label_option")]
    pub label: Label,
    pub spans: Vec<Span>,
    pub dataset: String,
    pub split: Option<Split>,
}

/// Serializes `Label::Unlabeled` as JSON `null` so the wire format stays
/// `"positive" | "negative" | null`.
mod label_option {
    use super::Label;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(label: &Label, serializer: S) -> Result<S::Ok, S::Error> {
        match label {
            Label::Positive => serializer.serialize_some("positive"),
            Label::Negative => serializer.serialize_some("negative"),
            Label::Unlabeled => serializer.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Label, D::Error> {
        match Option::<String>::deserialize(deserializer)?.as_deref() {
            None => Ok(Label::Unlabeled),
            Some("positive") => Ok(Label::Positive),
            Some("negative") => Ok(Label::Negative),
            Some(other) => Err(serde::de::Error::custom(format!(
                "label must be \"positive\", \"negative\", or null, got {other:?}"
            ))),
        }
    }
}

impl Record {
    /// Sorts spans by `(start, end)` and reports every invariant violation.
    /// Returns an empty list when the record is well formed.
    fn normalize_and_check(&mut self) -> Vec<String> {
        let mut issues = Vec::new();
        if self.id.is_empty() {
            issues.push("record has an empty id".to_string());
            return issues;
        }
        if self.text.trim().is_empty() {
            issues.push(format!("record {:?}: text is blank", self.id));
        }
        self.spans.sort_by_key(|s| (s.start, s.end, s.kind));
        let chars: Vec<char> = self.text.chars().collect();
        let mut seen: BTreeSet<(SpanKind, usize, usize)> = BTreeSet::new();
        for span in &self.spans {
            if span.start >= span.end {
                issues.push(format!(
                    "record {:?}: span {}..{} is empty or reversed",
                    self.id, span.start, span.end
                ));
                continue;
            }
            if span.end > chars.len() {
                issues.push(format!(
                    "record {:?}: span {}..{} exceeds text length {}",
                    self.id,
                    span.start,
                    span.end,
                    chars.len()
                ));
                continue;
            }
            let actual: String = chars[span.start..span.end].iter().collect();
            if actual != span.surface {
                issues.push(format!(
                    "record {:?}: span surface {:?} does not match text slice {:?}",
                    self.id, span.surface, actual
                ));
            }
            if !seen.insert((span.kind, span.start, span.end)) {
                issues.push(format!(
                    "record {:?}: duplicate {} span {}..{}",
                    self.id, span.kind, span.start, span.end
                ));
            }
        }
        issues
    }

    /// True when the record belongs to the training pool for `task`:
    /// assigned to the train split and carrying what the task consumes
    /// (a label for classification, at least one span of the task's kind
    /// for extraction).
    pub fn in_training_pool(&self, task: TaskId) -> bool {
        self.split == Some(Split::Train) && self.eligible_for(task)
    }

    /// True when the record can be framed as an instance of `task`.
    pub fn eligible_for(&self, task: TaskId) -> bool {
        match task.span_kind() {
            None => self.label != Label::Unlabeled,
            Some(kind) => self.spans.iter().any(|s| s.kind == kind),
        }
    }

    pub fn spans_of(&self, kind: SpanKind) -> impl Iterator<Item = &Span> {
        self.spans.iter().filter(move |s| s.kind == kind)
    }
}

/// Label tallies for one bucket of records.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCounts {
    pub total: u64,
    pub positive: u64,
    pub negative: u64,
}

impl ClassCounts {
    fn add(&mut self, label: Label) {
        self.total += 1;
        match label {
            Label::Positive => self.positive += 1,
            Label::Negative => self.negative += 1,
            Label::Unlabeled => {}
        }
    }

    pub fn unlabeled(&self) -> u64 {
        self.total - self.positive - self.negative
    }
}

/// Everything downstream stages need to know about a dataset without
/// touching its records.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub dataset: String,
    /// Tasks this dataset can contribute instances to.
    pub capabilities: BTreeSet<TaskId>,
    pub counts: ClassCounts,
    /// Per-split tallies; only assigned splits appear.
    pub splits: BTreeMap<Split, ClassCounts>,
    /// Training-pool size per supported task: train-split records that are
    /// eligible for the task. This is the count mixing weights are built on.
    pub train_sizes: BTreeMap<TaskId, u64>,
    /// True when the dataset exists only for held-out evaluation. Test-only
    /// datasets are never re-split and contribute nothing to mixtures.
    pub test_only: bool,
}

impl DatasetManifest {
    fn from_records(dataset: &str, records: &[Record]) -> DatasetManifest {
        let mut counts = ClassCounts::default();
        let mut splits: BTreeMap<Split, ClassCounts> = BTreeMap::new();
        let mut kinds: BTreeSet<SpanKind> = BTreeSet::new();
        for record in records {
            counts.add(record.label);
            if let Some(split) = record.split {
                splits.entry(split).or_default().add(record.label);
            }
            kinds.extend(record.spans.iter().map(|s| s.kind));
        }

        let mut capabilities = BTreeSet::new();
        let all_labeled = counts.unlabeled() == 0 && counts.total > 0;
        if all_labeled {
            capabilities.insert(TaskId::AssertAe);
        }
        for task in [TaskId::NerAe, TaskId::NerDrug, TaskId::NerDosage] {
            let kind = task.span_kind().expect("extraction task has a kind");
            if kinds.contains(&kind) {
                capabilities.insert(task);
            }
        }

        let train_sizes = capabilities
            .iter()
            .map(|&task| {
                let n = records.iter().filter(|r| r.in_training_pool(task)).count() as u64;
                (task, n)
            })
            .collect();

        let assigned: Vec<Split> = splits.keys().copied().collect();
        let test_only = !records.is_empty()
            && !assigned.is_empty()
            && assigned.iter().all(|s| *s == Split::TestOnly);

        DatasetManifest {
            dataset: dataset.to_string(),
            capabilities,
            counts,
            splits,
            train_sizes,
            test_only,
        }
    }

    pub fn supports(&self, task: TaskId) -> bool {
        self.capabilities.contains(&task)
    }

    pub fn train_size(&self, task: TaskId) -> u64 {
        self.train_sizes.get(&task).copied().unwrap_or(0)
    }
}

/// Validated records plus their derived manifest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    records: Vec<Record>,
    manifest: DatasetManifest,
}

impl Dataset {
    /// Builds a dataset, normalizing span order and checking every record.
    /// All violations are reported at once in [`Error::InvalidData`].
    pub fn new(id: impl Into<String>, mut records: Vec<Record>) -> Result<Dataset> {
        let id = id.into();
        let mut issues = Vec::new();
        if id.is_empty() {
            issues.push("dataset id is empty".to_string());
        }
        let mut seen_ids: BTreeSet<&str> = BTreeSet::new();
        for record in &mut records {
            issues.extend(record.normalize_and_check());
            if record.dataset != id {
                issues.push(format!(
                    "record {:?}: dataset field {:?} does not match {:?}",
                    record.id, record.dataset, id
                ));
            }
        }
        for record in &records {
            if !seen_ids.insert(&record.id) {
                issues.push(format!("duplicate record id {:?}", record.id));
            }
        }
        let mixed_test_only = records.iter().any(|r| r.split == Some(Split::TestOnly))
            && records
                .iter()
                .any(|r| r.split.is_some() && r.split != Some(Split::TestOnly));
        if mixed_test_only {
            issues.push("test_only records mixed with other split assignments".to_string());
        }
        if !issues.is_empty() {
            return Err(Error::InvalidData {
                source_name: id,
                issues,
            });
        }
        let manifest = DatasetManifest::from_records(&id, &records);
        Ok(Dataset { records, manifest })
    }

    pub fn id(&self) -> &str {
        &self.manifest.dataset
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn into_records(self) -> Vec<Record> {
        self.records
    }

    pub fn manifest(&self) -> &DatasetManifest {
        &self.manifest
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Records assigned to the train split and eligible for `task`, in
    /// stored order. Mixing draws from exactly this pool.
    pub fn training_pool(&self, task: TaskId) -> Vec<&Record> {
        self.records
            .iter()
            .filter(|r| r.in_training_pool(task))
            .collect()
    }

    /// Renames the dataset, rewriting each record's dataset field.
    pub fn renamed(self, id: impl Into<String>) -> Result<Dataset> {
        let id = id.into();
        let records = self
            .records
            .into_iter()
            .map(|mut r| {
                r.dataset = id.clone();
                r
            })
            .collect();
        Dataset::new(id, records)
    }

    /// Keeps only records assigned to `split`. The result may be empty.
    pub fn filter_split(&self, split: Split) -> Result<Dataset> {
        let records = self
            .records
            .iter()
            .filter(|r| r.split == Some(split))
            .cloned()
            .collect();
        Dataset::new(self.id(), records)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn record(id: &str, text: &str, label: Label, spans: Vec<Span>) -> Record {
        Record {
            id: id.to_string(),
            text: text.to_string(),
            label,
            spans,
            dataset: "demo".to_string(),
            split: None,
        }
    }

    #[test]
    fn canonical_json_shape_round_trips() {
        let r = Record {
            id: "r1".into(),
            text: "I took aspirin and got a bad headache".into(),
            label: Label::Positive,
            spans: vec![
                Span::new(SpanKind::Ae, 25, 37, "bad headache"),
                Span::new(SpanKind::Drug, 7, 14, "aspirin"),
            ],
            dataset: "demo".into(),
            split: Some(Split::Train),
        };
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"label\":\"positive\""));
        assert!(json.contains("\"kind\":\"ae\""));
        assert!(json.contains("\"split\":\"train\""));
        let back: Record = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn unlabeled_serializes_as_null() {
        let r = record("r1", "text here", Label::Unlabeled, vec![]);
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"label\":null"));
        let back: Record = serde_json::from_str(&json).unwrap();
        assert_eq!(back.label, Label::Unlabeled);
    }

    #[test]
    fn dataset_sorts_spans_and_builds_manifest() {
        let mut r = record(
            "r1",
            "I took aspirin and got a bad headache",
            Label::Positive,
            vec![
                Span::new(SpanKind::Ae, 25, 37, "bad headache"),
                Span::new(SpanKind::Drug, 7, 14, "aspirin"),
            ],
        );
        r.split = Some(Split::Train);
        let ds = Dataset::new(
            "demo",
            vec![r, {
                let mut n = record("r2", "feeling fine today", Label::Negative, vec![]);
                n.split = Some(Split::Train);
                n
            }],
        )
        .unwrap();
        assert_eq!(ds.records()[0].spans[0].surface, "aspirin");
        let m = ds.manifest();
        assert!(m.supports(TaskId::AssertAe));
        assert!(m.supports(TaskId::NerAe));
        assert!(m.supports(TaskId::NerDrug));
        assert!(!m.supports(TaskId::NerDosage));
        assert_eq!(m.counts.total, 2);
        assert_eq!(m.counts.positive, 1);
        assert_eq!(m.train_size(TaskId::AssertAe), 2);
        assert_eq!(m.train_size(TaskId::NerAe), 1);
        assert!(!m.test_only);
    }

    #[test]
    fn out_of_bounds_span_names_the_record() {
        let r = record(
            "bad-1",
            "short",
            Label::Negative,
            vec![Span::new(SpanKind::Ae, 2, 99, "oops")],
        );
        let err = Dataset::new("demo", vec![r]).unwrap_err();
        let text = err.to_string();
        assert!(text.contains("bad-1"), "{text}");
        assert!(text.contains("exceeds text length"), "{text}");
    }

    #[test]
    fn surface_mismatch_is_rejected() {
        let r = record(
            "r1",
            "I took aspirin",
            Label::Negative,
            vec![Span::new(SpanKind::Drug, 7, 14, "ibuprofen")],
        );
        let err = Dataset::new("demo", vec![r]).unwrap_err();
        assert!(err.to_string().contains("does not match"));
    }

    #[test]
    fn duplicate_ids_are_rejected_and_all_issues_reported() {
        let a = record("same", "one text", Label::Negative, vec![]);
        let b = record("same", "two text", Label::Negative, vec![]);
        let c = record("", "three", Label::Negative, vec![]);
        let err = Dataset::new("demo", vec![a, b, c]).unwrap_err();
        match err {
            Error::InvalidData { issues, .. } => {
                assert_eq!(issues.len(), 2, "{issues:?}");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn unlabeled_records_block_classification_capability() {
        let mut a = record("r1", "has ae mention", Label::Unlabeled, vec![]);
        a.spans = vec![Span::new(SpanKind::Ae, 4, 6, "ae")];
        let ds = Dataset::new("demo", vec![a]).unwrap();
        assert!(!ds.manifest().supports(TaskId::AssertAe));
        assert!(ds.manifest().supports(TaskId::NerAe));
    }

    #[test]
    fn test_only_flag_is_inferred_from_splits() {
        let mut a = record("r1", "held out", Label::Positive, vec![]);
        a.split = Some(Split::TestOnly);
        let ds = Dataset::new("demo", vec![a]).unwrap();
        assert!(ds.manifest().test_only);

        let mut b = record("r2", "train rec", Label::Negative, vec![]);
        b.split = Some(Split::Train);
        let mut c = record("r3", "held out", Label::Positive, vec![]);
        c.split = Some(Split::TestOnly);
        let err = Dataset::new("demo", vec![b, c]).unwrap_err();
        assert!(err.to_string().contains("test_only"));
    }

    #[test]
    fn split_counts_sum_to_totals_when_fully_assigned() {
        let mut records = Vec::new();
        for i in 0..10 {
            let mut r = record(
                &format!("r{i}"),
                "some text",
                if i < 3 {
                    Label::Positive
                } else {
                    Label::Negative
                },
                vec![],
            );
            r.split = Some(if i < 8 { Split::Train } else { Split::Test });
            records.push(r);
        }
        let ds = Dataset::new("demo", records).unwrap();
        let m = ds.manifest();
        let sum: u64 = m.splits.values().map(|c| c.total).sum();
        let pos: u64 = m.splits.values().map(|c| c.positive).sum();
        assert_eq!(sum, m.counts.total);
        assert_eq!(pos, m.counts.positive);
    }

    #[test]
    fn filter_split_recomputes_manifest() {
        let mut a = record("r1", "in train", Label::Positive, vec![]);
        a.split = Some(Split::Train);
        let mut b = record("r2", "in test", Label::Negative, vec![]);
        b.split = Some(Split::Test);
        let ds = Dataset::new("demo", vec![a, b]).unwrap();
        let test = ds.filter_split(Split::Test).unwrap();
        assert_eq!(test.len(), 1);
        assert_eq!(test.manifest().counts.negative, 1);
    }
}
