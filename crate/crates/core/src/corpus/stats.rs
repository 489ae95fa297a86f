//! Per-dataset descriptive statistics.
//!
//! One [`StatsRow`] summarizes a dataset as a comparison-table row: size,
//! label balance, span-level averages, lexical variety, and a corpus-level
//! Flesch score. Fields that need spans a dataset does not
//! have are `None` and render as dashes.
//!
//! Conventions, fixed so rows are comparable across datasets:
//!
//! * words use the counting rules of [`crate::eval::readability`];
//! * span length and stopword counts are measured in words over AE spans;
//! * `avg_ae_spans_per_ae_record` divides by records with at least one AE
//!   span, not by all positives: labeled corpora mark positives without
//!   annotating spans;
//! * unique surface counts fold case and collapse internal whitespace;
//! * the Flesch score is computed from counts aggregated over all record
//!   texts, not averaged per record.

use std::collections::{BTreeSet, HashSet};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::corpus::{Dataset, SpanKind};
use crate::eval::readability::{count_text, scores_from_counts, TextCounts};
use crate::Score;

const STOPWORDS_RAW: &str = include_str!("data/stopwords.txt");

fn stopwords() -> &'static HashSet<&'static str> {
    static SET: OnceLock<HashSet<&'static str>> = OnceLock::new();
    SET.get_or_init(|| {
        STOPWORDS_RAW
            .lines()
            .map(str::trim)
            .filter(|w| !w.is_empty() && !w.starts_with('#'))
            .collect()
    })
}

/// Summary row for one dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsRow {
    pub dataset: String,
    pub records: u64,
    pub percent_positive: Score,
    pub avg_words_per_record: Score,
    pub avg_ae_span_words: Option<Score>,
    pub avg_stopwords_per_ae_span: Option<Score>,
    pub avg_ae_spans_per_ae_record: Option<Score>,
    pub unique_ae_surfaces: Option<u64>,
    pub unique_drug_surfaces: Option<u64>,
    pub flesch_reading_ease: Option<Score>,
}

fn fold_surface(surface: &str) -> String {
    surface
        .to_lowercase()
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
}

fn words_of(text: &str) -> Vec<String> {
    let mut words = Vec::new();
    let mut current = String::new();
    for c in text.chars() {
        if c.is_alphanumeric() {
            current.push(c);
        } else if !current.is_empty() {
            words.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        words.push(current);
    }
    words
}

/// Computes the summary row for one dataset.
pub fn dataset_stats(dataset: &Dataset) -> StatsRow {
    let records = dataset.records();
    let total = records.len() as u64;
    let positives = dataset.manifest().counts.positive;

    let mut text_counts = TextCounts::default();
    let mut word_total = 0u64;
    let mut ae_span_count = 0u64;
    let mut ae_span_words = 0u64;
    let mut ae_span_stopwords = 0u64;
    let mut ae_records = 0u64;
    let mut ae_surfaces: BTreeSet<String> = BTreeSet::new();
    let mut drug_surfaces: BTreeSet<String> = BTreeSet::new();

    for record in records {
        text_counts.add(&count_text(&record.text));
        word_total += words_of(&record.text).len() as u64;
        let mut has_ae = false;
        for span in &record.spans {
            match span.kind {
                SpanKind::Ae => {
                    has_ae = true;
                    ae_span_count += 1;
                    let words = words_of(&span.surface);
                    ae_span_words += words.len() as u64;
                    ae_span_stopwords += words
                        .iter()
                        .filter(|w| stopwords().contains(w.to_lowercase().as_str()))
                        .count() as u64;
                    ae_surfaces.insert(fold_surface(&span.surface));
                }
                SpanKind::Drug => {
                    drug_surfaces.insert(fold_surface(&span.surface));
                }
                SpanKind::Dosage => {}
            }
        }
        if has_ae {
            ae_records += 1;
        }
    }

    let ratio = |num: u64, den: u64| num as Score / den as Score;
    let has_labels = positives + dataset.manifest().counts.negative > 0;
    StatsRow {
        dataset: dataset.id().to_string(),
        records: total,
        percent_positive: if total > 0 && has_labels {
            100.0 * ratio(positives, total)
        } else {
            0.0
        },
        avg_words_per_record: if total > 0 {
            ratio(word_total, total)
        } else {
            0.0
        },
        avg_ae_span_words: (ae_span_count > 0).then(|| ratio(ae_span_words, ae_span_count)),
        avg_stopwords_per_ae_span: (ae_span_count > 0)
            .then(|| ratio(ae_span_stopwords, ae_span_count)),
        avg_ae_spans_per_ae_record: (ae_records > 0).then(|| ratio(ae_span_count, ae_records)),
        unique_ae_surfaces: (ae_span_count > 0).then_some(ae_surfaces.len() as u64),
        unique_drug_surfaces: (!drug_surfaces.is_empty()).then_some(drug_surfaces.len() as u64),
        flesch_reading_ease: scores_from_counts(&text_counts)
            .ok()
            .map(|s| s.flesch_reading_ease),
    }
}

impl StatsRow {
    /// Fields in presentation order with dash-capable rendering, used by
    /// the CLI table printer.
    pub fn cells(&self) -> Vec<(&'static str, String)> {
        fn opt(value: Option<Score>) -> String {
            value.map_or("-".to_string(), |v| format!("{v:.2}"))
        }
        fn opt_count(value: Option<u64>) -> String {
            value.map_or("-".to_string(), |v| v.to_string())
        }
        vec![
            ("dataset", self.dataset.clone()),
            ("records", self.records.to_string()),
            ("%positive", format!("{:.1}", self.percent_positive)),
            ("avg words", format!("{:.1}", self.avg_words_per_record)),
            ("ae span words", opt(self.avg_ae_span_words)),
            ("stopwords/span", opt(self.avg_stopwords_per_ae_span)),
            ("spans/ae record", opt(self.avg_ae_spans_per_ae_record)),
            ("unique ae", opt_count(self.unique_ae_surfaces)),
            ("unique drugs", opt_count(self.unique_drug_surfaces)),
            ("flesch", opt(self.flesch_reading_ease)),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Label, Record, Span};
    use approx::assert_abs_diff_eq;

    fn record(id: &str, text: &str, label: Label, spans: Vec<Span>) -> Record {
        Record {
            id: id.into(),
            text: text.into(),
            label,
            spans,
            dataset: "demo".into(),
            split: None,
        }
    }

    #[test]
    fn hand_checked_two_record_dataset() {
        let ds = Dataset::new(
            "demo",
            vec![
                record(
                    "r1",
                    "I took aspirin and got a bad headache",
                    Label::Positive,
                    vec![
                        Span::new(SpanKind::Drug, 7, 14, "aspirin"),
                        Span::new(SpanKind::Ae, 25, 37, "bad headache"),
                    ],
                ),
                record("r2", "feeling fine today", Label::Negative, vec![]),
            ],
        )
        .unwrap();
        let row = dataset_stats(&ds);
        assert_eq!(row.records, 2);
        assert_abs_diff_eq!(row.percent_positive, 50.0);
        assert_abs_diff_eq!(row.avg_words_per_record, 5.5);
        assert_abs_diff_eq!(row.avg_ae_span_words.unwrap(), 2.0);
        assert_abs_diff_eq!(row.avg_stopwords_per_ae_span.unwrap(), 0.0);
        assert_abs_diff_eq!(row.avg_ae_spans_per_ae_record.unwrap(), 1.0);
        assert_eq!(row.unique_ae_surfaces, Some(1));
        assert_eq!(row.unique_drug_surfaces, Some(1));
        // 11 words, 2 sentences, 16 syllables, aggregated before scoring.
        let expected = 206.835 - 1.015 * (11.0 / 2.0) - 84.6 * (16.0 / 11.0);
        assert_abs_diff_eq!(row.flesch_reading_ease.unwrap(), expected, epsilon = 1e-9);
    }

    #[test]
    fn surface_folding_collapses_case_and_whitespace() {
        let ds = Dataset::new(
            "demo",
            vec![
                record(
                    "r1",
                    "Bad Headache here",
                    Label::Positive,
                    vec![Span::new(SpanKind::Ae, 0, 12, "Bad Headache")],
                ),
                record(
                    "r2",
                    "bad  headache again",
                    Label::Positive,
                    vec![Span::new(SpanKind::Ae, 0, 13, "bad  headache")],
                ),
                record("r3", "all well", Label::Negative, vec![]),
            ],
        )
        .unwrap();
        let row = dataset_stats(&ds);
        assert_eq!(row.unique_ae_surfaces, Some(1));
    }

    #[test]
    fn stopwords_inside_spans_are_counted() {
        let ds = Dataset::new(
            "demo",
            vec![record(
                "r1",
                "pain in the chest area",
                Label::Positive,
                vec![Span::new(SpanKind::Ae, 0, 17, "pain in the chest")],
            )],
        )
        .unwrap();
        let row = dataset_stats(&ds);
        // "in" and "the" are stopwords; "pain" and "chest" are not.
        assert_abs_diff_eq!(row.avg_stopwords_per_ae_span.unwrap(), 2.0);
        assert_abs_diff_eq!(row.avg_ae_span_words.unwrap(), 4.0);
    }

    #[test]
    fn span_free_datasets_report_dashes() {
        let ds = Dataset::new(
            "demo",
            vec![
                record("r1", "plain positive text", Label::Positive, vec![]),
                record("r2", "plain negative text", Label::Negative, vec![]),
            ],
        )
        .unwrap();
        let row = dataset_stats(&ds);
        assert!(row.avg_ae_span_words.is_none());
        assert!(row.avg_stopwords_per_ae_span.is_none());
        assert!(row.avg_ae_spans_per_ae_record.is_none());
        assert!(row.unique_ae_surfaces.is_none());
        assert!(row.unique_drug_surfaces.is_none());
        assert!(row.flesch_reading_ease.is_some());
        let cells = row.cells();
        assert!(cells.iter().any(|(_, v)| v == "-"));
    }

    #[test]
    fn percent_positive_matches_published_scale() {
        let mut records = Vec::new();
        for i in 0..15482 {
            records.push(record(
                &format!("r{i:06}"),
                "short sample text",
                if i < 1339 {
                    Label::Positive
                } else {
                    Label::Negative
                },
                vec![],
            ));
        }
        let ds = Dataset::new("demo", records).unwrap();
        let row = dataset_stats(&ds);
        assert!(
            (row.percent_positive - 8.6).abs() < 0.05,
            "{}",
            row.percent_positive
        );
    }
}
