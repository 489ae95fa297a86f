//! Deterministic synthetic corpora for tests, demos, and pipeline checks.
//!
//! The builders are pure functions of their arguments: record `i` is drawn
//! from seed substream `i`, so corpora are stable across runs and record
//! count changes. Entity vocabularies are substring-free against each
//! other and against the template words, which keeps echoed extraction
//! targets groundable at their original offsets (the closure tests below
//! rely on this).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::corpus::{Dataset, Label, Record, Span, SpanKind, Split};

pub const AE_TERMS: [&str; 10] = [
    "headache",
    "nausea",
    "dizziness",
    "rash",
    "fatigue",
    "vomiting",
    "insomnia",
    "anxiety",
    "tremor",
    "migraine",
];

pub const DRUG_TERMS: [&str; 8] = [
    "aspirin",
    "ibuprofen",
    "lipitor",
    "zoloft",
    "prozac",
    "metformin",
    "warfarin",
    "xanax",
];

pub const DOSAGE_TERMS: [&str; 6] = [
    "10 mg",
    "25 mg",
    "40 mg",
    "5 ml",
    "two tablets",
    "one capsule",
];

const OPENERS: [&str; 4] = [
    "patient reported",
    "chart lists",
    "they complained of",
    "notes mention",
];

const CONNECTORS: [&str; 3] = ["and", "plus", "then"];

const CLOSERS: [&str; 4] = [
    "after the second dose",
    "since last week",
    "during treatment",
    "at follow up",
];

const SPANLESS_NOTES: [&str; 3] = [
    "routine follow up with nothing new to report",
    "refill visit went smoothly",
    "no complaints recorded this visit",
];

fn terms_of(kind: SpanKind) -> &'static [&'static str] {
    match kind {
        SpanKind::Ae => &AE_TERMS,
        SpanKind::Drug => &DRUG_TERMS,
        SpanKind::Dosage => &DOSAGE_TERMS,
    }
}

fn record_rng(seed: u64, index: usize) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

fn pick<'a>(rng: &mut ChaCha20Rng, options: &'a [&'a str]) -> &'a str {
    options[rng.gen_range(0..options.len() as u64) as usize]
}

/// Chooses `count` distinct terms, preserving vocabulary order.
fn pick_distinct<'a>(rng: &mut ChaCha20Rng, options: &'a [&'a str], count: usize) -> Vec<&'a str> {
    let mut indices: Vec<usize> = (0..options.len()).collect();
    for taken in 0..count.min(options.len()) {
        let extra = rng.gen_range(0..(indices.len() - taken) as u64) as usize;
        indices.swap(taken, taken + extra);
    }
    let mut chosen: Vec<usize> = indices[..count.min(options.len())].to_vec();
    chosen.sort_unstable();
    chosen.into_iter().map(|i| options[i]).collect()
}

/// Accumulates space-joined words, recording entity char offsets as it goes.
#[derive(Default)]
struct TextBuilder {
    text: String,
    chars: usize,
    spans: Vec<Span>,
}

impl TextBuilder {
    fn push_words(&mut self, words: &str) {
        if !self.text.is_empty() {
            self.text.push(' ');
            self.chars += 1;
        }
        self.text.push_str(words);
        self.chars += words.chars().count();
    }

    fn push_entity(&mut self, kind: SpanKind, surface: &str) {
        if !self.text.is_empty() {
            self.text.push(' ');
            self.chars += 1;
        }
        let start = self.chars;
        self.text.push_str(surface);
        self.chars += surface.chars().count();
        self.spans.push(Span::new(kind, start, self.chars, surface));
    }

    fn finish(mut self) -> (String, Vec<Span>) {
        self.text.push('.');
        (self.text, self.spans)
    }
}

fn entity_note(rng: &mut ChaCha20Rng, kinds: &[SpanKind]) -> (String, Vec<Span>) {
    let mut builder = TextBuilder::default();
    builder.push_words(pick(rng, &OPENERS));
    for (position, &kind) in kinds.iter().enumerate() {
        if position > 0 {
            builder.push_words(pick(rng, &CONNECTORS));
        }
        let count = 1 + rng.gen_range(0..2u64) as usize;
        for (j, term) in pick_distinct(rng, terms_of(kind), count).iter().enumerate() {
            if j > 0 {
                builder.push_words(pick(rng, &CONNECTORS));
            }
            builder.push_entity(kind, term);
        }
    }
    builder.push_words(pick(rng, &CLOSERS));
    builder.finish()
}

fn make_record(
    dataset: &str,
    index: usize,
    text: String,
    label: Label,
    spans: Vec<Span>,
) -> Record {
    Record {
        id: format!("{dataset}-{index:06}"),
        text,
        label,
        spans,
        dataset: dataset.to_string(),
        split: None,
    }
}

/// A labeled classification corpus: records `0..positives` are positive,
/// the rest negative. Texts mention drugs and symptoms but carry no spans,
/// so the corpus supports only the assertion task.
pub fn labeled_corpus(id: &str, total: usize, positives: usize, seed: u64) -> Dataset {
    assert!(positives <= total, "positives exceed total");
    let records = (0..total)
        .map(|i| {
            let mut rng = record_rng(seed, i);
            let drug = pick(&mut rng, &DRUG_TERMS);
            let (text, label) = if i < positives {
                let ae = pick(&mut rng, &AE_TERMS);
                let text = match rng.gen_range(0..3u64) {
                    0 => format!("took {drug} and developed {ae} soon after."),
                    1 => format!("started {drug} then the {ae} set in."),
                    _ => format!("after {drug} the {ae} would not stop."),
                };
                (text, Label::Positive)
            } else {
                let text = match rng.gen_range(0..3u64) {
                    0 => format!("took {drug} and felt fine afterwards."),
                    1 => "routine visit with no new symptoms.".to_string(),
                    _ => format!("refill of {drug} went smoothly."),
                };
                (text, Label::Negative)
            };
            make_record(id, i, text, label, Vec::new())
        })
        .collect();
    Dataset::new(id, records).expect("synthetic labeled corpus is valid")
}

/// An unlabeled extraction corpus over the given span kinds. Every record
/// mentions one or two entities per kind, except that when
/// `spanless_every > 0` each `spanless_every`-th record is a plain note
/// with no entities (an empty extraction target).
pub fn extraction_corpus(
    id: &str,
    size: usize,
    kinds: &[SpanKind],
    spanless_every: usize,
    seed: u64,
) -> Dataset {
    assert!(
        !kinds.is_empty(),
        "extraction corpus needs at least one kind"
    );
    let records = (0..size)
        .map(|i| {
            let mut rng = record_rng(seed, i);
            let (text, spans) = if spanless_every > 0 && (i + 1) % spanless_every == 0 {
                (format!("{}.", pick(&mut rng, &SPANLESS_NOTES)), Vec::new())
            } else {
                entity_note(&mut rng, kinds)
            };
            make_record(id, i, text, Label::Unlabeled, spans)
        })
        .collect();
    Dataset::new(id, records).expect("synthetic extraction corpus is valid")
}

/// A fully annotated corpus: every record has a drug and a dosage, about
/// three in five also report adverse events, and the label asserts exactly
/// whether AE spans are present. Supports all four tasks.
pub fn clinical_notes(id: &str, size: usize, seed: u64) -> Dataset {
    let records = (0..size)
        .map(|i| {
            let mut rng = record_rng(seed, i);
            let with_ae = rng.gen_range(0..5u64) < 3;
            let kinds: &[SpanKind] = if with_ae {
                &[SpanKind::Drug, SpanKind::Dosage, SpanKind::Ae]
            } else {
                &[SpanKind::Drug, SpanKind::Dosage]
            };
            let (text, spans) = entity_note(&mut rng, kinds);
            let label = if with_ae {
                Label::Positive
            } else {
                Label::Negative
            };
            make_record(id, i, text, label, spans)
        })
        .collect();
    Dataset::new(id, records).expect("synthetic clinical notes are valid")
}

/// Assigns one split to every record.
pub fn with_split(dataset: Dataset, split: Split) -> Dataset {
    let id = dataset.id().to_string();
    let records = dataset
        .into_records()
        .into_iter()
        .map(|mut r| {
            r.split = Some(split);
            r
        })
        .collect();
    Dataset::new(id, records).expect("split assignment preserves validity")
}

/// The standard suite: one corpus per capability profile. Pipeline-level
/// tests run every supported task on every member.
pub fn bundled_suite() -> Vec<Dataset> {
    vec![
        labeled_corpus("assertions", 60, 14, 101),
        extraction_corpus("ae_mentions", 50, &[SpanKind::Ae], 7, 102),
        extraction_corpus("drug_mentions", 40, &[SpanKind::Drug], 0, 103),
        extraction_corpus("dosage_mentions", 40, &[SpanKind::Dosage], 9, 104),
        extraction_corpus(
            "mixed_mentions",
            45,
            &[SpanKind::Ae, SpanKind::Drug, SpanKind::Dosage],
            0,
            105,
        ),
        clinical_notes("clinical_notes", 64, 106),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::score_run;
    use crate::framing::render_dataset;
    use crate::oracle::{run_oracle, OracleSpec};
    use approx::assert_abs_diff_eq;

    #[test]
    fn vocabularies_are_substring_free() {
        let entities: Vec<&str> = AE_TERMS
            .iter()
            .chain(&DRUG_TERMS)
            .chain(&DOSAGE_TERMS)
            .copied()
            .collect();
        for a in &entities {
            for b in &entities {
                if a != b {
                    assert!(!a.contains(b), "{a:?} contains {b:?}");
                }
            }
        }
        let fillers: Vec<&str> = OPENERS
            .iter()
            .chain(&CONNECTORS)
            .chain(&CLOSERS)
            .chain(&SPANLESS_NOTES)
            .copied()
            .collect();
        for filler in &fillers {
            for entity in &entities {
                assert!(!filler.contains(entity), "{filler:?} contains {entity:?}");
            }
        }
    }

    #[test]
    fn builders_are_deterministic_and_seed_sensitive() {
        let a = extraction_corpus("x", 20, &[SpanKind::Ae], 0, 5);
        let b = extraction_corpus("x", 20, &[SpanKind::Ae], 0, 5);
        let c = extraction_corpus("x", 20, &[SpanKind::Ae], 0, 6);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn record_draws_are_stable_under_corpus_growth() {
        let small = labeled_corpus("x", 10, 4, 9);
        let large = labeled_corpus("x", 30, 4, 9);
        assert_eq!(small.records(), &large.records()[..10]);
    }

    #[test]
    fn labeled_corpus_hits_requested_counts() {
        let dataset = labeled_corpus("x", 120, 37, 1);
        let counts = &dataset.manifest().counts;
        assert_eq!(counts.total, 120);
        assert_eq!(counts.positive, 37);
        assert_eq!(counts.negative, 83);
    }

    #[test]
    fn spanless_cadence_is_honored() {
        let dataset = extraction_corpus("x", 21, &[SpanKind::Ae], 7, 2);
        let spanless = dataset
            .records()
            .iter()
            .filter(|r| r.spans.is_empty())
            .count();
        assert_eq!(spanless, 3);
        let dense = extraction_corpus("x", 21, &[SpanKind::Ae], 0, 2);
        assert!(dense.records().iter().all(|r| !r.spans.is_empty()));
    }

    #[test]
    fn with_split_fills_the_training_pool() {
        let dataset = with_split(
            extraction_corpus("x", 30, &[SpanKind::Ae], 0, 3),
            Split::Train,
        );
        assert_eq!(
            dataset.manifest().train_size(crate::framing::TaskId::NerAe),
            30
        );
    }

    #[test]
    fn every_bundled_corpus_closes_under_echo() {
        for dataset in bundled_suite() {
            let tasks: Vec<_> = dataset.manifest().capabilities.iter().copied().collect();
            assert!(!tasks.is_empty(), "{} supports nothing", dataset.id());
            for task in tasks {
                let instances = render_dataset(&dataset, task, None).unwrap();
                let predictions = run_oracle(&OracleSpec::echo(), &instances).unwrap();
                let report = score_run(&dataset, task, &predictions).unwrap();
                if let Some(classification) = &report.classification {
                    assert_abs_diff_eq!(classification.f1, 1.0);
                } else {
                    assert_abs_diff_eq!(report.strict.unwrap().f1, 1.0);
                    assert_abs_diff_eq!(report.partial.unwrap().f1, 1.0);
                }
                assert_eq!(report.unfindable_spans, 0, "{} {task}", dataset.id());
            }
        }
    }

    #[test]
    fn suite_covers_all_four_tasks() {
        let mut covered = std::collections::BTreeSet::new();
        for dataset in bundled_suite() {
            covered.extend(dataset.manifest().capabilities.iter().copied());
        }
        assert_eq!(covered.len(), 4);
    }
}
