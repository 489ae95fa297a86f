//! Input format parsing and the canonical JSONL writer.
//!
//! Three on-disk formats normalize into [`Dataset`]:
//!
//! * `canonical-jsonl`: one record object per line, the crate's own format.
//!   An artifact header line (object with a `"tool"` field) may precede the
//!   records and is skipped.
//! * `iob-tokens`: CoNLL-style `token TAG` lines, blank line between
//!   records. Record text is the space-joined token sequence; labels derive
//!   from the presence of AE spans.
//! * `span-tsv`: `id <TAB> text <TAB> label <TAB> spans`, where `label` is
//!   `positive`, `negative`, or `-` (unlabeled) and `spans` is a
//!   space-separated list of `kind:start:end` character-offset triples.
//!
//! Loading is total over the error set: every malformed line or record is
//! collected into one [`Error::InvalidData`], nothing is silently dropped.

use std::io::Write;
use std::path::Path;

use crate::corpus::iob::iob_to_spans;
use crate::corpus::{Dataset, Label, Record, Span, SpanKind};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusFormat {
    CanonicalJsonl,
    IobTokens,
    SpanTsv,
}

impl CorpusFormat {
    pub fn as_str(&self) -> &'static str {
        match self {
            CorpusFormat::CanonicalJsonl => "canonical-jsonl",
            CorpusFormat::IobTokens => "iob-tokens",
            CorpusFormat::SpanTsv => "span-tsv",
        }
    }

    /// Guesses the format from a file extension.
    pub fn infer(path: &Path) -> Option<CorpusFormat> {
        match path.extension()?.to_str()? {
            "jsonl" => Some(CorpusFormat::CanonicalJsonl),
            "iob" | "bio" | "conll" => Some(CorpusFormat::IobTokens),
            "tsv" => Some(CorpusFormat::SpanTsv),
            _ => None,
        }
    }
}

impl std::fmt::Display for CorpusFormat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for CorpusFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "canonical-jsonl" | "canonical" | "jsonl" => Ok(CorpusFormat::CanonicalJsonl),
            "iob-tokens" | "iob" | "conll" | "bio" => Ok(CorpusFormat::IobTokens),
            "span-tsv" | "tsv" => Ok(CorpusFormat::SpanTsv),
            other => Err(Error::InvalidArgument {
                detail: format!("unknown corpus format {other:?}"),
            }),
        }
    }
}

/// True for an artifact header line: a JSON object that describes the tool
/// run rather than a record.
pub fn is_header_line(line: &str) -> bool {
    serde_json::from_str::<serde_json::Value>(line)
        .map(|v| v.get("tool").is_some() && v.get("id").is_none())
        .unwrap_or(false)
}

/// Loads one dataset file. Returns the dataset and any non-fatal warnings
/// (currently IOB repairs).
pub fn load_dataset(path: &Path, format: CorpusFormat) -> Result<(Dataset, Vec<String>)> {
    let content = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("dataset")
        .to_string();

    let mut issues = Vec::new();
    let mut warnings = Vec::new();
    let (records, dataset_id) = match format {
        CorpusFormat::CanonicalJsonl => parse_canonical(&content, &mut issues),
        CorpusFormat::IobTokens => (
            parse_iob(&content, &stem, &mut issues, &mut warnings),
            stem.clone(),
        ),
        CorpusFormat::SpanTsv => (parse_span_tsv(&content, &stem, &mut issues), stem.clone()),
    };

    if records.is_empty() && issues.is_empty() {
        issues.push("file contains no records".to_string());
    }
    if !issues.is_empty() {
        return Err(Error::InvalidData {
            source_name: path.display().to_string(),
            issues,
        });
    }

    match Dataset::new(dataset_id, records) {
        Ok(dataset) => Ok((dataset, warnings)),
        // Re-home record-level issues on the file they came from.
        Err(Error::InvalidData { issues, .. }) => Err(Error::InvalidData {
            source_name: path.display().to_string(),
            issues,
        }),
        Err(other) => Err(other),
    }
}

fn parse_canonical(content: &str, issues: &mut Vec<String>) -> (Vec<Record>, String) {
    let mut records: Vec<Record> = Vec::new();
    for (number, line) in numbered_lines(content) {
        if number == 1 && is_header_line(line) {
            continue;
        }
        match serde_json::from_str::<Record>(line) {
            Ok(record) => records.push(record),
            Err(e) => issues.push(format!("line {number}: {e}")),
        }
    }
    let dataset_id = records
        .first()
        .map(|r| r.dataset.clone())
        .unwrap_or_default();
    (records, dataset_id)
}

fn parse_iob(
    content: &str,
    stem: &str,
    issues: &mut Vec<String>,
    warnings: &mut Vec<String>,
) -> Vec<Record> {
    let mut records = Vec::new();
    // (first line number, tokens, tags) of the block being accumulated.
    let mut block: Vec<(usize, String, String)> = Vec::new();

    let flush = |block: &mut Vec<(usize, String, String)>,
                 records: &mut Vec<Record>,
                 issues: &mut Vec<String>,
                 warnings: &mut Vec<String>| {
        if block.is_empty() {
            return;
        }
        let first_line = block[0].0;
        let tokens: Vec<&str> = block.iter().map(|(_, t, _)| t.as_str()).collect();
        let tags: Vec<&str> = block.iter().map(|(_, _, t)| t.as_str()).collect();
        let index = records.len();
        let id = format!("{stem}-{index:06}");
        match iob_to_spans(&tokens, &tags) {
            Ok((spans, repairs)) => {
                for repair in repairs {
                    warnings.push(format!(
                        "line {}: record {:?}: {}",
                        block[repair.token_index].0, id, repair
                    ));
                }
                let label = if spans.iter().any(|s| s.kind == SpanKind::Ae) {
                    Label::Positive
                } else {
                    Label::Negative
                };
                records.push(Record {
                    id,
                    text: tokens.join(" "),
                    label,
                    spans,
                    dataset: stem.to_string(),
                    split: None,
                });
            }
            Err(Error::BadTag { index, tag }) => {
                issues.push(format!(
                    "line {}: malformed IOB tag {:?}",
                    block[index].0, tag
                ));
            }
            Err(e) => issues.push(format!("line {first_line}: {e}")),
        }
        block.clear();
    };

    for (number, line) in content.lines().enumerate() {
        let number = number + 1;
        if line.trim().is_empty() {
            flush(&mut block, &mut records, issues, warnings);
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            issues.push(format!(
                "line {number}: expected \"token TAG\", found {} field(s)",
                fields.len()
            ));
            continue;
        }
        block.push((number, fields[0].to_string(), fields[1].to_string()));
    }
    flush(&mut block, &mut records, issues, warnings);
    records
}

fn parse_span_tsv(content: &str, stem: &str, issues: &mut Vec<String>) -> Vec<Record> {
    let mut records = Vec::new();
    for (number, line) in numbered_lines(content) {
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 {
            issues.push(format!(
                "line {number}: expected 4 tab-separated columns, found {}",
                fields.len()
            ));
            continue;
        }
        let (id, text, label_field, spans_field) = (fields[0], fields[1], fields[2], fields[3]);
        let label = match label_field {
            "positive" => Label::Positive,
            "negative" => Label::Negative,
            "-" => Label::Unlabeled,
            other => {
                issues.push(format!(
                    "line {number}: label must be positive, negative, or \"-\", got {other:?}"
                ));
                continue;
            }
        };
        let chars: Vec<char> = text.chars().collect();
        let mut spans = Vec::new();
        let mut line_ok = true;
        for triple in spans_field.split_whitespace() {
            match parse_span_triple(triple, &chars) {
                Ok(span) => spans.push(span),
                Err(detail) => {
                    issues.push(format!("line {number}: {detail}"));
                    line_ok = false;
                }
            }
        }
        if line_ok {
            records.push(Record {
                id: id.to_string(),
                text: text.to_string(),
                label,
                spans,
                dataset: stem.to_string(),
                split: None,
            });
        }
    }
    records
}

fn parse_span_triple(triple: &str, chars: &[char]) -> std::result::Result<Span, String> {
    let parts: Vec<&str> = triple.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("span {triple:?} is not kind:start:end"));
    }
    let kind: SpanKind = parts[0]
        .parse()
        .map_err(|_| format!("span {triple:?} has unknown kind {:?}", parts[0]))?;
    let start: usize = parts[1]
        .parse()
        .map_err(|_| format!("span {triple:?} has a non-numeric start"))?;
    let end: usize = parts[2]
        .parse()
        .map_err(|_| format!("span {triple:?} has a non-numeric end"))?;
    if start >= end || end > chars.len() {
        return Err(format!(
            "span {triple:?} is out of bounds for text of length {}",
            chars.len()
        ));
    }
    let surface: String = chars[start..end].iter().collect();
    Ok(Span::new(kind, start, end, surface))
}

fn numbered_lines(content: &str) -> impl Iterator<Item = (usize, &str)> {
    content
        .lines()
        .enumerate()
        .map(|(i, line)| (i + 1, line))
        .filter(|(_, line)| !line.trim().is_empty())
}

/// Serializes one record as a canonical JSONL line (no trailing newline).
pub fn canonical_line(record: &Record) -> String {
    serde_json::to_string(record).expect("record serialization is infallible")
}

/// Writes records as canonical JSONL.
pub fn save_canonical(writer: &mut impl Write, records: &[Record]) -> std::io::Result<()> {
    for record in records {
        writeln!(writer, "{}", canonical_line(record))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_temp(content: &str, suffix: &str) -> tempfile::NamedTempFile {
        let mut file = tempfile::Builder::new().suffix(suffix).tempfile().unwrap();
        file.write_all(content.as_bytes()).unwrap();
        file
    }

    #[test]
    fn loads_canonical_jsonl_and_skips_header() {
        let content = concat!(
            "{\"tool\":\"aekit\",\"version\":\"0.0.0\",\"config_hash\":\"x\",\"seeds\":{}}\n",
            "{\"id\":\"a\",\"text\":\"I took aspirin\",\"label\":\"negative\",\"spans\":[{\"kind\":\"drug\",\"start\":7,\"end\":14,\"surface\":\"aspirin\"}],\"dataset\":\"demo\",\"split\":\"train\"}\n",
            "{\"id\":\"b\",\"text\":\"got a rash\",\"label\":\"positive\",\"spans\":[],\"dataset\":\"demo\",\"split\":null}\n",
        );
        let file = write_temp(content, ".jsonl");
        let (ds, warnings) = load_dataset(file.path(), CorpusFormat::CanonicalJsonl).unwrap();
        assert_eq!(ds.len(), 2);
        assert_eq!(ds.id(), "demo");
        assert!(warnings.is_empty());
        assert_eq!(ds.records()[0].spans[0].surface, "aspirin");
    }

    #[test]
    fn canonical_errors_carry_line_numbers_for_every_bad_line() {
        let content = concat!(
            "{\"id\":\"a\",\"text\":\"ok text\",\"label\":null,\"spans\":[],\"dataset\":\"d\",\"split\":null}\n",
            "{not json\n",
            "{\"id\":\"c\",\"label\":\"positive\"}\n",
        );
        let file = write_temp(content, ".jsonl");
        let err = load_dataset(file.path(), CorpusFormat::CanonicalJsonl).unwrap_err();
        let text = err.to_string();
        assert!(text.contains("line 2"), "{text}");
        assert!(text.contains("line 3"), "{text}");
    }

    #[test]
    fn loads_iob_tokens_with_derived_labels() {
        let content = concat!(
            "I O\n",
            "took O\n",
            "aspirin B-Drug\n",
            "\n",
            "bad B-AE\n",
            "headache I-AE\n",
        );
        let file = write_temp(content, ".iob");
        let (ds, warnings) = load_dataset(file.path(), CorpusFormat::IobTokens).unwrap();
        assert!(warnings.is_empty());
        assert_eq!(ds.len(), 2);
        let first = &ds.records()[0];
        assert_eq!(first.text, "I took aspirin");
        assert_eq!(first.label, Label::Negative);
        assert_eq!(first.spans[0].surface, "aspirin");
        let second = &ds.records()[1];
        assert_eq!(second.label, Label::Positive);
        assert_eq!(second.spans[0].surface, "bad headache");
        assert!(first.id.ends_with("000000"));
    }

    #[test]
    fn iob_repairs_surface_as_warnings_with_line_numbers() {
        let content = "worse I-AE\nnow O\n";
        let file = write_temp(content, ".iob");
        let (ds, warnings) = load_dataset(file.path(), CorpusFormat::IobTokens).unwrap();
        assert_eq!(ds.len(), 1);
        assert_eq!(warnings.len(), 1);
        assert!(warnings[0].contains("line 1"), "{warnings:?}");
    }

    #[test]
    fn iob_bad_tags_and_field_counts_are_collected() {
        let content = "a B-Gene\n\nb O extra\n\nc O\n";
        let file = write_temp(content, ".iob");
        let err = load_dataset(file.path(), CorpusFormat::IobTokens).unwrap_err();
        let text = err.to_string();
        assert!(text.contains("line 1"), "{text}");
        assert!(text.contains("line 3"), "{text}");
    }

    #[test]
    fn loads_span_tsv() {
        let content = concat!(
            "r1\tI took aspirin and got hives\tpositive\tdrug:7:14 ae:23:28\n",
            "r2\tno problems at all\tnegative\t\n",
            "r3\tunlabeled extra text\t-\t\n",
        );
        let file = write_temp(content, ".tsv");
        let (ds, _) = load_dataset(file.path(), CorpusFormat::SpanTsv).unwrap();
        assert_eq!(ds.len(), 3);
        assert_eq!(ds.records()[0].spans[1].surface, "hives");
        assert_eq!(ds.records()[2].label, Label::Unlabeled);
    }

    #[test]
    fn span_tsv_reports_all_bad_lines() {
        let content = concat!(
            "r1\tonly three columns\tpositive\n",
            "r2\tbad label\tmaybe\t\n",
            "r3\tbad span\tnegative\tae:0:999\n",
            "r4\tfine text\tnegative\t\n",
        );
        let file = write_temp(content, ".tsv");
        let err = load_dataset(file.path(), CorpusFormat::SpanTsv).unwrap_err();
        let text = err.to_string();
        for line in ["line 1", "line 2", "line 3"] {
            assert!(text.contains(line), "{text}");
        }
    }

    #[test]
    fn empty_files_are_rejected() {
        let file = write_temp("\n\n", ".jsonl");
        let err = load_dataset(file.path(), CorpusFormat::CanonicalJsonl).unwrap_err();
        assert!(err.to_string().contains("no records"));
    }

    #[test]
    fn canonical_save_load_round_trips() {
        let content = concat!(
            "r1\tI took aspirin and got hives\tpositive\tdrug:7:14 ae:23:28\n",
            "r2\tno problems at all\tnegative\t\n",
        );
        let file = write_temp(content, ".tsv");
        let (ds, _) = load_dataset(file.path(), CorpusFormat::SpanTsv).unwrap();

        let mut buffer = Vec::new();
        save_canonical(&mut buffer, ds.records()).unwrap();
        let mut out = tempfile::Builder::new()
            .suffix(".jsonl")
            .tempfile()
            .unwrap();
        out.write_all(&buffer).unwrap();
        let (back, _) = load_dataset(out.path(), CorpusFormat::CanonicalJsonl).unwrap();
        assert_eq!(back.records(), ds.records());
    }

    #[test]
    fn format_inference_uses_extensions() {
        assert_eq!(
            CorpusFormat::infer(Path::new("x/cadec.jsonl")),
            Some(CorpusFormat::CanonicalJsonl)
        );
        assert_eq!(
            CorpusFormat::infer(Path::new("smm4h.conll")),
            Some(CorpusFormat::IobTokens)
        );
        assert_eq!(
            CorpusFormat::infer(Path::new("data.tsv")),
            Some(CorpusFormat::SpanTsv)
        );
        assert_eq!(CorpusFormat::infer(Path::new("data.csv")), None);
    }
}
