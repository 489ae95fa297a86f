//! IOB tag sequences to character-offset spans and back.
//!
//! Offsets are measured against the text produced by joining tokens with
//! single spaces, which is exactly the record text the IOB loader stores.
//! A dangling `I-` tag (sequence start, after `O`, or after a different
//! kind) is repaired to `B-` and reported as a warning rather than an
//! error; real corpora contain these.

use crate::corpus::{Span, SpanKind};
use crate::error::{Error, Result};

/// Repair applied while reading a tag sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IobWarning {
    pub token_index: usize,
    pub tag: String,
}

impl std::fmt::Display for IobWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "dangling {:?} at token {} treated as B",
            self.tag, self.token_index
        )
    }
}

enum Tag {
    Outside,
    Begin(SpanKind),
    Inside(SpanKind),
}

fn parse_tag(index: usize, raw: &str) -> Result<Tag> {
    let bad = || Error::BadTag {
        index,
        tag: raw.to_string(),
    };
    if raw.eq_ignore_ascii_case("o") {
        return Ok(Tag::Outside);
    }
    let (head, kind) = raw.split_once('-').ok_or_else(bad)?;
    let kind: SpanKind = kind.parse().map_err(|_| bad())?;
    match head {
        "B" | "b" => Ok(Tag::Begin(kind)),
        "I" | "i" => Ok(Tag::Inside(kind)),
        _ => Err(bad()),
    }
}

/// Converts one token/tag sequence into spans with character offsets.
pub fn iob_to_spans<S: AsRef<str>>(
    tokens: &[S],
    tags: &[S],
) -> Result<(Vec<Span>, Vec<IobWarning>)> {
    if tokens.len() != tags.len() {
        return Err(Error::TagLengthMismatch {
            tokens: tokens.len(),
            tags: tags.len(),
        });
    }

    let mut spans = Vec::new();
    let mut warnings = Vec::new();
    // (kind, start char, end char) of the span currently being extended.
    let mut open: Option<(SpanKind, usize, usize)> = None;
    let mut offset = 0usize;
    let mut joined = String::new();

    for (index, (token, tag)) in tokens.iter().zip(tags).enumerate() {
        let token = token.as_ref();
        if token.is_empty() {
            return Err(Error::InvalidArgument {
                detail: format!("token {index} is empty"),
            });
        }
        if index > 0 {
            joined.push(' ');
            offset += 1;
        }
        let start = offset;
        joined.push_str(token);
        offset += token.chars().count();

        match parse_tag(index, tag.as_ref())? {
            Tag::Outside => {
                close(&mut open, &joined, &mut spans);
            }
            Tag::Begin(kind) => {
                close(&mut open, &joined, &mut spans);
                open = Some((kind, start, offset));
            }
            Tag::Inside(kind) => match open {
                Some((open_kind, _, ref mut end)) if open_kind == kind => {
                    *end = offset;
                }
                _ => {
                    warnings.push(IobWarning {
                        token_index: index,
                        tag: tag.as_ref().to_string(),
                    });
                    close(&mut open, &joined, &mut spans);
                    open = Some((kind, start, offset));
                }
            },
        }
    }
    close(&mut open, &joined, &mut spans);
    Ok((spans, warnings))
}

fn close(open: &mut Option<(SpanKind, usize, usize)>, joined: &str, spans: &mut Vec<Span>) {
    if let Some((kind, start, end)) = open.take() {
        let surface: String = joined.chars().skip(start).take(end - start).collect();
        spans.push(Span::new(kind, start, end, surface));
    }
}

/// Inverse of [`iob_to_spans`], mainly for round-trip checks and IOB
/// export. Spans must align exactly with token boundaries in the
/// space-joined text and must not overlap.
pub fn spans_to_iob<S: AsRef<str>>(tokens: &[S], spans: &[Span]) -> Result<Vec<String>> {
    // Character range of each token in the joined text.
    let mut ranges = Vec::with_capacity(tokens.len());
    let mut offset = 0usize;
    for (index, token) in tokens.iter().enumerate() {
        if index > 0 {
            offset += 1;
        }
        let len = token.as_ref().chars().count();
        ranges.push((offset, offset + len));
        offset += len;
    }

    let mut tags = vec!["O".to_string(); tokens.len()];
    for span in spans {
        let first = ranges.iter().position(|&(s, _)| s == span.start);
        let last = ranges.iter().position(|&(_, e)| e == span.end);
        let (first, last) = match (first, last) {
            (Some(f), Some(l)) if f <= l => (f, l),
            _ => {
                return Err(Error::InvalidArgument {
                    detail: format!(
                        "span {}..{} does not align with token boundaries",
                        span.start, span.end
                    ),
                })
            }
        };
        let kind = span.kind.as_str().to_uppercase();
        for (i, tag) in tags.iter_mut().enumerate().take(last + 1).skip(first) {
            if *tag != "O" {
                return Err(Error::InvalidArgument {
                    detail: format!("span {}..{} overlaps another span", span.start, span.end),
                });
            }
            *tag = format!("{}-{}", if i == first { "B" } else { "I" }, kind);
        }
    }
    Ok(tags)
}
