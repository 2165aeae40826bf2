//! JSON-lines span reader.
//!
//! One record per line:
//!
//! ```json
//! {"text": "go to Paris", "spans": [{"start": 6, "end": 11, "type": "LOC"}]}
//! ```
//!
//! `start`/`end` are character offsets into `text`, end exclusive. The
//! document text is kept verbatim; tokens are derived by whitespace
//! splitting, with each CJK character standing as its own token inside
//! unspaced runs. Overlapping or out-of-bounds spans are errors — nested
//! annotation is out of scope.

use super::{is_cjk_char, Corpus, CorpusError, Document, EntitySpan, Token, UnitMode};
use serde::Deserialize;
use std::collections::BTreeSet;
use std::io::{BufRead, BufReader, Read};

/// Options for [`parse_jsonl_spans`].
#[derive(Debug, Clone, Default)]
pub struct JsonlOptions {
    /// Entity types to keep; empty accepts every type.
    pub tag_filter: BTreeSet<String>,
    pub unit_mode: UnitMode,
}

#[derive(Deserialize)]
struct RawRecord {
    text: String,
    #[serde(default)]
    spans: Vec<RawSpan>,
}

#[derive(Deserialize)]
struct RawSpan {
    start: i64,
    end: i64,
    #[serde(rename = "type", default)]
    entity_type: String,
}

/// Parse a JSON-lines byte stream into a [`Corpus`].
pub fn parse_jsonl_spans<R: Read>(
    reader: R,
    options: &JsonlOptions,
) -> Result<Corpus, CorpusError> {
    let mut reader = BufReader::new(reader);
    let mut documents = Vec::new();
    let mut raw = Vec::new();
    let mut line_no = 0usize;

    loop {
        raw.clear();
        let read = reader.read_until(b'\n', &mut raw)?;
        if read == 0 {
            break;
        }
        line_no += 1;
        let line = std::str::from_utf8(&raw)
            .map_err(|_| CorpusError::Encoding { line: line_no })?
            .trim();
        if line.is_empty() {
            continue;
        }
        let record: RawRecord = serde_json::from_str(line)
            .map_err(|e| CorpusError::parse(line_no, format!("invalid JSON record: {e}")))?;
        documents.push(build_document(record, documents.len(), line_no, options)?);
    }

    Ok(Corpus {
        documents,
        unit_mode: options.unit_mode,
    })
}

fn build_document(
    record: RawRecord,
    doc_id: usize,
    line: usize,
    options: &JsonlOptions,
) -> Result<Document, CorpusError> {
    let chars: Vec<char> = record.text.chars().collect();
    let tokens = tokenize(&chars);

    let mut raw_spans: Vec<RawSpan> = record
        .spans
        .into_iter()
        .filter(|s| options.tag_filter.is_empty() || options.tag_filter.contains(&s.entity_type))
        .collect();
    raw_spans.sort_by_key(|s| (s.start, s.end));

    let mut spans = Vec::with_capacity(raw_spans.len());
    let mut prev_end = 0usize;
    for raw in &raw_spans {
        if raw.start < 0 || raw.end <= raw.start || raw.end as usize > chars.len() {
            return Err(CorpusError::parse(
                line,
                format!(
                    "span out of bounds: [{}, {}) on {}-char text",
                    raw.start,
                    raw.end,
                    chars.len()
                ),
            ));
        }
        let (char_start, char_end) = (raw.start as usize, raw.end as usize);
        if !spans.is_empty() && char_start < prev_end {
            return Err(CorpusError::parse(
                line,
                format!("overlapping spans at [{char_start}, {char_end})"),
            ));
        }
        prev_end = char_end;

        let surface: String = chars[char_start..char_end].iter().collect();
        let start_token = tokens
            .iter()
            .position(|t| t.doc_char_offset + t.surface.chars().count() > char_start)
            .ok_or_else(|| CorpusError::parse(line, "span covers no tokens"))?;
        let end_token = tokens
            .iter()
            .rposition(|t| t.doc_char_offset < char_end)
            .ok_or_else(|| CorpusError::parse(line, "span covers no tokens"))?;
        if end_token < start_token {
            return Err(CorpusError::parse(line, "span covers no tokens"));
        }

        spans.push(EntitySpan {
            doc_id,
            start_token,
            end_token,
            surface,
            char_length: char_end - char_start,
            char_start,
            char_end,
        });
    }

    Ok(Document {
        text: record.text,
        tokens,
        spans,
    })
}

fn tokenize(chars: &[char]) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    let mut current_start = 0usize;
    for (i, &c) in chars.iter().enumerate() {
        if c.is_whitespace() {
            flush(&mut tokens, &mut current, current_start);
        } else if is_cjk_char(c) {
            flush(&mut tokens, &mut current, current_start);
            tokens.push(Token {
                surface: c.to_string(),
                doc_char_offset: i,
            });
        } else {
            if current.is_empty() {
                current_start = i;
            }
            current.push(c);
        }
    }
    flush(&mut tokens, &mut current, current_start);
    tokens
}

fn flush(tokens: &mut Vec<Token>, current: &mut String, start: usize) {
    if !current.is_empty() {
        tokens.push(Token {
            surface: std::mem::take(current),
            doc_char_offset: start,
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(input: &str) -> Result<Corpus, CorpusError> {
        parse_jsonl_spans(input.as_bytes(), &JsonlOptions::default())
    }

    #[test]
    fn offsets_slice_the_text() {
        let corpus =
            parse(r#"{"text":"go to Paris","spans":[{"start":6,"end":11,"type":"LOC"}]}"#).unwrap();
        let doc = &corpus.documents[0];
        assert_eq!(doc.spans.len(), 1);
        assert_eq!(doc.spans[0].surface, "Paris");
        assert_eq!(doc.spans[0].char_length, 5);
        assert_eq!(doc.tokens.len(), 3);
        corpus.check_invariants().unwrap();
    }

    #[test]
    fn record_without_spans() {
        let corpus = parse(r#"{"text":"x","spans":[]}"#).unwrap();
        assert_eq!(corpus.documents.len(), 1);
        assert!(corpus.documents[0].spans.is_empty());
        assert_eq!(corpus.documents[0].tokens.len(), 1);
    }

    #[test]
    fn out_of_bounds_span_errors() {
        let err =
            parse(r#"{"text":"abcde","spans":[{"start":0,"end":99,"type":"LOC"}]}"#).unwrap_err();
        let message = err.to_string();
        assert!(message.contains("out of bounds"), "{message}");
        assert!(message.contains("line 1"), "{message}");
    }

    #[test]
    fn overlapping_spans_error() {
        let err = parse(
            r#"{"text":"abcdef","spans":[{"start":0,"end":4,"type":"A"},{"start":2,"end":6,"type":"B"}]}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("overlapping"), "{err}");
    }

    #[test]
    fn cjk_text_splits_per_character() {
        let corpus =
            parse(r#"{"text":"我爱北京","spans":[{"start":2,"end":4,"type":"LOC"}]}"#).unwrap();
        let doc = &corpus.documents[0];
        assert_eq!(doc.tokens.len(), 4);
        assert_eq!(doc.spans[0].surface, "北京");
        assert_eq!((doc.spans[0].start_token, doc.spans[0].end_token), (2, 3));
        corpus.check_invariants().unwrap();
    }

    #[test]
    fn mixed_script_tokenization() {
        let corpus =
            parse(r#"{"text":"去Paris吧","spans":[{"start":1,"end":6,"type":"LOC"}]}"#).unwrap();
        let doc = &corpus.documents[0];
        let surfaces: Vec<&str> = doc.tokens.iter().map(|t| t.surface.as_str()).collect();
        assert_eq!(surfaces, ["去", "Paris", "吧"]);
        assert_eq!(doc.spans[0].surface, "Paris");
        assert_eq!((doc.spans[0].start_token, doc.spans[0].end_token), (1, 1));
    }

    #[test]
    fn malformed_json_names_the_line() {
        let err = parse("{\"text\":\"a\",\"spans\":[]}\nnot json\n").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn spans_are_sorted_by_start() {
        let corpus = parse(
            r#"{"text":"a b c d","spans":[{"start":4,"end":5,"type":"X"},{"start":0,"end":1,"type":"X"}]}"#,
        )
        .unwrap();
        let doc = &corpus.documents[0];
        assert_eq!(doc.spans[0].char_start, 0);
        assert_eq!(doc.spans[1].char_start, 4);
        corpus.check_invariants().unwrap();
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            /// Records with whole-word spans round-trip: every span surface
            /// equals the text slice and the invariants hold.
            #[test]
            fn random_records_round_trip(
                words in proptest::collection::vec("[a-z]{1,6}", 1..12),
                picks in proptest::collection::vec(any::<prop::sample::Index>(), 0..4),
            ) {
                let text = words.join(" ");
                let mut offsets = Vec::new();
                let mut pos = 0usize;
                for w in &words {
                    offsets.push((pos, pos + w.len()));
                    pos += w.len() + 1;
                }
                let mut spans: Vec<(usize, usize)> =
                    picks.iter().map(|ix| offsets[ix.index(words.len())]).collect();
                spans.sort_unstable();
                spans.dedup();
                let spans_json: Vec<String> = spans
                    .iter()
                    .map(|(s, e)| format!("{{\"start\":{s},\"end\":{e},\"type\":\"LOC\"}}"))
                    .collect();
                let line =
                    format!("{{\"text\":\"{text}\",\"spans\":[{}]}}", spans_json.join(","));
                let corpus = parse(&line).unwrap();
                prop_assert!(corpus.check_invariants().is_ok(), "{:?}", corpus.check_invariants());
                let doc = &corpus.documents[0];
                prop_assert_eq!(doc.spans.len(), spans.len());
                for (span, &(s, e)) in doc.spans.iter().zip(&spans) {
                    prop_assert_eq!(&span.surface, &text[s..e]);
                }
            }
        }
    }
}
