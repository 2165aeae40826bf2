//! Entity-annotated corpora.
//!
//! A [`Corpus`] is a sequence of documents, each holding its reconstructed
//! text, the token stream with character offsets into that text, and the
//! annotated entity spans. All offsets count Unicode scalar values, not
//! bytes. A corpus is immutable once parsed and safe to share across
//! threads.
//!
//! Document text reconstruction joins tokens with a single space, except
//! between two tokens that both consist solely of CJK characters, which are
//! joined without a separator — Chinese/Japanese entity lengths then come
//! out in characters while space-delimited scripts keep their natural
//! string lengths.

pub mod conll;
pub mod jsonl;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{message} at line {line}")]
    Parse { line: usize, message: String },
    #[error("invalid UTF-8 at line {line}")]
    Encoding { line: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CorpusError {
    fn parse(line: usize, message: impl Into<String>) -> Self {
        CorpusError::Parse {
            line,
            message: message.into(),
        }
    }
}

/// Unit in which inter-entity distances are counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitMode {
    /// Characters strictly between two spans.
    #[default]
    Character,
    /// Whole tokens strictly between two spans.
    Token,
}

/// One token of a document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    /// Character index of the first character within the document text.
    pub doc_char_offset: usize,
}

/// One annotated entity occurrence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntitySpan {
    pub doc_id: usize,
    pub start_token: usize,
    /// Inclusive.
    pub end_token: usize,
    pub surface: String,
    /// Number of characters in `surface`; equals `char_end − char_start`.
    pub char_length: usize,
    pub char_start: usize,
    /// Exclusive.
    pub char_end: usize,
}

/// One document: reconstructed text, tokens, and sorted entity spans.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub text: String,
    pub tokens: Vec<Token>,
    pub spans: Vec<EntitySpan>,
}

/// An immutable parsed corpus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corpus {
    pub documents: Vec<Document>,
    pub unit_mode: UnitMode,
}

impl Corpus {
    pub fn empty(unit_mode: UnitMode) -> Self {
        Corpus {
            documents: Vec::new(),
            unit_mode,
        }
    }

    /// Total number of entity occurrences.
    pub fn total_spans(&self) -> usize {
        self.documents.iter().map(|d| d.spans.len()).sum()
    }

    /// Concatenate several corpora, re-basing span document ids.
    pub fn merge(corpora: Vec<Corpus>, unit_mode: UnitMode) -> Corpus {
        let mut documents = Vec::new();
        for corpus in corpora {
            for mut doc in corpus.documents {
                let doc_id = documents.len();
                for span in &mut doc.spans {
                    span.doc_id = doc_id;
                }
                documents.push(doc);
            }
        }
        Corpus {
            documents,
            unit_mode,
        }
    }

    /// Check the structural invariants; returns the first violation found.
    ///
    /// Verified per document: token offsets strictly increasing, spans
    /// sorted by `char_start` and pairwise non-overlapping, consistent span
    /// lengths, and the round trip `text[char_start..char_end) == surface`.
    pub fn check_invariants(&self) -> Result<(), String> {
        for (doc_id, doc) in self.documents.iter().enumerate() {
            let chars: Vec<char> = doc.text.chars().collect();
            let mut last_offset = None;
            for token in &doc.tokens {
                if token.surface.is_empty() {
                    return Err(format!("doc {doc_id}: empty token surface"));
                }
                if let Some(prev) = last_offset {
                    if token.doc_char_offset <= prev {
                        return Err(format!("doc {doc_id}: token offsets not increasing"));
                    }
                }
                last_offset = Some(token.doc_char_offset);
            }
            let mut prev_end = 0usize;
            for (i, span) in doc.spans.iter().enumerate() {
                if span.doc_id != doc_id {
                    return Err(format!("doc {doc_id}: span has doc_id {}", span.doc_id));
                }
                if span.char_end <= span.char_start {
                    return Err(format!("doc {doc_id}: empty span at index {i}"));
                }
                if span.char_length != span.char_end - span.char_start
                    || span.char_length != span.surface.chars().count()
                {
                    return Err(format!("doc {doc_id}: inconsistent span length at {i}"));
                }
                if i > 0 && span.char_start < prev_end {
                    return Err(format!("doc {doc_id}: overlapping spans at index {i}"));
                }
                prev_end = span.char_end;
                if span.char_end > chars.len() {
                    return Err(format!("doc {doc_id}: span out of bounds at {i}"));
                }
                let slice: String = chars[span.char_start..span.char_end].iter().collect();
                if slice != span.surface {
                    return Err(format!(
                        "doc {doc_id}: span {i} surface {:?} != text slice {:?}",
                        span.surface, slice
                    ));
                }
                if span.start_token > span.end_token || span.end_token >= doc.tokens.len() {
                    return Err(format!("doc {doc_id}: bad token range in span {i}"));
                }
            }
        }
        Ok(())
    }
}

/// CJK ranges used by the join rule and the fallback tokenizer: ideographs,
/// kana, and the CJK/fullwidth punctuation blocks.
pub(crate) fn is_cjk_char(c: char) -> bool {
    matches!(
        u32::from(c),
        0x3000..=0x303F      // CJK symbols and punctuation
        | 0x3040..=0x30FF    // hiragana, katakana
        | 0x3400..=0x4DBF    // ideograph extension A
        | 0x4E00..=0x9FFF    // unified ideographs
        | 0xF900..=0xFAFF    // compatibility ideographs
        | 0xFF00..=0xFFEF    // fullwidth forms
        | 0x20000..=0x2FA1F  // ideograph extensions B+
    )
}

pub(crate) fn is_cjk_token(s: &str) -> bool {
    !s.is_empty() && s.chars().all(is_cjk_char)
}

/// Separator inserted between two adjacent tokens during reconstruction.
pub(crate) fn joiner(prev: &str, next: &str) -> &'static str {
    if is_cjk_token(prev) && is_cjk_token(next) {
        ""
    } else {
        " "
    }
}
