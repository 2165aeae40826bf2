//! CoNLL/BIO reader.
//!
//! One token per line as `surface<TAB or space>tag`; extra middle columns
//! (POS, chunk) are tolerated by taking the first field as the surface and
//! the last as the tag. Tags follow the BIO scheme: `B-X` begins an entity
//! of type X, `I-X` continues it, `O` is outside. Blank lines are sentence
//! breaks and do not end the document — distances are counted across
//! sentences — while a marker line (default `-DOCSTART-`) starts a new
//! document.
//!
//! A stray `I-X` (no open run of type X before it) is an error in strict
//! mode and is repaired to `B-X` otherwise.

use super::{joiner, Corpus, CorpusError, Document, EntitySpan, Token, UnitMode};
use std::collections::BTreeSet;
use std::io::{BufRead, BufReader, Read};

/// Options for [`parse_conll`].
#[derive(Debug, Clone)]
pub struct ConllOptions {
    /// Entity types to keep; empty accepts every type.
    pub tag_filter: BTreeSet<String>,
    /// Error on stray `I-` tags instead of repairing them to `B-`.
    pub strict: bool,
    /// Marker line starting a new document.
    pub doc_separator: String,
    pub unit_mode: UnitMode,
}

impl Default for ConllOptions {
    fn default() -> Self {
        ConllOptions {
            tag_filter: BTreeSet::new(),
            strict: false,
            doc_separator: "-DOCSTART-".to_string(),
            unit_mode: UnitMode::Character,
        }
    }
}

struct DocBuilder {
    doc_id: usize,
    text: String,
    char_len: usize,
    tokens: Vec<Token>,
    spans: Vec<EntitySpan>,
    /// Open BIO run: (entity type, start token, char start, kept by filter).
    run: Option<(String, usize, usize, bool)>,
}

impl DocBuilder {
    fn new(doc_id: usize) -> Self {
        DocBuilder {
            doc_id,
            text: String::new(),
            char_len: 0,
            tokens: Vec::new(),
            spans: Vec::new(),
            run: None,
        }
    }

    fn push_token(&mut self, surface: &str) {
        if let Some(prev) = self.tokens.last() {
            let sep = joiner(&prev.surface, surface);
            self.text.push_str(sep);
            self.char_len += sep.chars().count();
        }
        self.tokens.push(Token {
            surface: surface.to_string(),
            doc_char_offset: self.char_len,
        });
        self.text.push_str(surface);
        self.char_len += surface.chars().count();
    }

    fn close_run(&mut self) {
        let Some((_, start_token, char_start, kept)) = self.run.take() else {
            return;
        };
        if !kept {
            return;
        }
        let end_token = self.tokens.len() - 1;
        let mut surface = String::new();
        for i in start_token..=end_token {
            if i > start_token {
                surface.push_str(joiner(&self.tokens[i - 1].surface, &self.tokens[i].surface));
            }
            surface.push_str(&self.tokens[i].surface);
        }
        let char_length = surface.chars().count();
        self.spans.push(EntitySpan {
            doc_id: self.doc_id,
            start_token,
            end_token,
            surface,
            char_length,
            char_start,
            char_end: char_start + char_length,
        });
    }

    fn open_run(&mut self, entity_type: &str, kept: bool) {
        let start_token = self.tokens.len() - 1;
        let char_start = self.tokens[start_token].doc_char_offset;
        self.run = Some((entity_type.to_string(), start_token, char_start, kept));
    }

    fn finish(mut self) -> Option<Document> {
        self.close_run();
        if self.tokens.is_empty() {
            return None;
        }
        Some(Document {
            text: self.text,
            tokens: self.tokens,
            spans: self.spans,
        })
    }
}

enum Tag<'a> {
    Outside,
    Begin(&'a str),
    Inside(&'a str),
}

fn classify_tag<'a>(tag: &'a str, strict: bool, line: usize) -> Result<Tag<'a>, CorpusError> {
    if tag == "O" {
        return Ok(Tag::Outside);
    }
    if let Some(t) = tag.strip_prefix("B-") {
        return Ok(Tag::Begin(t));
    }
    if let Some(t) = tag.strip_prefix("I-") {
        return Ok(Tag::Inside(t));
    }
    if strict {
        return Err(CorpusError::parse(line, format!("invalid tag {tag:?}")));
    }
    Ok(Tag::Outside)
}

/// Parse a CoNLL/BIO byte stream into a [`Corpus`].
pub fn parse_conll<R: Read>(reader: R, options: &ConllOptions) -> Result<Corpus, CorpusError> {
    let mut reader = BufReader::new(reader);
    let mut documents: Vec<Document> = Vec::new();
    let mut builder = DocBuilder::new(0);
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
            .trim_end_matches(['\n', '\r']);

        let mut fields = line.split_whitespace();
        let Some(surface) = fields.next() else {
            // Blank line: sentence break, same document.
            continue;
        };

        if surface == options.doc_separator {
            if let Some(doc) = builder.finish() {
                documents.push(doc);
            }
            builder = DocBuilder::new(documents.len());
            continue;
        }

        let tag = match fields.last() {
            Some(tag) => tag,
            None if options.strict => {
                return Err(CorpusError::parse(line_no, "missing tag"));
            }
            None => "O",
        };

        // Runs close against the previous token, so resolve the tag before
        // the current token is pushed.
        match classify_tag(tag, options.strict, line_no)? {
            Tag::Outside => {
                builder.close_run();
                builder.push_token(surface);
            }
            Tag::Begin(entity_type) => {
                builder.close_run();
                builder.push_token(surface);
                let kept =
                    options.tag_filter.is_empty() || options.tag_filter.contains(entity_type);
                builder.open_run(entity_type, kept);
            }
            Tag::Inside(entity_type) => {
                let continues = matches!(&builder.run, Some((t, _, _, _)) if t == entity_type);
                if continues {
                    builder.push_token(surface);
                } else if options.strict {
                    return Err(CorpusError::parse(line_no, "stray I- tag"));
                } else {
                    builder.close_run();
                    builder.push_token(surface);
                    let kept =
                        options.tag_filter.is_empty() || options.tag_filter.contains(entity_type);
                    builder.open_run(entity_type, kept);
                }
            }
        }
    }

    if let Some(doc) = builder.finish() {
        documents.push(doc);
    }

    Ok(Corpus {
        documents,
        unit_mode: options.unit_mode,
    })
}
