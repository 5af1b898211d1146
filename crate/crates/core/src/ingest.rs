//! Document loading and text normalization.
//!
//! Normalization keeps only alphabetic characters (Unicode `Alphabetic`),
//! lowercases them, and collapses every other run of characters into a single
//! space. All locators emitted downstream are character offsets into the
//! resulting `normalized_text`; each token additionally remembers where it came
//! from in the raw input.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::span::Span;

/// Inclusive lower bound on whitespace-separated words for a usable document.
pub const MIN_WORDS: usize = 1_000;
/// Inclusive upper bound on whitespace-separated words for a usable document.
pub const MAX_WORDS: usize = 60_000;

/// Publication metadata carried through to emitted cases.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub year: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub area: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub discipline: Option<Vec<String>>,
}

/// One input line: a publication's plain text plus metadata.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawDocument {
    pub doi: String,
    pub text: String,
    #[serde(flatten)]
    pub metadata: Metadata,
}

impl RawDocument {
    pub fn new(doi: impl Into<String>, text: impl Into<String>) -> Self {
        RawDocument {
            doi: doi.into(),
            text: text.into(),
            metadata: Metadata::default(),
        }
    }

    pub fn validate(&self) -> std::result::Result<(), String> {
        if self.doi.trim().is_empty() {
            return Err("doi is empty".into());
        }
        for (name, list) in [
            ("field", &self.metadata.field),
            ("area", &self.metadata.area),
            ("discipline", &self.metadata.discipline),
        ] {
            if list.iter().flatten().any(|s| s.is_empty()) {
                return Err(format!("{name} contains an empty string"));
            }
        }
        Ok(())
    }
}

/// A normalized document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub doi: String,
    pub tokens: Vec<String>,
    /// Per-token character span into `normalized_text`.
    pub token_spans: Vec<Span>,
    /// Per-token character span into the raw input text.
    pub raw_spans: Vec<Span>,
    pub normalized_text: String,
    /// Length of `normalized_text` in characters.
    pub doc_length: usize,
    pub metadata: Metadata,
    /// Byte offset of every character boundary; `None` when the text is ASCII.
    char_bytes: Option<Vec<usize>>,
}

impl Document {
    pub fn token_count(&self) -> usize {
        self.tokens.len()
    }

    /// Byte offset of character position `pos` (`pos <= doc_length`).
    pub fn byte_offset(&self, pos: usize) -> usize {
        match &self.char_bytes {
            None => pos,
            Some(map) => map[pos],
        }
    }

    /// Slice of `normalized_text` by character offsets.
    pub fn slice(&self, span: Span) -> &str {
        &self.normalized_text[self.byte_offset(span.begin)..self.byte_offset(span.end)]
    }

    /// Maps a raw-text character span onto `normalized_text`, covering every
    /// token that overlaps it. Returns `None` if no token overlaps.
    pub fn raw_to_normalized(&self, raw: Span) -> Option<Span> {
        let first = self.raw_spans.partition_point(|s| s.end <= raw.begin);
        let last = self.raw_spans.partition_point(|s| s.begin < raw.end);
        if first >= last {
            return None;
        }
        Some(Span::new(
            self.token_spans[first].begin,
            self.token_spans[last - 1].end,
        ))
    }

    pub fn publication(&self) -> PublicationRecord {
        PublicationRecord {
            doi: self.doi.clone(),
            doc_length: self.doc_length,
            year: self.metadata.year,
            field: self.metadata.field.clone(),
            area: self.metadata.area.clone(),
            discipline: self.metadata.discipline.clone(),
        }
    }
}

/// Publication record as emitted next to the case file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PublicationRecord {
    pub doi: String,
    pub doc_length: usize,
    pub year: Option<i32>,
    pub field: Option<Vec<String>>,
    pub area: Option<Vec<String>>,
    pub discipline: Option<Vec<String>>,
}

/// Normalizes `raw` into lowercase alphabetic tokens separated by single spaces.
pub fn normalize(raw: &RawDocument) -> Document {
    let mut b = Builder::with_capacity(raw.text.len());
    for (raw_pos, c) in raw.text.chars().enumerate() {
        let mut kept = false;
        if c.is_alphabetic() {
            for lc in c.to_lowercase().filter(|l| l.is_alphabetic()) {
                b.push(lc, raw_pos);
                kept = true;
            }
        }
        if !kept {
            b.close();
        }
    }
    b.close();
    b.finish(raw)
}

struct OpenToken {
    char_begin: usize,
    byte_begin: usize,
    raw_begin: usize,
    raw_end: usize,
}

struct Builder {
    text: String,
    chars: usize,
    ascii: bool,
    tokens: Vec<String>,
    token_spans: Vec<Span>,
    raw_spans: Vec<Span>,
    open: Option<OpenToken>,
}

impl Builder {
    fn with_capacity(n: usize) -> Self {
        Builder {
            text: String::with_capacity(n),
            chars: 0,
            ascii: true,
            tokens: Vec::new(),
            token_spans: Vec::new(),
            raw_spans: Vec::new(),
            open: None,
        }
    }

    fn push(&mut self, c: char, raw_pos: usize) {
        match &mut self.open {
            Some(open) => open.raw_end = raw_pos + 1,
            None => {
                if !self.text.is_empty() {
                    self.text.push(' ');
                    self.chars += 1;
                }
                self.open = Some(OpenToken {
                    char_begin: self.chars,
                    byte_begin: self.text.len(),
                    raw_begin: raw_pos,
                    raw_end: raw_pos + 1,
                });
            }
        }
        self.ascii &= c.is_ascii();
        self.text.push(c);
        self.chars += 1;
    }

    fn close(&mut self) {
        if let Some(open) = self.open.take() {
            self.tokens.push(self.text[open.byte_begin..].to_string());
            self.token_spans.push(Span::new(open.char_begin, self.chars));
            self.raw_spans.push(Span::new(open.raw_begin, open.raw_end));
        }
    }

    fn finish(self, raw: &RawDocument) -> Document {
        let char_bytes = if self.ascii {
            None
        } else {
            let mut map: Vec<usize> = self.text.char_indices().map(|(b, _)| b).collect();
            map.push(self.text.len());
            Some(map)
        };
        Document {
            doi: raw.doi.clone(),
            tokens: self.tokens,
            token_spans: self.token_spans,
            raw_spans: self.raw_spans,
            doc_length: self.chars,
            normalized_text: self.text,
            metadata: raw.metadata.clone(),
            char_bytes,
        }
    }
}

/// True iff the document has between 1,000 and 60,000 words (inclusive).
pub fn length_filter(doc: &Document) -> bool {
    within_word_bounds(doc, MIN_WORDS, MAX_WORDS)
}

pub fn within_word_bounds(doc: &Document, min: usize, max: usize) -> bool {
    (min..=max).contains(&doc.token_count())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DiagnosticKind {
    Malformed(String),
    Duplicate(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub path: PathBuf,
    pub line: usize,
    pub kind: DiagnosticKind,
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.kind {
            DiagnosticKind::Malformed(m) => {
                write!(f, "{}:{}: malformed record: {m}", self.path.display(), self.line)
            }
            DiagnosticKind::Duplicate(doi) => write!(
                f,
                "{}:{}: duplicate doi {doi}, keeping the later record",
                self.path.display(),
                self.line
            ),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct LoadedCorpus {
    pub documents: Vec<RawDocument>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Loads line-delimited JSON documents from a file, or from every `.jsonl`
/// file in a directory (sorted by name).
pub fn load_corpus(path: &Path) -> Result<LoadedCorpus> {
    let files = record_files(path)?;
    let mut out = LoadedCorpus::default();
    let mut seen: HashMap<String, usize> = HashMap::new();

    for file in files {
        for_each_line(&file, |line_no, line| {
            let parsed = serde_json::from_str::<RawDocument>(line)
                .map_err(|e| e.to_string())
                .and_then(|d| d.validate().map(|_| d));
            match parsed {
                Ok(doc) => match seen.get(&doc.doi) {
                    Some(&idx) => {
                        out.diagnostics.push(Diagnostic {
                            path: file.clone(),
                            line: line_no,
                            kind: DiagnosticKind::Duplicate(doc.doi.clone()),
                        });
                        out.documents[idx] = doc;
                    }
                    None => {
                        seen.insert(doc.doi.clone(), out.documents.len());
                        out.documents.push(doc);
                    }
                },
                Err(msg) => out.diagnostics.push(Diagnostic {
                    path: file.clone(),
                    line: line_no,
                    kind: DiagnosticKind::Malformed(msg),
                }),
            }
        })?;
    }
    for d in &out.diagnostics {
        log::warn!("{d}");
    }
    Ok(out)
}

pub(crate) fn record_files(path: &Path) -> Result<Vec<PathBuf>> {
    let meta = std::fs::metadata(path).map_err(|e| Error::io(path, e))?;
    if !meta.is_dir() {
        return Ok(vec![path.to_path_buf()]);
    }
    let mut files = Vec::new();
    for entry in std::fs::read_dir(path).map_err(|e| Error::io(path, e))? {
        let p = entry.map_err(|e| Error::io(path, e))?.path();
        let is_records = matches!(
            p.extension().and_then(|e| e.to_str()),
            Some("jsonl" | "ndjson")
        );
        if p.is_file() && is_records {
            files.push(p);
        }
    }
    files.sort();
    Ok(files)
}

/// Calls `f(line_number, line)` for each non-blank line. Lines that are not
/// valid UTF-8 are passed through as `Err` to the callback via an empty string
/// replacement and reported by the caller's parser.
pub(crate) fn for_each_line(path: &Path, mut f: impl FnMut(usize, &str)) -> Result<()> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = BufReader::new(file);
    let mut buf = Vec::new();
    let mut line_no = 0;
    loop {
        buf.clear();
        let n = reader
            .read_until(b'\n', &mut buf)
            .map_err(|e| Error::io(path, e))?;
        if n == 0 {
            break;
        }
        line_no += 1;
        match std::str::from_utf8(&buf) {
            Ok(s) => {
                let s = s.trim_end_matches(['\n', '\r']);
                if !s.trim().is_empty() {
                    f(line_no, s);
                }
            }
            // Invalid UTF-8 never parses as JSON; the sentinel guarantees a per-line error.
            Err(_) => f(line_no, "\u{0}invalid utf-8"),
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(text: &str) -> Document {
        normalize(&RawDocument::new("x", text))
    }

    #[test]
    fn strips_digits_and_punctuation() {
        let d = doc("The 3 cats, running!");
        assert_eq!(d.tokens, ["the", "cats", "running"]);
        assert_eq!(d.normalized_text, "the cats running");
        assert_eq!(d.doc_length, 16);
    }

    #[test]
    fn empty_text() {
        let d = doc("");
        assert!(d.tokens.is_empty());
        assert_eq!(d.doc_length, 0);
        let d = doc(" 12 ;; ");
        assert!(d.tokens.is_empty());
        assert_eq!(d.normalized_text, "");
    }

    #[test]
    fn case_folding() {
        assert_eq!(doc("ABC abc").tokens, ["abc", "abc"]);
    }

    #[test]
    fn digits_split_words() {
        assert_eq!(doc("covid19virus").tokens, ["covid", "virus"]);
    }

    #[test]
    fn unicode_letters_are_kept() {
        let d = doc("Größe — ΑΒΓ naïve");
        assert_eq!(d.tokens, ["größe", "αβγ", "naïve"]);
        assert_eq!(d.doc_length, d.normalized_text.chars().count());
        assert_eq!(d.slice(d.token_spans[1]), "αβγ");
    }

    #[test]
    fn raw_spans_point_back_into_input() {
        let raw = "  Hello, 42 World";
        let d = doc(raw);
        let chars: Vec<char> = raw.chars().collect();
        let s = d.raw_spans[1];
        assert_eq!(chars[s.begin..s.end].iter().collect::<String>(), "World");
        assert_eq!(d.raw_to_normalized(Span::new(2, 17)), Some(Span::new(0, 11)));
        assert_eq!(d.raw_to_normalized(Span::new(9, 11)), None);
    }

    #[test]
    fn word_bounds() {
        let text = |n: usize| vec!["w"; n].join(" ");
        assert!(!length_filter(&doc(&text(999))));
        assert!(length_filter(&doc(&text(1000))));
        assert!(length_filter(&doc(&text(60_000))));
        assert!(!length_filter(&doc(&text(60_001))));
    }

    #[test]
    fn metadata_validation() {
        let mut r = RawDocument::new("", "x");
        assert!(r.validate().is_err());
        r.doi = "10.1/a".into();
        r.metadata.field = Some(vec!["".into()]);
        assert!(r.validate().is_err());
        r.metadata.field = Some(vec!["Physics".into()]);
        assert!(r.validate().is_ok());
    }
}
