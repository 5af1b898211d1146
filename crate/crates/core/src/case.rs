//! Reuse case records and their line-delimited serialization.

use serde::{Deserialize, Serialize};
use uuid::Uuid;

use crate::ingest::Document;
use crate::span::Span;

/// Characters of context emitted on either side of a match.
pub const CONTEXT_CHARS: usize = 100;

/// One detected reuse instance between two publications. Field order is the
/// on-disk key order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReuseCase {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text_a: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub before_a: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub after_a: Option<String>,
    pub begin_a: usize,
    pub end_a: usize,
    pub doc_length_a: usize,
    pub doi_a: String,
    pub year_a: Option<i32>,
    pub field_a: Option<Vec<String>>,
    pub area_a: Option<Vec<String>>,
    pub discipline_a: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text_b: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub before_b: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub after_b: Option<String>,
    pub begin_b: usize,
    pub end_b: usize,
    pub doc_length_b: usize,
    pub doi_b: String,
    pub year_b: Option<i32>,
    pub field_b: Option<Vec<String>>,
    pub area_b: Option<Vec<String>>,
    pub discipline_b: Option<Vec<String>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum OutputMode {
    #[default]
    Full,
    MetadataOnly,
}

impl std::str::FromStr for OutputMode {
    type Err = crate::Error;
    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "full" => Ok(OutputMode::Full),
            "metadata-only" => Ok(OutputMode::MetadataOnly),
            other => Err(crate::Error::InvalidParam(format!("unknown output mode {other:?}"))),
        }
    }
}

/// Namespace under which case ids are derived for a run with the given seed.
pub fn run_namespace(seed: u64) -> Uuid {
    Uuid::new_v5(&Uuid::NAMESPACE_OID, format!("textreuse-run:{seed}").as_bytes())
}

/// Deterministic case id. Independent of argument order: the side with the
/// smaller doi is hashed first.
pub fn case_id(namespace: &Uuid, doi_a: &str, span_a: Span, doi_b: &str, span_b: Span) -> Uuid {
    let ((da, sa), (db, sb)) = if (doi_a, span_a) <= (doi_b, span_b) {
        ((doi_a, span_a), (doi_b, span_b))
    } else {
        ((doi_b, span_b), (doi_a, span_a))
    };
    let name = format!(
        "{da}\t{}\t{}\t{db}\t{}\t{}",
        sa.begin, sa.end, sb.begin, sb.end
    );
    Uuid::new_v5(namespace, name.as_bytes())
}

fn context(doc: &Document, span: Span) -> (String, String, String) {
    let before = Span::new(span.begin.saturating_sub(CONTEXT_CHARS), span.begin);
    let after = Span::new(span.end, (span.end + CONTEXT_CHARS).min(doc.doc_length));
    (
        doc.slice(span).to_owned(),
        doc.slice(before).to_owned(),
        doc.slice(after).to_owned(),
    )
}

impl ReuseCase {
    /// Materializes a case with text, context, locators and metadata of both sides.
    pub fn build(namespace: &Uuid, a: &Document, span_a: Span, b: &Document, span_b: Span) -> Self {
        let (text_a, before_a, after_a) = context(a, span_a);
        let (text_b, before_b, after_b) = context(b, span_b);
        ReuseCase {
            id: case_id(namespace, &a.doi, span_a, &b.doi, span_b).to_string(),
            text_a: Some(text_a),
            before_a: Some(before_a),
            after_a: Some(after_a),
            begin_a: span_a.begin,
            end_a: span_a.end,
            doc_length_a: a.doc_length,
            doi_a: a.doi.clone(),
            year_a: a.metadata.year,
            field_a: a.metadata.field.clone(),
            area_a: a.metadata.area.clone(),
            discipline_a: a.metadata.discipline.clone(),
            text_b: Some(text_b),
            before_b: Some(before_b),
            after_b: Some(after_b),
            begin_b: span_b.begin,
            end_b: span_b.end,
            doc_length_b: b.doc_length,
            doi_b: b.doi.clone(),
            year_b: b.metadata.year,
            field_b: b.metadata.field.clone(),
            area_b: b.metadata.area.clone(),
            discipline_b: b.metadata.discipline.clone(),
        }
    }

    pub fn span_a(&self) -> Span {
        Span::new(self.begin_a, self.end_a)
    }

    pub fn span_b(&self) -> Span {
        Span::new(self.begin_b, self.end_b)
    }

    /// Drops the six text fields (metadata-only output).
    pub fn strip_text(&mut self) {
        self.text_a = None;
        self.before_a = None;
        self.after_a = None;
        self.text_b = None;
        self.before_b = None;
        self.after_b = None;
    }

    pub fn with_mode(mut self, mode: OutputMode) -> Self {
        if mode == OutputMode::MetadataOnly {
            self.strip_text();
        }
        self
    }

    /// The same case with sides a and b exchanged.
    pub fn swapped(self) -> Self {
        ReuseCase {
            id: self.id,
            text_a: self.text_b,
            before_a: self.before_b,
            after_a: self.after_b,
            begin_a: self.begin_b,
            end_a: self.end_b,
            doc_length_a: self.doc_length_b,
            doi_a: self.doi_b,
            year_a: self.year_b,
            field_a: self.field_b,
            area_a: self.area_b,
            discipline_a: self.discipline_b,
            text_b: self.text_a,
            before_b: self.before_a,
            after_b: self.after_a,
            begin_b: self.begin_a,
            end_b: self.end_a,
            doc_length_b: self.doc_length_a,
            doi_b: self.doi_a,
            year_b: self.year_a,
            field_b: self.field_a,
            area_b: self.area_a,
            discipline_b: self.discipline_a,
        }
    }

    /// Total order used for output files.
    pub fn sort_key(&self) -> (&str, &str, usize, usize, usize, usize) {
        (
            &self.doi_a,
            &self.doi_b,
            self.begin_a,
            self.begin_b,
            self.end_a,
            self.end_b,
        )
    }
}
