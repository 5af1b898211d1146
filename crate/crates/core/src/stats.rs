//! Summary statistics over a case file.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::case::ReuseCase;
use crate::error::Result;
use crate::jsonl::read_jsonl_lenient;

/// Upper bounds (exclusive) of the case-length histogram bins, in characters.
pub const LENGTH_BINS: [usize; 7] = [100, 250, 500, 1_000, 2_500, 5_000, 10_000];

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub cases: usize,
    pub malformed: usize,
    pub document_pairs: usize,
    pub documents: usize,
    /// Counts over both sides of every case; a case contributes once per side.
    pub by_year: BTreeMap<String, usize>,
    pub by_field: BTreeMap<String, usize>,
    pub by_area: BTreeMap<String, usize>,
    pub by_discipline: BTreeMap<String, usize>,
    /// Bin label -> number of case sides whose matched text length falls in it.
    pub length_histogram: BTreeMap<String, usize>,
    /// Number of distinct partner documents -> number of documents with that many.
    pub partners_per_document: BTreeMap<usize, usize>,
}

fn bin_label(len: usize) -> String {
    let mut lo = 0;
    for hi in LENGTH_BINS {
        if len < hi {
            return format!("{lo:05}-{hi:05}");
        }
        lo = hi;
    }
    format!("{lo:05}+")
}

fn bump(map: &mut BTreeMap<String, usize>, key: impl Into<String>) {
    *map.entry(key.into()).or_default() += 1;
}

pub fn summarize(cases: &[ReuseCase]) -> Summary {
    let mut s = Summary {
        cases: cases.len(),
        ..Default::default()
    };
    let mut pairs = BTreeSet::new();
    let mut partners: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for c in cases {
        pairs.insert((c.doi_a.as_str(), c.doi_b.as_str()));
        partners.entry(&c.doi_a).or_default().insert(&c.doi_b);
        partners.entry(&c.doi_b).or_default().insert(&c.doi_a);
        let sides = [
            (c.year_a, &c.field_a, &c.area_a, &c.discipline_a, c.end_a - c.begin_a),
            (c.year_b, &c.field_b, &c.area_b, &c.discipline_b, c.end_b - c.begin_b),
        ];
        for (year, field, area, discipline, len) in sides {
            bump(
                &mut s.by_year,
                year.map_or_else(|| "unknown".to_owned(), |y| y.to_string()),
            );
            for (map, list) in [
                (&mut s.by_field, field),
                (&mut s.by_area, area),
                (&mut s.by_discipline, discipline),
            ] {
                match list {
                    Some(values) if !values.is_empty() => values.iter().for_each(|v| bump(map, v.as_str())),
                    _ => bump(map, "unknown"),
                }
            }
            bump(&mut s.length_histogram, bin_label(len));
        }
    }
    s.document_pairs = pairs.len();
    s.documents = partners.len();
    for p in partners.values() {
        *s.partners_per_document.entry(p.len()).or_default() += 1;
    }
    s
}

/// Summarizes a case file, skipping (and counting) malformed records.
pub fn stats(path: &Path) -> Result<Summary> {
    let (cases, bad) = read_jsonl_lenient::<ReuseCase>(path)?;
    for b in &bad {
        log::warn!("{}:{}: skipping malformed case: {}", path.display(), b.line, b.message);
    }
    let mut s = summarize(&cases);
    s.malformed = bad.len();
    Ok(s)
}

impl Summary {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "cases            {}", self.cases);
        let _ = writeln!(out, "malformed        {}", self.malformed);
        let _ = writeln!(out, "document pairs   {}", self.document_pairs);
        let _ = writeln!(out, "documents        {}", self.documents);
        for (title, map) in [
            ("year", &self.by_year),
            ("field", &self.by_field),
            ("area", &self.by_area),
            ("discipline", &self.by_discipline),
            ("case length (chars)", &self.length_histogram),
        ] {
            let _ = writeln!(out, "\nby {title}");
            for (k, v) in map {
                let _ = writeln!(out, "  {k:<30} {v}");
            }
        }
        let _ = writeln!(out, "\npartners per document");
        for (k, v) in &self.partners_per_document {
            let _ = writeln!(out, "  {k:<30} {v}");
        }
        out
    }
}
