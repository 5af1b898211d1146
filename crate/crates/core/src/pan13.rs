//! Reader for the PAN 2013 text alignment corpus layout:
//!
//! ```text
//! <root>/src/source-documentNNNNN.txt
//! <root>/susp/suspicious-documentNNNNN.txt
//! <root>/0X-<strategy>/suspicious-documentNNNNN-source-documentMMMMM.xml
//! ```
//!
//! Gold offsets in the XML files refer to the raw text; they are mapped onto
//! normalized-text offsets through each token's raw span.

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use regex::Regex;

use crate::alignment::{align_pair, AlignParams};
use crate::error::{Error, Result};
use crate::ingest::{normalize, Document, RawDocument};
use crate::metrics::{evaluate, EvalOptions, EvaluationReport, GoldAnnotation, GoldSpan, Strategy};
use crate::span::Span;

pub struct Pan13Corpus {
    pub documents: Vec<Document>,
    pub gold: Vec<GoldAnnotation>,
}

fn strategy_of(dir_name: &str) -> Option<Strategy> {
    let table = [
        ("no-plagiarism", Strategy::NoPlagiarism),
        ("no-obfuscation", Strategy::None),
        ("random-obfuscation", Strategy::Random),
        ("translation-obfuscation", Strategy::Translation),
        ("summary-obfuscation", Strategy::Summary),
    ];
    table
        .iter()
        .find(|(needle, _)| dir_name.contains(needle))
        .map(|(_, s)| *s)
}

struct Feature {
    this: Span,
    source: Span,
}

fn parse_features(xml: &str, feature_re: &Regex, attr_re: &Regex) -> Vec<Feature> {
    feature_re
        .find_iter(xml)
        .filter_map(|m| {
            let attrs: BTreeMap<&str, &str> = attr_re
                .captures_iter(m.as_str())
                .map(|c| (c.get(1).unwrap().as_str(), c.get(2).unwrap().as_str()))
                .collect();
            if attrs.get("name") != Some(&"plagiarism") {
                return None;
            }
            let num = |k: &str| attrs.get(k).and_then(|v| v.parse::<usize>().ok());
            let (to, tl) = (num("this_offset")?, num("this_length")?);
            let (so, sl) = (num("source_offset")?, num("source_length")?);
            Some(Feature {
                this: Span::new(to, to + tl),
                source: Span::new(so, so + sl),
            })
        })
        .collect()
}

fn read_doc(path: &Path) -> Result<Document> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let text = String::from_utf8_lossy(&bytes);
    let name = path
        .file_name()
        .and_then(|n| n.to_str())
        .unwrap_or_default()
        .to_owned();
    Ok(normalize(&RawDocument::new(name, text.into_owned())))
}

pub fn load(root: &Path) -> Result<Pan13Corpus> {
    let feature_re = Regex::new(r"<feature\b[^>]*>").expect("regex");
    let attr_re = Regex::new(r#"(\w+)="([^"]*)""#).expect("regex");

    let mut pairs: Vec<(String, String, Strategy, Vec<Feature>)> = Vec::new();
    let mut entries: Vec<_> = std::fs::read_dir(root)
        .map_err(|e| Error::io(root, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_dir())
        .collect();
    entries.sort();
    for dir in entries {
        let Some(strategy) = dir.file_name().and_then(|n| n.to_str()).and_then(strategy_of) else {
            continue;
        };
        let mut files: Vec<_> = std::fs::read_dir(&dir)
            .map_err(|e| Error::io(&dir, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().and_then(|e| e.to_str()) == Some("xml"))
            .collect();
        files.sort();
        for file in files {
            let stem = file.file_stem().and_then(|s| s.to_str()).unwrap_or_default();
            let Some((susp, src)) = stem.split_once("-source-document") else {
                continue;
            };
            let xml = std::fs::read_to_string(&file).map_err(|e| Error::io(&file, e))?;
            pairs.push((
                format!("{susp}.txt"),
                format!("source-document{src}.txt"),
                strategy,
                parse_features(&xml, &feature_re, &attr_re),
            ));
        }
    }

    let mut names: Vec<(&str, &str)> = Vec::new();
    for (susp, src, _, _) in &pairs {
        names.push(("susp", susp));
        names.push(("src", src));
    }
    names.sort();
    names.dedup();
    let documents: Vec<Document> = names
        .par_iter()
        .map(|(sub, name)| read_doc(&root.join(sub).join(name)))
        .collect::<Result<_>>()?;
    let by_name: BTreeMap<&str, &Document> = documents.iter().map(|d| (d.doi.as_str(), d)).collect();

    let gold = pairs
        .iter()
        .map(|(susp, src, strategy, features)| {
            let (ds, dt) = (by_name[src.as_str()], by_name[susp.as_str()]);
            let spans = features
                .iter()
                .filter_map(|f| {
                    Some(GoldSpan::new(
                        ds.raw_to_normalized(f.source)?,
                        dt.raw_to_normalized(f.this)?,
                    ))
                })
                .collect();
            // "source-document…" sorts before "suspicious-document…", so the source is side a.
            GoldAnnotation {
                pair_id: format!("{susp}|{src}"),
                doi_a: src.clone(),
                doi_b: susp.clone(),
                spans,
                strategy: *strategy,
            }
        })
        .collect();

    Ok(Pan13Corpus { documents, gold })
}

/// Aligns every annotated pair and scores the detections.
pub fn evaluate_corpus(corpus: &Pan13Corpus, params: &AlignParams, opts: &EvalOptions) -> Result<EvaluationReport> {
    let by_name: BTreeMap<&str, &Document> = corpus.documents.iter().map(|d| (d.doi.as_str(), d)).collect();
    let detected = corpus
        .gold
        .par_iter()
        .map(|g| align_pair(by_name[g.doi_a.as_str()], by_name[g.doi_b.as_str()], params))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect::<Vec<_>>();
    evaluate(&corpus.gold, &detected, opts)
}
