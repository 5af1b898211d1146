//! Source retrieval: passage-level MinHash sketches, an inverted index over
//! sketch values, and candidate pair enumeration.
//!
//! A document pair becomes a candidate when at least one passage of each
//! shares a MinHash value. [`retrieve_candidates_exact`] is the deterministic
//! counterpart that thresholds on the number of shared distinct terms.

use std::collections::{BTreeSet, HashMap};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::ops::Range;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hash::{fmix64, hash_str, splitmix64};
use crate::ingest::{for_each_line, Document};

pub const DEFAULT_PASSAGE_LEN: usize = 50;
pub const DEFAULT_HASHES: usize = 10;
pub const DEFAULT_MIN_SHARED_TERMS: usize = 9;
pub const DEFAULT_DF_CAP: usize = 1000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Passage {
    pub doi: String,
    pub index: usize,
    pub token_range: Range<usize>,
    pub term_set: BTreeSet<String>,
}

/// Splits a document into consecutive, non-overlapping passages of
/// `n_passage` tokens. The last passage may be shorter.
pub fn chunk_passages(doc: &Document, n_passage: usize) -> Result<Vec<Passage>> {
    if n_passage == 0 {
        return Err(Error::InvalidParam("n_passage must be >= 1".into()));
    }
    Ok(passage_ranges(doc.token_count(), n_passage)
        .enumerate()
        .map(|(index, token_range)| Passage {
            doi: doc.doi.clone(),
            index,
            term_set: doc.tokens[token_range.clone()].iter().cloned().collect(),
            token_range,
        })
        .collect())
}

fn passage_ranges(len: usize, n: usize) -> impl Iterator<Item = Range<usize>> {
    (0..len).step_by(n).map(move |b| b..(b + n).min(len))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PassageSketch {
    pub doi: String,
    pub passage_index: usize,
    /// Distinct minimum hash values, sorted.
    pub hashes: Vec<u64>,
}

/// A family of `m` hash functions `h_j(w) = fmix64(xxh3(w) ^ s_j)` with the
/// per-function salts `s_j` expanded from one seed.
#[derive(Debug, Clone)]
pub struct MinHasher {
    salts: Vec<u64>,
}

impl MinHasher {
    pub fn new(m: usize, seed: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParam("m must be >= 1".into()));
        }
        let mut state = seed;
        Ok(MinHasher {
            salts: (0..m).map(|_| splitmix64(&mut state)).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.salts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.salts.is_empty()
    }

    /// Per-function minima over the given terms, in function order.
    pub fn signature<'a>(&self, terms: impl IntoIterator<Item = &'a str>) -> Result<Vec<u64>> {
        let mut mins = vec![u64::MAX; self.salts.len()];
        let mut any = false;
        for term in terms {
            any = true;
            let base = hash_str(term);
            for (min, salt) in mins.iter_mut().zip(&self.salts) {
                let h = fmix64(base ^ salt);
                if h < *min {
                    *min = h;
                }
            }
        }
        if !any {
            return Err(Error::EmptyTermSet);
        }
        Ok(mins)
    }

    pub fn sketch(&self, passage: &Passage) -> Result<PassageSketch> {
        let mut hashes = self.signature(passage.term_set.iter().map(String::as_str))?;
        hashes.sort_unstable();
        hashes.dedup();
        Ok(PassageSketch {
            doi: passage.doi.clone(),
            passage_index: passage.index,
            hashes,
        })
    }
}

pub fn minhash_sketch(passage: &Passage, m: usize, seed: u64) -> Result<PassageSketch> {
    MinHasher::new(m, seed)?.sketch(passage)
}

/// Sketches every passage of every document in parallel. Passages with fewer
/// than two distinct terms are skipped.
pub fn sketch_documents(
    docs: &[Document],
    n_passage: usize,
    hasher: &MinHasher,
) -> Result<Vec<PassageSketch>> {
    let per_doc: Vec<Vec<PassageSketch>> = docs
        .par_iter()
        .map(|doc| {
            chunk_passages(doc, n_passage)?
                .iter()
                .filter(|p| p.term_set.len() >= 2)
                .map(|p| hasher.sketch(p))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(per_doc.into_iter().flatten().collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Posting {
    pub doc: u32,
    pub passage: u32,
}

/// A hash value whose postings were dropped for exceeding the document-frequency cap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DroppedPosting {
    pub hash: u64,
    pub documents: usize,
}

/// Immutable mapping from sketch value to the passages that produced it.
#[derive(Debug, Clone, Default)]
pub struct InvertedIndex {
    dois: Vec<String>,
    postings: Vec<(u64, Vec<Posting>)>,
    dropped: Vec<DroppedPosting>,
}

impl InvertedIndex {
    pub fn dois(&self) -> &[String] {
        &self.dois
    }

    pub fn doi(&self, doc: u32) -> &str {
        &self.dois[doc as usize]
    }

    /// Postings for `hash`, sorted by doi then passage.
    pub fn get(&self, hash: u64) -> Option<&[Posting]> {
        self.postings
            .binary_search_by_key(&hash, |(h, _)| *h)
            .ok()
            .map(|i| self.postings[i].1.as_slice())
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, &[Posting])> {
        self.postings.iter().map(|(h, p)| (*h, p.as_slice()))
    }

    pub fn len(&self) -> usize {
        self.postings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.postings.is_empty()
    }

    pub fn entry_count(&self) -> usize {
        self.postings.iter().map(|(_, p)| p.len()).sum()
    }

    pub fn dropped(&self) -> &[DroppedPosting] {
        &self.dropped
    }
}

/// Builds the inverted index. Hash values posted by more than `df_cap`
/// distinct documents are dropped and reported.
pub fn build_index(
    sketches: impl IntoIterator<Item = PassageSketch>,
    df_cap: Option<usize>,
) -> InvertedIndex {
    let sketches: Vec<PassageSketch> = sketches.into_iter().collect();
    let dois: Vec<String> = sketches
        .iter()
        .map(|s| s.doi.as_str())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .map(str::to_owned)
        .collect();
    let doc_id: HashMap<&str, u32> = dois
        .iter()
        .enumerate()
        .map(|(i, d)| (d.as_str(), i as u32))
        .collect();

    let mut entries: Vec<(u64, Posting)> = sketches
        .iter()
        .flat_map(|s| {
            let posting = Posting {
                doc: doc_id[s.doi.as_str()],
                passage: s.passage_index as u32,
            };
            s.hashes.iter().map(move |&h| (h, posting))
        })
        .collect();
    entries.par_sort_unstable();
    entries.dedup();

    let mut postings = Vec::new();
    let mut dropped = Vec::new();
    for group in entries.chunk_by(|a, b| a.0 == b.0) {
        let hash = group[0].0;
        let list: Vec<Posting> = group.iter().map(|(_, p)| *p).collect();
        if let Some(cap) = df_cap {
            let documents = 1 + list.windows(2).filter(|w| w[0].doc != w[1].doc).count();
            if documents > cap {
                log::warn!("dropping hash {hash:016x}: posted by {documents} documents (cap {cap})");
                dropped.push(DroppedPosting { hash, documents });
                continue;
            }
        }
        postings.push((hash, list));
    }

    InvertedIndex {
        dois,
        postings,
        dropped,
    }
}

/// An unordered document pair in canonical order (`doi_a < doi_b`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CandidatePair {
    pub doi_a: String,
    pub doi_b: String,
    pub evidence: u64,
}

impl CandidatePair {
    pub fn new(x: &str, y: &str, evidence: u64) -> Self {
        let (a, b) = if x <= y { (x, y) } else { (y, x) };
        CandidatePair {
            doi_a: a.to_owned(),
            doi_b: b.to_owned(),
            evidence,
        }
    }
}

type PairCounts = HashMap<(u32, u32), u64>;

fn merge_counts(mut a: PairCounts, b: PairCounts) -> PairCounts {
    if a.len() < b.len() {
        return merge_counts(b, a);
    }
    for (k, v) in b {
        *a.entry(k).or_default() += v;
    }
    a
}

fn into_pairs(counts: PairCounts, doi: impl Fn(u32) -> String) -> Vec<CandidatePair> {
    let mut pairs: Vec<CandidatePair> = counts
        .into_iter()
        .map(|((a, b), evidence)| CandidatePair {
            doi_a: doi(a),
            doi_b: doi(b),
            evidence,
        })
        .collect();
    pairs.sort();
    pairs
}

/// Every document pair co-occurring in at least one posting list. Evidence
/// counts the distinct (hash, passage pair) co-occurrences.
pub fn retrieve_candidates(index: &InvertedIndex) -> Vec<CandidatePair> {
    let counts = index
        .postings
        .par_iter()
        .fold(PairCounts::new, |mut acc, (_, list)| {
            for (i, p) in list.iter().enumerate() {
                // Postings are sorted by doc, so later entries never precede p.
                for q in &list[i + 1..] {
                    if q.doc != p.doc {
                        *acc.entry((p.doc, q.doc)).or_default() += 1;
                    }
                }
            }
            acc
        })
        .reduce(PairCounts::new, merge_counts);
    into_pairs(counts, |d| index.doi(d).to_owned())
}

/// Exact retrieval: a pair is a candidate iff some passage of one shares at
/// least `j_min` distinct terms with some passage of the other. Evidence is the
/// number of such passage pairs.
pub fn retrieve_candidates_exact(
    docs: &[Document],
    n_passage: usize,
    j_min: usize,
) -> Result<Vec<CandidatePair>> {
    if n_passage == 0 || j_min == 0 {
        return Err(Error::InvalidParam(
            "n_passage and j_min must be >= 1".into(),
        ));
    }
    let mut order: Vec<usize> = (0..docs.len()).collect();
    order.sort_by(|&a, &b| docs[a].doi.cmp(&docs[b].doi));

    // Global passage id -> owning document (in doi order).
    let mut passage_doc: Vec<u32> = Vec::new();
    let mut term_postings: HashMap<&str, Vec<u32>> = HashMap::new();
    for (rank, &d) in order.iter().enumerate() {
        let doc = &docs[d];
        for range in passage_ranges(doc.token_count(), n_passage) {
            let pid = passage_doc.len() as u32;
            passage_doc.push(rank as u32);
            let terms: BTreeSet<&str> = doc.tokens[range].iter().map(String::as_str).collect();
            for t in terms {
                term_postings.entry(t).or_default().push(pid);
            }
        }
    }

    let lists: Vec<&Vec<u32>> = term_postings.values().collect();
    let shared: HashMap<(u32, u32), u64> = lists
        .par_iter()
        .fold(HashMap::new, |mut acc, list| {
            for (i, &p) in list.iter().enumerate() {
                for &q in &list[i + 1..] {
                    if passage_doc[p as usize] != passage_doc[q as usize] {
                        *acc.entry((p, q)).or_default() += 1;
                    }
                }
            }
            acc
        })
        .reduce(HashMap::new, merge_counts);

    let mut counts = PairCounts::new();
    for ((p, q), n) in shared {
        if n as usize >= j_min {
            let (a, b) = (passage_doc[p as usize], passage_doc[q as usize]);
            *counts.entry((a.min(b), a.max(b))).or_default() += 1;
        }
    }
    Ok(into_pairs(counts, |r| docs[order[r as usize]].doi.clone()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RetrievalMode {
    MinHash,
    Exact,
}

impl std::str::FromStr for RetrievalMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "minhash" => Ok(RetrievalMode::MinHash),
            "exact" => Ok(RetrievalMode::Exact),
            other => Err(Error::InvalidParam(format!("unknown retrieval mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetrievalParams {
    pub mode: RetrievalMode,
    pub n_passage: usize,
    pub m: usize,
    pub j_min: usize,
    pub df_cap: Option<usize>,
    pub seed: u64,
}

impl Default for RetrievalParams {
    fn default() -> Self {
        RetrievalParams {
            mode: RetrievalMode::MinHash,
            n_passage: DEFAULT_PASSAGE_LEN,
            m: DEFAULT_HASHES,
            j_min: DEFAULT_MIN_SHARED_TERMS,
            df_cap: Some(DEFAULT_DF_CAP),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct RetrievalOutput {
    pub candidates: Vec<CandidatePair>,
    pub sketches: usize,
    pub dropped_hashes: usize,
}

/// Runs source retrieval over a normalized corpus with the configured mode.
pub fn retrieve(docs: &[Document], params: &RetrievalParams) -> Result<RetrievalOutput> {
    match params.mode {
        RetrievalMode::MinHash => {
            let hasher = MinHasher::new(params.m, params.seed)?;
            let sketches = sketch_documents(docs, params.n_passage, &hasher)?;
            let n = sketches.len();
            let index = build_index(sketches, params.df_cap);
            Ok(RetrievalOutput {
                candidates: retrieve_candidates(&index),
                sketches: n,
                dropped_hashes: index.dropped().len(),
            })
        }
        RetrievalMode::Exact => Ok(RetrievalOutput {
            candidates: retrieve_candidates_exact(docs, params.n_passage, params.j_min)?,
            sketches: 0,
            dropped_hashes: 0,
        }),
    }
}

/// Writes candidates as `doi_a<TAB>doi_b<TAB>evidence` lines.
pub fn write_candidates(path: &Path, pairs: &[CandidatePair]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for p in pairs {
        writeln!(w, "{}\t{}\t{}", p.doi_a, p.doi_b, p.evidence).map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_candidates(path: &Path) -> Result<Vec<CandidatePair>> {
    let mut out = Vec::new();
    let mut err = None;
    for_each_line(path, |line, text| {
        if err.is_some() {
            return;
        }
        let fields: Vec<&str> = text.split('\t').collect();
        match fields.as_slice() {
            [a, b, e] if a < b => match e.parse() {
                Ok(evidence) => out.push(CandidatePair {
                    doi_a: (*a).to_owned(),
                    doi_b: (*b).to_owned(),
                    evidence,
                }),
                Err(_) => {
                    err = Some(Error::Record {
                        path: path.into(),
                        line,
                        message: format!("bad evidence {e:?}"),
                    })
                }
            },
            _ => {
                err = Some(Error::Record {
                    path: path.into(),
                    line,
                    message: "expected doi_a<TAB>doi_b<TAB>evidence with doi_a < doi_b".into(),
                })
            }
        }
    })?;
    match err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}
