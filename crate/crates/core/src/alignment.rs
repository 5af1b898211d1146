//! Seed-and-extend text alignment.
//!
//! Both documents are cut into word n-grams (sliding windows of `n_gram`
//! tokens, `k` tokens of overlap). Equal n-grams found through a hash lookup,
//! and confirmed by comparing their text, become seeds. Seeds whose character
//! gap is at most `delta` in both documents are linked, and every connected
//! component with at least `min_seeds` members becomes one reuse case spanning
//! the bounding intervals of its seeds.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use uuid::Uuid;

use crate::case::{run_namespace, ReuseCase};
use crate::error::{Error, Result};
use crate::hash::hash_str;
use crate::ingest::Document;
use crate::span::Span;

pub const DEFAULT_NGRAM: usize = 8;
pub const DEFAULT_OVERLAP: usize = 7;
pub const DEFAULT_DELTA: usize = 250;
pub const DEFAULT_MIN_SEEDS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NGram {
    pub start_token: usize,
    pub char_span: Span,
    pub hash: u64,
}

fn check_window(n_gram: usize, k: usize) -> Result<()> {
    if n_gram == 0 || k >= n_gram {
        return Err(Error::InvalidParam(format!(
            "need n_gram >= 1 and 0 <= k < n_gram (got n_gram={n_gram}, k={k})"
        )));
    }
    Ok(())
}

/// Sliding word n-grams with stride `n_gram - k`.
pub fn chunk_ngrams(doc: &Document, n_gram: usize, k: usize) -> Result<Vec<NGram>> {
    check_window(n_gram, k)?;
    let len = doc.token_count();
    if len < n_gram {
        return Ok(Vec::new());
    }
    Ok((0..=len - n_gram)
        .step_by(n_gram - k)
        .map(|start| {
            let char_span = Span::new(
                doc.token_spans[start].begin,
                doc.token_spans[start + n_gram - 1].end,
            );
            NGram {
                start_token: start,
                char_span,
                hash: hash_str(doc.slice(char_span)),
            }
        })
        .collect())
}

/// A verified n-gram match between two documents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Seed {
    pub span_a: Span,
    pub span_b: Span,
}

/// All pairs of equal n-grams between `a` and `b`, ordered by position in `a`
/// then `b`. Hash hits are confirmed by text comparison.
pub fn seed_matches(a: &Document, b: &Document, n_gram: usize, k: usize) -> Result<Vec<Seed>> {
    let grams_a = chunk_ngrams(a, n_gram, k)?;
    let grams_b = chunk_ngrams(b, n_gram, k)?;
    let mut by_hash: HashMap<u64, Vec<Span>> = HashMap::with_capacity(grams_b.len());
    for g in &grams_b {
        by_hash.entry(g.hash).or_default().push(g.char_span);
    }
    let mut seeds = Vec::new();
    for g in &grams_a {
        let Some(hits) = by_hash.get(&g.hash) else {
            continue;
        };
        let text = a.slice(g.char_span);
        for &span_b in hits {
            if b.slice(span_b) == text {
                seeds.push(Seed {
                    span_a: g.char_span,
                    span_b,
                });
            }
        }
    }
    Ok(seeds)
}

/// A merged pair of aligned spans.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Alignment {
    pub span_a: Span,
    pub span_b: Span,
    pub seeds: usize,
}

impl Alignment {
    fn absorb(&mut self, other: &Alignment) {
        self.span_a = self.span_a.cover(&other.span_a);
        self.span_b = self.span_b.cover(&other.span_b);
        self.seeds += other.seeds;
    }

    fn overlaps(&self, other: &Alignment) -> bool {
        self.span_a.overlaps(&other.span_a) && self.span_b.overlaps(&other.span_b)
    }
}

struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, x: usize, y: usize) -> bool {
        let (rx, ry) = (self.find(x), self.find(y));
        if rx == ry {
            return false;
        }
        let (lo, hi) = if rx < ry { (rx, ry) } else { (ry, rx) };
        self.parent[hi] = lo;
        true
    }
}

/// Single-linkage merge of seeds. Two seeds link when their gap is at most
/// `delta` characters in document A and in document B. Clusters whose bounding
/// spans overlap in both documents are merged as well; clusters with fewer
/// than `min_seeds` seeds are dropped. Output is sorted by `(begin_a, begin_b)`.
pub fn extend(seeds: &[Seed], delta: usize, min_seeds: usize) -> Vec<Alignment> {
    let mut order: Vec<usize> = (0..seeds.len()).collect();
    order.sort_by_key(|&i| (seeds[i].span_a.begin, seeds[i].span_b.begin));

    let mut sets = DisjointSets::new(seeds.len());
    // Seeds whose A-span can still be within `delta` of a later seed.
    let mut active: Vec<usize> = Vec::new();
    for &i in &order {
        let s = &seeds[i];
        active.retain(|&j| seeds[j].span_a.end + delta >= s.span_a.begin);
        for &j in &active {
            if s.span_b.gap(&seeds[j].span_b) <= delta {
                sets.union(i, j);
            }
        }
        active.push(i);
    }

    let mut clusters: HashMap<usize, Alignment> = HashMap::new();
    for (i, s) in seeds.iter().enumerate() {
        let root = sets.find(i);
        let seed = Alignment {
            span_a: s.span_a,
            span_b: s.span_b,
            seeds: 1,
        };
        clusters
            .entry(root)
            .and_modify(|c| c.absorb(&seed))
            .or_insert(seed);
    }
    let mut merged = merge_overlapping(clusters.into_values().collect());
    merged.retain(|c| c.seeds >= min_seeds);
    merged.sort();
    merged
}

/// Merges alignments whose spans overlap in both documents until none do.
fn merge_overlapping(mut items: Vec<Alignment>) -> Vec<Alignment> {
    loop {
        items.sort();
        let mut sets = DisjointSets::new(items.len());
        let mut changed = false;
        for i in 0..items.len() {
            for j in i + 1..items.len() {
                if items[j].span_a.begin >= items[i].span_a.end {
                    break;
                }
                if items[i].overlaps(&items[j]) {
                    changed |= sets.union(i, j);
                }
            }
        }
        if !changed {
            return items;
        }
        let mut groups: HashMap<usize, Alignment> = HashMap::new();
        for (i, it) in items.iter().enumerate() {
            let root = sets.find(i);
            groups.entry(root).and_modify(|g| g.absorb(it)).or_insert(*it);
        }
        items = groups.into_values().collect();
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignParams {
    pub n_gram: usize,
    pub k: usize,
    pub delta: usize,
    pub min_seeds: usize,
    /// Namespace for case ids.
    pub namespace: Uuid,
}

impl Default for AlignParams {
    fn default() -> Self {
        AlignParams {
            n_gram: DEFAULT_NGRAM,
            k: DEFAULT_OVERLAP,
            delta: DEFAULT_DELTA,
            min_seeds: DEFAULT_MIN_SEEDS,
            namespace: run_namespace(0),
        }
    }
}

impl AlignParams {
    pub fn validate(&self) -> Result<()> {
        check_window(self.n_gram, self.k)?;
        if self.min_seeds == 0 {
            return Err(Error::InvalidParam("min_seeds must be >= 1".into()));
        }
        Ok(())
    }
}

/// Span pairs of reused text between `a` and `b` (side a is `a`).
pub fn align_spans(a: &Document, b: &Document, params: &AlignParams) -> Result<Vec<Alignment>> {
    params.validate()?;
    let seeds = seed_matches(a, b, params.n_gram, params.k)?;
    Ok(extend(&seeds, params.delta, params.min_seeds))
}

/// Full alignment of a document pair into reuse cases, sorted by `(begin_a, begin_b)`.
pub fn align_pair(a: &Document, b: &Document, params: &AlignParams) -> Result<Vec<ReuseCase>> {
    Ok(align_spans(a, b, params)?
        .into_iter()
        .map(|al| ReuseCase::build(&params.namespace, a, al.span_a, b, al.span_b))
        .collect())
}
