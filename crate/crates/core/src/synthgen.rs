//! Synthetic corpora with planted reuse and exact ground truth.
//!
//! Background text is drawn i.i.d. from a synthetic vocabulary, so two
//! documents share no n-grams except where a passage was planted. Planted
//! passages are copied from a source document (optionally obfuscated) and
//! inserted into a target document at a token boundary.

use std::ops::Range;
use std::path::Path;

use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::RawDocument;
use crate::jsonl::write_jsonl;
use crate::metrics::{GoldAnnotation, GoldSpan, Strategy};
use crate::span::Span;

/// Per-token probabilities of the four random edits. At most one edit starts
/// at each token, so the probabilities must sum to at most 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Intensity {
    pub shuffle: f64,
    pub add: f64,
    pub delete: f64,
    pub replace: f64,
    /// Longest phrase (in tokens) an edit operates on; phrases are 1..=max_phrase.
    pub max_phrase: usize,
}

impl Intensity {
    /// Total edit probability `total`, split evenly over the four edits.
    pub fn uniform(total: f64) -> Self {
        let p = total / 4.0;
        Intensity {
            shuffle: p,
            add: p,
            delete: p,
            replace: p,
            max_phrase: 3,
        }
    }

    pub fn none() -> Self {
        Intensity::uniform(0.0)
    }

    pub fn total(&self) -> f64 {
        self.shuffle + self.add + self.delete + self.replace
    }

    pub fn validate(&self) -> Result<()> {
        let ps = [self.shuffle, self.add, self.delete, self.replace];
        if ps.iter().any(|p| !(0.0..=1.0).contains(p)) || self.total() > 1.0 + 1e-12 {
            return Err(Error::InvalidParam(
                "edit probabilities must lie in [0, 1] and sum to at most 1".into(),
            ));
        }
        if self.max_phrase == 0 {
            return Err(Error::InvalidParam("max_phrase must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Obfuscated<T> {
    pub tokens: Vec<T>,
    /// Number of edit operations applied.
    pub edits: usize,
}

/// Applies random phrase-level shuffles, insertions, deletions and
/// replacements. `fresh` draws a replacement token.
pub fn obfuscate_random<T: Clone, R: Rng>(
    tokens: &[T],
    intensity: &Intensity,
    rng: &mut R,
    mut fresh: impl FnMut(&mut R) -> T,
) -> Obfuscated<T> {
    let mut out = Vec::with_capacity(tokens.len());
    let mut edits = 0;
    let mut i = 0;
    let cut_shuffle = intensity.shuffle;
    let cut_add = cut_shuffle + intensity.add;
    let cut_delete = cut_add + intensity.delete;
    let cut_replace = cut_delete + intensity.replace;
    while i < tokens.len() {
        let u: f64 = rng.gen();
        let phrase = rng.gen_range(1..=intensity.max_phrase);
        if u < cut_shuffle {
            // Swap this phrase with the following one.
            let first = i..(i + phrase).min(tokens.len());
            let second_len = rng.gen_range(1..=intensity.max_phrase);
            let second = first.end..(first.end + second_len).min(tokens.len());
            if !second.is_empty() {
                edits += 1;
            }
            out.extend_from_slice(&tokens[second.clone()]);
            out.extend_from_slice(&tokens[first]);
            i = second.end;
        } else if u < cut_add {
            edits += 1;
            for _ in 0..phrase {
                out.push(fresh(rng));
            }
            out.push(tokens[i].clone());
            i += 1;
        } else if u < cut_delete {
            edits += 1;
            i += phrase;
        } else if u < cut_replace {
            edits += 1;
            let end = (i + phrase).min(tokens.len());
            for _ in i..end {
                out.push(fresh(rng));
            }
            i = end;
        } else {
            out.push(tokens[i].clone());
            i += 1;
        }
    }
    Obfuscated { tokens: out, edits }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Obfuscation {
    None,
    Random(Intensity),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub documents: usize,
    /// Inclusive token-count range per document.
    pub tokens_per_doc: (usize, usize),
    pub vocabulary: usize,
    /// Fraction of all document pairs that receive one planted passage.
    pub reuse_rate: f64,
    /// Inclusive planted passage length range, in tokens.
    pub passage_len: (usize, usize),
    pub obfuscation: Obfuscation,
    /// Number of reuse-free pairs listed in the gold file.
    pub negative_pairs: usize,
    pub seed: u64,
}

impl Default for GenSpec {
    fn default() -> Self {
        GenSpec {
            documents: 200,
            tokens_per_doc: (1000, 2000),
            vocabulary: 4_000_000,
            reuse_rate: 50.0 / 19_900.0,
            passage_len: (32, 160),
            obfuscation: Obfuscation::None,
            negative_pairs: 0,
            seed: 0,
        }
    }
}

fn all_pairs(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Inverse of the row-major enumeration of pairs `(i, j)`, `i < j < n`.
fn decode_pair(mut idx: usize, n: usize) -> (usize, usize) {
    let mut i = 0;
    loop {
        let row = n - 1 - i;
        if idx < row {
            return (i, i + 1 + idx);
        }
        idx -= row;
        i += 1;
    }
}

impl GenSpec {
    /// Sets `reuse_rate` so that exactly `count` pairs receive a passage.
    pub fn with_planted_pairs(mut self, count: usize) -> Self {
        self.reuse_rate = count as f64 / all_pairs(self.documents).max(1) as f64;
        self
    }

    pub fn planted_pairs(&self) -> usize {
        (self.reuse_rate * all_pairs(self.documents) as f64).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParam(m.into()));
        let (tmin, tmax) = self.tokens_per_doc;
        let (pmin, pmax) = self.passage_len;
        if self.documents == 0 || tmin == 0 || tmin > tmax {
            return bad("need documents >= 1 and 1 <= tokens_per_doc.0 <= tokens_per_doc.1");
        }
        if self.vocabulary < 2 {
            return bad("vocabulary must have at least two words");
        }
        if !(0.0..=1.0).contains(&self.reuse_rate) {
            return bad("reuse_rate must lie in [0, 1]");
        }
        if pmin == 0 || pmin > pmax {
            return bad("need 1 <= passage_len.0 <= passage_len.1");
        }
        if pmax > tmin {
            return bad("planted passage may be longer than the shortest document");
        }
        if self.planted_pairs() + self.negative_pairs > all_pairs(self.documents) {
            return bad("more planted and negative pairs than document pairs");
        }
        if let Obfuscation::Random(i) = &self.obfuscation {
            i.validate()?;
        }
        Ok(())
    }
}

/// The `i`-th vocabulary word: bijective base-26 numbering starting at "aaa".
pub fn word(i: u32) -> String {
    let mut n = i as u64 + 703;
    let mut rev = Vec::new();
    while n > 0 {
        n -= 1;
        rev.push(b'a' + (n % 26) as u8);
        n /= 26;
    }
    rev.reverse();
    String::from_utf8(rev).expect("ascii")
}

/// Document identifier of the `i`-th synthetic document.
pub fn doi(i: usize) -> String {
    format!("10.5555/synth.{i:06}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticCorpus {
    pub documents: Vec<RawDocument>,
    pub gold: Vec<GoldAnnotation>,
    /// Planted pairs that could not be placed (no free source region) or whose
    /// obfuscated passage came out empty.
    pub skipped: usize,
}

struct Plant {
    source: usize,
    source_range: Range<usize>,
    target: usize,
    target_range: Range<usize>,
}

fn pick_free(rng: &mut ChaCha8Rng, len: usize, taken: &[Range<usize>], want: usize) -> Option<usize> {
    if want > len {
        return None;
    }
    for _ in 0..64 {
        let start = rng.gen_range(0..=len - want);
        if taken.iter().all(|r| start + want <= r.start || start >= r.end) {
            return Some(start);
        }
    }
    None
}

fn pick_boundary(rng: &mut ChaCha8Rng, len: usize, taken: &[Range<usize>]) -> usize {
    loop {
        let q = rng.gen_range(0..=len);
        if taken.iter().all(|r| q <= r.start || q >= r.end) {
            return q;
        }
    }
}

/// Generates a corpus and its gold annotations. The output is a pure function of `spec`.
pub fn generate(spec: &GenSpec) -> Result<SyntheticCorpus> {
    spec.validate()?;
    let vocab = spec.vocabulary as u32;
    let mut docs: Vec<Vec<u32>> = (0..spec.documents)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            rng.set_stream(i as u64 + 1);
            let len = rng.gen_range(spec.tokens_per_doc.0..=spec.tokens_per_doc.1);
            (0..len).map(|_| rng.gen_range(0..vocab)).collect()
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let total = all_pairs(spec.documents);
    let planted = spec.planted_pairs();
    let chosen = sample(&mut rng, total, planted + spec.negative_pairs).into_vec();
    let (planted_idx, negative_idx) = chosen.split_at(planted);

    // Occupied token ranges per document, with the plant that owns them.
    let mut taken: Vec<Vec<Range<usize>>> = vec![Vec::new(); spec.documents];
    let mut plants: Vec<Plant> = Vec::new();
    let mut skipped = 0;
    for &p in planted_idx {
        let (x, y) = decode_pair(p, spec.documents);
        let (source, target) = if rng.gen::<bool>() { (x, y) } else { (y, x) };
        let len = rng.gen_range(spec.passage_len.0..=spec.passage_len.1);
        let Some(start) = pick_free(&mut rng, docs[source].len(), &taken[source], len) else {
            skipped += 1;
            continue;
        };
        let copied = &docs[source][start..start + len];
        let passage = match &spec.obfuscation {
            Obfuscation::None => copied.to_vec(),
            Obfuscation::Random(intensity) => {
                obfuscate_random(copied, intensity, &mut rng, |r| r.gen_range(0..vocab)).tokens
            }
        };
        if passage.is_empty() {
            skipped += 1;
            continue;
        }
        let at = pick_boundary(&mut rng, docs[target].len(), &taken[target]);
        let inserted = passage.len();
        docs[target].splice(at..at, passage);
        for plant in plants.iter_mut() {
            for (doc, range) in [
                (plant.source, &mut plant.source_range),
                (plant.target, &mut plant.target_range),
            ] {
                if doc == target && range.start >= at {
                    *range = range.start + inserted..range.end + inserted;
                }
            }
        }
        for r in taken[target].iter_mut() {
            if r.start >= at {
                *r = r.start + inserted..r.end + inserted;
            }
        }
        taken[source].push(start..start + len);
        taken[target].push(at..at + inserted);
        plants.push(Plant {
            source,
            source_range: start..start + len,
            target,
            target_range: at..at + inserted,
        });
    }

    // Render text and per-token character offsets.
    let rendered: Vec<(String, Vec<usize>)> = docs
        .par_iter()
        .map(|tokens| {
            let mut text = String::new();
            let mut starts = Vec::with_capacity(tokens.len() + 1);
            for (i, &t) in tokens.iter().enumerate() {
                if i > 0 {
                    text.push(' ');
                }
                starts.push(text.len());
                text.push_str(&word(t));
            }
            starts.push(text.len() + 1);
            (text, starts)
        })
        .collect();
    let char_span = |doc: usize, r: &Range<usize>| {
        let starts = &rendered[doc].1;
        Span::new(starts[r.start], starts[r.end] - 1)
    };

    let strategy = match spec.obfuscation {
        Obfuscation::None => Strategy::None,
        Obfuscation::Random(_) => Strategy::Random,
    };
    let mut gold: Vec<GoldAnnotation> = plants
        .iter()
        .map(|p| {
            let s = char_span(p.source, &p.source_range);
            let t = char_span(p.target, &p.target_range);
            let (a, b, span) = if p.source < p.target {
                (p.source, p.target, GoldSpan::new(s, t))
            } else {
                (p.target, p.source, GoldSpan::new(t, s))
            };
            annotation(a, b, vec![span], strategy)
        })
        .collect();
    gold.extend(negative_idx.iter().map(|&p| {
        let (a, b) = decode_pair(p, spec.documents);
        annotation(a, b, Vec::new(), Strategy::NoPlagiarism)
    }));
    gold.sort_by(|x, y| (&x.doi_a, &x.doi_b).cmp(&(&y.doi_a, &y.doi_b)));

    let documents = rendered
        .into_iter()
        .enumerate()
        .map(|(i, (text, _))| RawDocument::new(doi(i), text))
        .collect();
    Ok(SyntheticCorpus {
        documents,
        gold,
        skipped,
    })
}

fn annotation(a: usize, b: usize, spans: Vec<GoldSpan>, strategy: Strategy) -> GoldAnnotation {
    GoldAnnotation {
        pair_id: format!("pair-{a:06}-{b:06}"),
        doi_a: doi(a),
        doi_b: doi(b),
        spans,
        strategy,
    }
}

#[derive(Serialize)]
struct GenManifest<'a> {
    spec: &'a GenSpec,
    documents: usize,
    gold_pairs: usize,
    planted_cases: usize,
    skipped: usize,
}

/// Writes `corpus.jsonl`, `gold.jsonl` and `manifest.json` into `dir`.
pub fn write_corpus(dir: &Path, spec: &GenSpec, corpus: &SyntheticCorpus) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_jsonl(&dir.join("corpus.jsonl"), &corpus.documents)?;
    write_jsonl(&dir.join("gold.jsonl"), &corpus.gold)?;
    let manifest = GenManifest {
        spec,
        documents: corpus.documents.len(),
        gold_pairs: corpus.gold.len(),
        planted_cases: corpus.gold.iter().map(|g| g.spans.len()).sum(),
        skipped: corpus.skipped,
    };
    let path = dir.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest)? + "\n";
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))
}
