//! Character-level detection quality against gold annotations.
//!
//! Each document pair contributes the characters covered by gold spans and by
//! detections in both of its documents. Precision and recall are averaged over
//! pairs by default (macro); micro pooling is available through
//! [`EvalOptions`]. A pair whose detections (or gold spans) are empty scores 1.0
//! precision (or recall): nothing wrong was claimed (or nothing was missed).

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alignment::{align_pair, AlignParams};
use crate::case::ReuseCase;
use crate::error::{Error, Result};
use crate::ingest::Document;
use crate::span::{intersection_len, total_len, union, Span};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    None,
    NoPlagiarism,
    Random,
    Translation,
    Summary,
}

impl Strategy {
    /// Report row label.
    pub fn label(self) -> &'static str {
        match self {
            Strategy::None => "No Obfuscation",
            Strategy::NoPlagiarism => "No Plagiarism",
            Strategy::Random => "Random Obfuscation",
            Strategy::Translation => "Translation Obfuscation",
            Strategy::Summary => "Summary Obfuscation",
        }
    }

    fn row_order(self) -> u8 {
        match self {
            Strategy::None => 0,
            Strategy::NoPlagiarism => 1,
            Strategy::Random => 2,
            Strategy::Summary => 3,
            Strategy::Translation => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldSpan {
    pub begin_a: usize,
    pub end_a: usize,
    pub begin_b: usize,
    pub end_b: usize,
}

impl GoldSpan {
    pub fn new(a: Span, b: Span) -> Self {
        GoldSpan {
            begin_a: a.begin,
            end_a: a.end,
            begin_b: b.begin,
            end_b: b.end,
        }
    }

    pub fn span_a(&self) -> Span {
        Span::new(self.begin_a, self.end_a)
    }

    pub fn span_b(&self) -> Span {
        Span::new(self.begin_b, self.end_b)
    }
}

/// Ground truth for one document pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldAnnotation {
    pub pair_id: String,
    pub doi_a: String,
    pub doi_b: String,
    pub spans: Vec<GoldSpan>,
    pub strategy: Strategy,
}

impl GoldAnnotation {
    fn canonical(&self) -> ((&str, &str), Vec<(Span, Span)>) {
        let swap = self.doi_a > self.doi_b;
        let spans = self
            .spans
            .iter()
            .map(|s| {
                if swap {
                    (s.span_b(), s.span_a())
                } else {
                    (s.span_a(), s.span_b())
                }
            })
            .collect();
        let key = if swap {
            (self.doi_b.as_str(), self.doi_a.as_str())
        } else {
            (self.doi_a.as_str(), self.doi_b.as_str())
        };
        (key, spans)
    }
}

fn case_spans(c: &ReuseCase) -> ((&str, &str), (Span, Span)) {
    if c.doi_a <= c.doi_b {
        ((&c.doi_a, &c.doi_b), (c.span_a(), c.span_b()))
    } else {
        ((&c.doi_b, &c.doi_a), (c.span_b(), c.span_a()))
    }
}

/// Raw character and case counts for one pair.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PairCounts {
    pub gold_chars: usize,
    pub detected_chars: usize,
    pub overlap_chars: usize,
    pub gold_cases: usize,
    pub detected_cases: usize,
    /// Gold cases overlapped by at least one detection.
    pub found_cases: usize,
    /// Sum over found gold cases of the number of detections overlapping each.
    pub covering_detections: usize,
}

impl PairCounts {
    pub fn precision(&self) -> f64 {
        ratio(self.overlap_chars, self.detected_chars)
    }

    pub fn recall(&self) -> f64 {
        ratio(self.overlap_chars, self.gold_chars)
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        1.0
    } else {
        num as f64 / den as f64
    }
}

fn side_union(spans: &[(Span, Span)], side_a: bool) -> Vec<Span> {
    union(spans.iter().map(|(a, b)| if side_a { *a } else { *b }))
}

/// Counts for one pair from its gold and detected span pairs.
pub fn score_pair(gold: &[(Span, Span)], detected: &[(Span, Span)]) -> PairCounts {
    let (ga, gb) = (side_union(gold, true), side_union(gold, false));
    let (da, db) = (side_union(detected, true), side_union(detected, false));
    let overlaps = |g: &(Span, Span), d: &(Span, Span)| g.0.overlaps(&d.0) && g.1.overlaps(&d.1);
    let mut found_cases = 0;
    let mut covering_detections = 0;
    for g in gold {
        let n = detected.iter().filter(|d| overlaps(g, d)).count();
        if n > 0 {
            found_cases += 1;
            covering_detections += n;
        }
    }
    PairCounts {
        gold_chars: total_len(&ga) + total_len(&gb),
        detected_chars: total_len(&da) + total_len(&db),
        overlap_chars: intersection_len(&ga, &da) + intersection_len(&gb, &db),
        gold_cases: gold.len(),
        detected_cases: detected.len(),
        found_cases,
        covering_detections,
    }
}

/// Weighted harmonic mean of precision and recall; 0 when both are 0.
pub fn f_beta(precision: f64, recall: f64, beta: f64) -> f64 {
    let b2 = beta * beta;
    let den = b2 * precision + recall;
    if den == 0.0 {
        0.0
    } else {
        (1.0 + b2) * precision * recall / den
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Averaging {
    #[default]
    Macro,
    Micro,
}

/// What to do with detections on pairs that have no gold annotation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum UnknownPairs {
    #[default]
    Reject,
    /// Score them as additional no-plagiarism pairs.
    AsNegative,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalOptions {
    pub beta: f64,
    pub averaging: Averaging,
    pub unknown_pairs: UnknownPairs,
    /// Report `plagdet = F / log2(1 + granularity)` alongside the scores.
    pub fold_granularity: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            beta: 0.5,
            averaging: Averaging::Macro,
            unknown_pairs: UnknownPairs::Reject,
            fold_granularity: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scores {
    pub precision: f64,
    pub recall: f64,
    pub f_beta: f64,
    pub granularity: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plagdet: Option<f64>,
    pub pairs: usize,
    pub gold_cases: usize,
    pub detected_cases: usize,
}

fn aggregate(items: &[PairCounts], opts: &EvalOptions) -> Scores {
    let sum = |f: fn(&PairCounts) -> usize| items.iter().map(f).sum::<usize>();
    let (precision, recall) = match opts.averaging {
        _ if items.is_empty() => (1.0, 1.0),
        Averaging::Macro => {
            let n = items.len() as f64;
            (
                items.iter().map(PairCounts::precision).sum::<f64>() / n,
                items.iter().map(PairCounts::recall).sum::<f64>() / n,
            )
        }
        Averaging::Micro => {
            let overlap = sum(|c| c.overlap_chars);
            (
                ratio(overlap, sum(|c| c.detected_chars)),
                ratio(overlap, sum(|c| c.gold_chars)),
            )
        }
    };
    let found = sum(|c| c.found_cases);
    let granularity = if found == 0 {
        1.0
    } else {
        sum(|c| c.covering_detections) as f64 / found as f64
    };
    let f = f_beta(precision, recall, opts.beta);
    Scores {
        precision,
        recall,
        f_beta: f,
        granularity,
        plagdet: opts.fold_granularity.then(|| f / (1.0 + granularity).log2()),
        pairs: items.len(),
        gold_cases: sum(|c| c.gold_cases),
        detected_cases: sum(|c| c.detected_cases),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub overall: Scores,
    pub per_strategy: BTreeMap<Strategy, Scores>,
}

/// Per-pair counts tagged with each pair's strategy.
pub fn pair_counts(
    gold: &[GoldAnnotation],
    detected: &[ReuseCase],
    unknown: UnknownPairs,
) -> Result<Vec<(Strategy, PairCounts)>> {
    type Key<'a> = (&'a str, &'a str);
    let mut pairs: BTreeMap<Key, (Strategy, Vec<(Span, Span)>, Vec<(Span, Span)>)> =
        BTreeMap::new();
    for g in gold {
        let (key, spans) = g.canonical();
        let entry = pairs
            .entry(key)
            .or_insert_with(|| (g.strategy, Vec::new(), Vec::new()));
        entry.1.extend(spans);
    }
    for c in detected {
        let (key, spans) = case_spans(c);
        match pairs.get_mut(&key) {
            Some(entry) => entry.2.push(spans),
            None => match unknown {
                UnknownPairs::Reject => {
                    return Err(Error::UnknownPair {
                        doi_a: key.0.to_owned(),
                        doi_b: key.1.to_owned(),
                    })
                }
                UnknownPairs::AsNegative => {
                    pairs
                        .entry(key)
                        .or_insert_with(|| (Strategy::NoPlagiarism, Vec::new(), Vec::new()))
                        .2
                        .push(spans);
                }
            },
        }
    }
    let entries: Vec<_> = pairs.into_values().collect();
    Ok(entries
        .par_iter()
        .map(|(s, g, d)| (*s, score_pair(g, d)))
        .collect())
}

pub fn evaluate(
    gold: &[GoldAnnotation],
    detected: &[ReuseCase],
    opts: &EvalOptions,
) -> Result<EvaluationReport> {
    let counts = pair_counts(gold, detected, opts.unknown_pairs)?;
    let all: Vec<PairCounts> = counts.iter().map(|(_, c)| *c).collect();
    let mut by_strategy: BTreeMap<Strategy, Vec<PairCounts>> = BTreeMap::new();
    for (s, c) in &counts {
        by_strategy.entry(*s).or_default().push(*c);
    }
    Ok(EvaluationReport {
        overall: aggregate(&all, opts),
        per_strategy: by_strategy
            .into_iter()
            .map(|(s, v)| (s, aggregate(&v, opts)))
            .collect(),
    })
}

/// Macro-averaged character precision and recall.
pub fn char_precision_recall(gold: &[GoldAnnotation], detected: &[ReuseCase]) -> Result<(f64, f64)> {
    let r = evaluate(gold, detected, &EvalOptions::default())?;
    Ok((r.overall.precision, r.overall.recall))
}

/// Mean number of detections overlapping each detected gold case.
pub fn granularity(gold: &[GoldAnnotation], detected: &[ReuseCase]) -> Result<f64> {
    Ok(evaluate(gold, detected, &EvalOptions::default())?
        .overall
        .granularity)
}

#[derive(Serialize)]
struct ReportLine<'a> {
    scope: &'a str,
    #[serde(flatten)]
    scores: &'a Scores,
}

impl EvaluationReport {
    fn rows(&self) -> Vec<(&'static str, &Scores)> {
        let mut rows: Vec<(Strategy, &Scores)> =
            self.per_strategy.iter().map(|(s, v)| (*s, v)).collect();
        rows.sort_by_key(|(s, _)| s.row_order());
        let mut out: Vec<(&'static str, &Scores)> =
            rows.into_iter().map(|(s, v)| (s.label(), v)).collect();
        out.push(("Entire Corpus", &self.overall));
        out
    }

    /// One JSON object per row.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for (scope, scores) in self.rows() {
            out.push_str(&serde_json::to_string(&ReportLine { scope, scores }).expect("serializable"));
            out.push('\n');
        }
        out
    }

    /// Aligned plain-text table, one row per strategy plus the overall row.
    pub fn to_table(&self) -> String {
        let rows = self.rows();
        let width = rows.iter().map(|(l, _)| l.len()).max().unwrap_or(0);
        let plagdet = self.overall.plagdet.is_some();
        let mut out = String::new();
        let _ = write!(
            out,
            "{:width$}  {:>9}  {:>6}  {:>5}  {:>11}",
            "", "Precision", "Recall", "F0.5", "Granularity"
        );
        if plagdet {
            let _ = write!(out, "  {:>7}", "Plagdet");
        }
        out.push('\n');
        for (i, (label, s)) in rows.iter().enumerate() {
            if i + 1 == rows.len() {
                out.push_str(&"-".repeat(width + 41 + if plagdet { 9 } else { 0 }));
                out.push('\n');
            }
            let _ = write!(
                out,
                "{label:width$}  {:>9.2}  {:>6.2}  {:>5.2}  {:>11.2}",
                s.precision, s.recall, s.f_beta, s.granularity
            );
            if let Some(p) = s.plagdet {
                let _ = write!(out, "  {p:>7.2}");
            }
            out.push('\n');
        }
        out
    }
}

/// Parameter ranges explored by [`grid_search`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridRanges {
    pub n_gram: Vec<usize>,
    pub k: Vec<usize>,
    pub delta: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    /// Competition rank by F-score: one plus the number of strictly better rows.
    pub rank: usize,
    pub n_gram: usize,
    pub k: usize,
    pub delta: usize,
    pub scores: Scores,
}

/// Aligns every gold pair under each parameter combination and ranks the
/// combinations by F-score (ties broken by parameters, ascending).
/// Combinations with `k >= n_gram` are skipped.
pub fn grid_search(
    docs: &[Document],
    gold: &[GoldAnnotation],
    ranges: &GridRanges,
    base: &AlignParams,
    opts: &EvalOptions,
) -> Result<Vec<GridRow>> {
    if ranges.n_gram.is_empty() || ranges.k.is_empty() || ranges.delta.is_empty() {
        return Err(Error::InvalidParam("grid search ranges must be non-empty".into()));
    }
    let mut combos = Vec::new();
    for &n in &ranges.n_gram {
        for &k in &ranges.k {
            if n == 0 || k >= n {
                continue;
            }
            for &delta in &ranges.delta {
                combos.push((n, k, delta));
            }
        }
    }
    if combos.is_empty() {
        return Err(Error::InvalidParam("no valid (n_gram, k) combination".into()));
    }
    combos.sort_unstable();
    combos.dedup();

    let by_doi: HashMap<&str, &Document> = docs.iter().map(|d| (d.doi.as_str(), d)).collect();
    let lookup = |doi: &str| {
        by_doi
            .get(doi)
            .copied()
            .ok_or_else(|| Error::UnknownDocument(doi.to_owned()))
    };
    let pairs: Vec<(&Document, &Document)> = gold
        .iter()
        .map(|g| Ok((lookup(&g.doi_a)?, lookup(&g.doi_b)?)))
        .collect::<Result<_>>()?;

    let mut rows: Vec<GridRow> = combos
        .par_iter()
        .map(|&(n_gram, k, delta)| {
            let params = AlignParams {
                n_gram,
                k,
                delta,
                ..base.clone()
            };
            let detected: Vec<ReuseCase> = pairs
                .par_iter()
                .map(|(a, b)| align_pair(a, b, &params))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .flatten()
                .collect();
            let report = evaluate(gold, &detected, opts)?;
            Ok(GridRow {
                rank: 0,
                n_gram,
                k,
                delta,
                scores: report.overall,
            })
        })
        .collect::<Result<_>>()?;

    rows.sort_by(|x, y| {
        y.scores
            .f_beta
            .total_cmp(&x.scores.f_beta)
            .then((x.n_gram, x.k, x.delta).cmp(&(y.n_gram, y.k, y.delta)))
    });
    let fs: Vec<f64> = rows.iter().map(|r| r.scores.f_beta).collect();
    for r in rows.iter_mut() {
        r.rank = 1 + fs.iter().filter(|&&f| f > r.scores.f_beta).count();
    }
    Ok(rows)
}
