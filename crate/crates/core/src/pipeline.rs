//! End-to-end runs: ingest, retrieve, align, emit.
//!
//! Retrieval results are checkpointed as a candidate file plus a small JSON
//! marker carrying a fingerprint of the inputs and retrieval parameters. A
//! resumed run only reuses the checkpoint if the fingerprint matches.

use std::collections::HashMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alignment::{align_pair, AlignParams};
use crate::case::{run_namespace, OutputMode, ReuseCase};
use crate::error::{Error, Result};
use crate::hash::{fmix64, hash_str};
use crate::ingest::{load_corpus, normalize, within_word_bounds, Document, PublicationRecord};
use crate::jsonl::write_jsonl;
use crate::retrieval::{read_candidates, retrieve, write_candidates, CandidatePair, RetrievalMode, RetrievalParams};

pub const CASES_FILE: &str = "cases.jsonl";
pub const PUBLICATIONS_FILE: &str = "publications.jsonl";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const CANDIDATES_FILE: &str = "candidates.tsv";
pub const CHECKPOINT_FILE: &str = "checkpoint.json";

/// Candidate pairs aligned per work unit.
const CHUNK: usize = 256;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub input: PathBuf,
    pub output: PathBuf,
    pub checkpoint_dir: Option<PathBuf>,
    pub min_words: usize,
    pub max_words: usize,
    pub mode: RetrievalMode,
    pub n_passage: usize,
    pub m: usize,
    pub j_min: usize,
    /// Zero disables the document-frequency cap.
    pub df_cap: usize,
    pub n_gram: usize,
    pub k: usize,
    pub delta: usize,
    pub min_seeds: usize,
    pub output_mode: OutputMode,
    /// `None` uses all available cores. Not written to the manifest: outputs
    /// do not depend on it.
    #[serde(skip_serializing)]
    pub workers: Option<usize>,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let r = RetrievalParams::default();
        let a = AlignParams::default();
        RunConfig {
            input: PathBuf::new(),
            output: PathBuf::new(),
            checkpoint_dir: None,
            min_words: crate::ingest::MIN_WORDS,
            max_words: crate::ingest::MAX_WORDS,
            mode: r.mode,
            n_passage: r.n_passage,
            m: r.m,
            j_min: r.j_min,
            df_cap: r.df_cap.unwrap_or(0),
            n_gram: a.n_gram,
            k: a.k,
            delta: a.delta,
            min_seeds: a.min_seeds,
            output_mode: OutputMode::Full,
            workers: None,
            seed: 0,
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::InvalidParam(format!("bad value {value:?} for {key}")))
}

impl RunConfig {
    /// Sets one parameter by its config-file key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "input" => self.input = value.into(),
            "output" => self.output = value.into(),
            "checkpoint_dir" => self.checkpoint_dir = Some(value.into()),
            "min_words" => self.min_words = parse(key, value)?,
            "max_words" => self.max_words = parse(key, value)?,
            "mode" | "retrieval_mode" => self.mode = value.parse()?,
            "n_passage" => self.n_passage = parse(key, value)?,
            "m" => self.m = parse(key, value)?,
            "j_min" => self.j_min = parse(key, value)?,
            "df_cap" => self.df_cap = parse(key, value)?,
            "n_gram" => self.n_gram = parse(key, value)?,
            "k" => self.k = parse(key, value)?,
            "delta" => self.delta = parse(key, value)?,
            "min_seeds" => self.min_seeds = parse(key, value)?,
            "output_mode" => self.output_mode = value.parse()?,
            "workers" => self.workers = Some(parse(key, value)?),
            "seed" => self.seed = parse(key, value)?,
            other => return Err(Error::InvalidParam(format!("unknown config key {other:?}"))),
        }
        Ok(())
    }

    /// Applies a `key = value` file. Blank lines and `#` comments are ignored.
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(Error::Record {
                    path: path.into(),
                    line: i + 1,
                    message: "expected key = value".into(),
                });
            };
            self.set(k.trim(), v.trim()).map_err(|e| Error::Record {
                path: path.into(),
                line: i + 1,
                message: e.to_string(),
            })?;
        }
        Ok(())
    }

    pub fn retrieval_params(&self) -> RetrievalParams {
        RetrievalParams {
            mode: self.mode,
            n_passage: self.n_passage,
            m: self.m,
            j_min: self.j_min,
            df_cap: (self.df_cap > 0).then_some(self.df_cap),
            seed: self.seed,
        }
    }

    pub fn align_params(&self) -> AlignParams {
        AlignParams {
            n_gram: self.n_gram,
            k: self.k,
            delta: self.delta,
            min_seeds: self.min_seeds,
            namespace: run_namespace(self.seed),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParam(m.into()));
        if self.min_words > self.max_words {
            return bad("min_words exceeds max_words");
        }
        if self.n_passage == 0 || self.m == 0 || self.j_min == 0 {
            return bad("n_passage, m and j_min must be >= 1");
        }
        if self.workers == Some(0) {
            return bad("workers must be >= 1");
        }
        self.align_params().validate()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CorpusCounts {
    pub records: usize,
    pub malformed: usize,
    pub duplicates: usize,
    pub filtered_out: usize,
    pub documents: usize,
}

/// Loads, normalizes and length-filters a corpus. Documents come back sorted by doi.
pub fn load_documents(path: &Path, min_words: usize, max_words: usize) -> Result<(Vec<Document>, CorpusCounts)> {
    use crate::ingest::DiagnosticKind;
    let loaded = load_corpus(path)?;
    let mut counts = CorpusCounts {
        records: loaded.documents.len(),
        ..Default::default()
    };
    for d in &loaded.diagnostics {
        match d.kind {
            DiagnosticKind::Malformed(_) => counts.malformed += 1,
            DiagnosticKind::Duplicate(_) => counts.duplicates += 1,
        }
    }
    let mut docs: Vec<Document> = loaded
        .documents
        .par_iter()
        .map(normalize)
        .filter(|d| within_word_bounds(d, min_words, max_words))
        .collect();
    docs.sort_by(|a, b| a.doi.cmp(&b.doi));
    counts.documents = docs.len();
    counts.filtered_out = counts.records - docs.len();
    Ok((docs, counts))
}

/// Aligns every candidate pair, in parallel, and returns cases in output order.
/// A work unit that panics is retried once before the run fails.
pub fn align_candidates(
    docs: &[Document],
    candidates: &[CandidatePair],
    params: &AlignParams,
    mode: OutputMode,
) -> Result<Vec<ReuseCase>> {
    params.validate()?;
    let by_doi: HashMap<&str, &Document> = docs.iter().map(|d| (d.doi.as_str(), d)).collect();
    let lookup = |doi: &str| {
        by_doi
            .get(doi)
            .copied()
            .ok_or_else(|| Error::UnknownDocument(doi.to_owned()))
    };
    let run_chunk = |chunk: &[CandidatePair]| -> Result<Vec<ReuseCase>> {
        let mut out = Vec::new();
        for p in chunk {
            let (a, b) = (lookup(&p.doi_a)?, lookup(&p.doi_b)?);
            out.extend(align_pair(a, b, params)?.into_iter().map(|c| c.with_mode(mode)));
        }
        Ok(out)
    };

    let chunks: Vec<Vec<ReuseCase>> = candidates
        .par_chunks(CHUNK)
        .map(|chunk| {
            for attempt in 0..2 {
                match catch_unwind(AssertUnwindSafe(|| run_chunk(chunk))) {
                    Ok(result) => return result,
                    Err(_) => log::warn!(
                        "alignment worker panicked on {} .. {} (attempt {})",
                        chunk[0].doi_a,
                        chunk[chunk.len() - 1].doi_b,
                        attempt + 1
                    ),
                }
            }
            Err(Error::WorkerFailed {
                first: format!("{}/{}", chunk[0].doi_a, chunk[0].doi_b),
                last: format!("{}/{}", chunk[chunk.len() - 1].doi_a, chunk[chunk.len() - 1].doi_b),
            })
        })
        .collect::<Result<_>>()?;
    let mut cases: Vec<ReuseCase> = chunks.into_iter().flatten().collect();
    cases.par_sort_by(|x, y| x.sort_key().cmp(&y.sort_key()));
    Ok(cases)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct CheckpointMarker {
    fingerprint: String,
    candidates: usize,
}

/// Stable fingerprint of the filtered corpus and retrieval parameters.
fn fingerprint(docs: &[Document], params: &RetrievalParams, bounds: (usize, usize)) -> String {
    let mut acc = hash_str(&serde_json::to_string(params).expect("serializable"));
    acc = fmix64(acc ^ bounds.0 as u64) ^ fmix64(bounds.1 as u64);
    for d in docs {
        acc = fmix64(acc ^ hash_str(&d.doi));
        acc = fmix64(acc ^ hash_str(&d.normalized_text));
    }
    format!("{acc:016x}")
}

#[derive(Debug, Clone)]
pub struct RetrievalStage {
    pub documents: Vec<Document>,
    pub counts: CorpusCounts,
    pub candidates: Vec<CandidatePair>,
    pub resumed: bool,
}

/// Loads the corpus and runs (or resumes) source retrieval.
pub fn run_retrieval(config: &RunConfig) -> Result<RetrievalStage> {
    config.validate()?;
    with_workers(config.workers, || {
        let (documents, counts) = load_documents(&config.input, config.min_words, config.max_words)?;
        let params = config.retrieval_params();
        let fp = fingerprint(&documents, &params, (config.min_words, config.max_words));

        if let Some(dir) = &config.checkpoint_dir {
            let marker_path = dir.join(CHECKPOINT_FILE);
            if marker_path.exists() {
                let text = std::fs::read_to_string(&marker_path).map_err(|e| Error::io(&marker_path, e))?;
                let marker: CheckpointMarker = serde_json::from_str(&text)?;
                if marker.fingerprint != fp {
                    return Err(Error::CheckpointMismatch {
                        path: marker_path,
                        reason: format!("fingerprint {} does not match current run {fp}", marker.fingerprint),
                    });
                }
                let candidates = read_candidates(&dir.join(CANDIDATES_FILE))?;
                if candidates.len() != marker.candidates {
                    return Err(Error::CheckpointMismatch {
                        path: marker_path,
                        reason: "candidate file is incomplete".into(),
                    });
                }
                log::info!("resuming from checkpoint with {} candidate pairs", candidates.len());
                return Ok(RetrievalStage {
                    documents,
                    counts,
                    candidates,
                    resumed: true,
                });
            }
        }

        let out = retrieve(&documents, &params)?;
        if let Some(dir) = &config.checkpoint_dir {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
            write_candidates(&dir.join(CANDIDATES_FILE), &out.candidates)?;
            let marker = CheckpointMarker {
                fingerprint: fp,
                candidates: out.candidates.len(),
            };
            let path = dir.join(CHECKPOINT_FILE);
            std::fs::write(&path, serde_json::to_string_pretty(&marker)? + "\n")
                .map_err(|e| Error::io(&path, e))?;
        }
        Ok(RetrievalStage {
            documents,
            counts,
            candidates: out.candidates,
            resumed: false,
        })
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub corpus: CorpusCounts,
    pub candidate_pairs: usize,
    pub total_pairs: u64,
    pub pruning_ratio: f64,
    pub cases: usize,
    pub resumed: bool,
}

#[derive(Serialize)]
struct Manifest<'a> {
    config: &'a RunConfig,
    summary: &'a RunSummary,
}

/// `1 - candidates / C(documents, 2)`; 1.0 when there is no pair to compare.
pub fn pruning_ratio(candidates: usize, documents: usize) -> f64 {
    let total = (documents as u64) * (documents.saturating_sub(1) as u64) / 2;
    if total == 0 {
        1.0
    } else {
        1.0 - candidates as f64 / total as f64
    }
}

/// Full run. Writes the case file, publication records and a manifest into
/// `config.output`.
pub fn run_pipeline(config: &RunConfig) -> Result<RunSummary> {
    let stage = run_retrieval(config)?;
    let cases = with_workers(config.workers, || {
        align_candidates(
            &stage.documents,
            &stage.candidates,
            &config.align_params(),
            config.output_mode,
        )
    })?;

    let n = stage.documents.len();
    let summary = RunSummary {
        corpus: stage.counts.clone(),
        candidate_pairs: stage.candidates.len(),
        total_pairs: (n as u64) * (n.saturating_sub(1) as u64) / 2,
        pruning_ratio: pruning_ratio(stage.candidates.len(), n),
        cases: cases.len(),
        resumed: stage.resumed,
    };

    let out = &config.output;
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    write_jsonl(&out.join(CASES_FILE), &cases)?;
    let pubs: Vec<PublicationRecord> = stage.documents.iter().map(Document::publication).collect();
    write_jsonl(&out.join(PUBLICATIONS_FILE), &pubs)?;
    let manifest = Manifest {
        config,
        summary: &summary,
    };
    let path = out.join(MANIFEST_FILE);
    std::fs::write(&path, serde_json::to_string_pretty(&manifest)? + "\n").map_err(|e| Error::io(&path, e))?;
    Ok(summary)
}

/// Runs `f` on a dedicated pool of `workers` threads (or the global pool).
pub fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match workers {
        None => f(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("thread pool")
            .install(f),
    }
}
