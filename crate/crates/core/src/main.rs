use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use textreuse::case::OutputMode;
use textreuse::ingest::RawDocument;
use textreuse::jsonl::{read_jsonl, write_jsonl};
use textreuse::metrics::{evaluate, Averaging, EvalOptions, GoldAnnotation, UnknownPairs};
use textreuse::pipeline::{align_candidates, load_documents, run_pipeline, with_workers, RunConfig};
use textreuse::retrieval::{read_candidates, retrieve, write_candidates, RetrievalMode};
use textreuse::synthgen::{generate, write_corpus, GenSpec, Intensity, Obfuscation};
use textreuse::{ReuseCase, Result};

#[derive(Parser)]
#[command(name = "textreuse", version, about = "Text reuse detection: source retrieval and text alignment")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Normalize a corpus and write it back as line-delimited records.
    Normalize {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[command(flatten)]
        params: Params,
    },
    /// Source retrieval: write candidate pairs as doi_a<TAB>doi_b<TAB>evidence.
    Retrieve {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[command(flatten)]
        params: Params,
    },
    /// Text alignment over a candidate file.
    Align {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        candidates: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[command(flatten)]
        params: Params,
    },
    /// Full run: retrieval, alignment, case file, publications and manifest.
    Pipeline {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        checkpoint_dir: Option<PathBuf>,
        #[command(flatten)]
        params: Params,
    },
    /// Score a case file against gold annotations.
    Evaluate {
        #[arg(long)]
        cases: PathBuf,
        #[arg(long)]
        gold: PathBuf,
        /// Also write one JSON line per report row here.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        micro: bool,
        /// Score detections on pairs missing from the gold file as reuse-free pairs.
        #[arg(long)]
        score_unknown_pairs: bool,
        /// Add plagdet (F divided by log2(1 + granularity)).
        #[arg(long)]
        granularity: bool,
    },
    /// Generate a synthetic corpus with planted reuse and gold annotations.
    GenCorpus {
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value_t = 200)]
        documents: usize,
        #[arg(long, default_value_t = 1000)]
        min_tokens: usize,
        #[arg(long, default_value_t = 2000)]
        max_tokens: usize,
        #[arg(long, default_value_t = 4_000_000)]
        vocabulary: usize,
        #[arg(long, default_value_t = 50)]
        planted_pairs: usize,
        #[arg(long, default_value_t = 32)]
        min_passage: usize,
        #[arg(long, default_value_t = 160)]
        max_passage: usize,
        /// Total per-token edit probability of random obfuscation (0 disables it).
        #[arg(long, default_value_t = 0.0)]
        intensity: f64,
        #[arg(long, default_value_t = 0)]
        negative_pairs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Summary statistics of a case file.
    Stats {
        #[arg(long)]
        cases: PathBuf,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args, Default)]
struct Params {
    /// key = value file applied before the flags below.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    min_words: Option<usize>,
    #[arg(long)]
    max_words: Option<usize>,
    /// minhash or exact.
    #[arg(long)]
    mode: Option<RetrievalMode>,
    #[arg(long)]
    n_passage: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    j_min: Option<usize>,
    #[arg(long)]
    df_cap: Option<usize>,
    #[arg(long)]
    n_gram: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    delta: Option<usize>,
    #[arg(long)]
    min_seeds: Option<usize>,
    /// full or metadata-only.
    #[arg(long)]
    output_mode: Option<OutputMode>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

impl Params {
    fn into_config(self) -> Result<RunConfig> {
        let mut c = RunConfig::default();
        if let Some(path) = &self.config {
            c.apply_file(path)?;
        }
        macro_rules! set {
            ($($f:ident),*) => { $( if let Some(v) = self.$f { c.$f = v; } )* };
        }
        set!(min_words, max_words, mode, n_passage, m, j_min, df_cap, n_gram, k, delta, min_seeds, output_mode, seed);
        if self.workers.is_some() {
            c.workers = self.workers;
        }
        c.validate()?;
        Ok(c)
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Normalize { input, output, params } => {
            let c = params.into_config()?;
            let (docs, counts) = load_documents(&input, c.min_words, c.max_words)?;
            let records: Vec<RawDocument> = docs
                .into_iter()
                .map(|d| RawDocument {
                    doi: d.doi,
                    text: d.normalized_text,
                    metadata: d.metadata,
                })
                .collect();
            write_jsonl(&output, &records)?;
            eprintln!("{}", serde_json::to_string(&counts)?);
        }
        Command::Retrieve { input, output, params } => {
            let c = params.into_config()?;
            let out = with_workers(c.workers, || {
                let (docs, _) = load_documents(&input, c.min_words, c.max_words)?;
                retrieve(&docs, &c.retrieval_params())
            })?;
            write_candidates(&output, &out.candidates)?;
            eprintln!("{} candidate pairs", out.candidates.len());
        }
        Command::Align {
            input,
            candidates,
            output,
            params,
        } => {
            let c = params.into_config()?;
            let cases = with_workers(c.workers, || {
                let (docs, _) = load_documents(&input, c.min_words, c.max_words)?;
                let pairs = read_candidates(&candidates)?;
                align_candidates(&docs, &pairs, &c.align_params(), c.output_mode)
            })?;
            write_jsonl(&output, &cases)?;
            eprintln!("{} cases", cases.len());
        }
        Command::Pipeline {
            input,
            output,
            checkpoint_dir,
            params,
        } => {
            let mut c = params.into_config()?;
            if let Some(i) = input {
                c.input = i;
            }
            if let Some(o) = output {
                c.output = o;
            }
            if checkpoint_dir.is_some() {
                c.checkpoint_dir = checkpoint_dir;
            }
            let summary = run_pipeline(&c)?;
            println!("{}", serde_json::to_string_pretty(&summary)?);
        }
        Command::Evaluate {
            cases,
            gold,
            report,
            micro,
            score_unknown_pairs,
            granularity,
        } => {
            let detected: Vec<ReuseCase> = read_jsonl(&cases)?;
            let gold: Vec<GoldAnnotation> = read_jsonl(&gold)?;
            let opts = EvalOptions {
                averaging: if micro { Averaging::Micro } else { Averaging::Macro },
                unknown_pairs: if score_unknown_pairs {
                    UnknownPairs::AsNegative
                } else {
                    UnknownPairs::Reject
                },
                fold_granularity: granularity,
                ..Default::default()
            };
            let r = evaluate(&gold, &detected, &opts)?;
            print!("{}", r.to_table());
            if let Some(path) = report {
                std::fs::write(&path, r.to_jsonl()).map_err(|e| textreuse::Error::Io { path, source: e })?;
            }
        }
        Command::GenCorpus {
            output,
            documents,
            min_tokens,
            max_tokens,
            vocabulary,
            planted_pairs,
            min_passage,
            max_passage,
            intensity,
            negative_pairs,
            seed,
        } => {
            let spec = GenSpec {
                documents,
                tokens_per_doc: (min_tokens, max_tokens),
                vocabulary,
                passage_len: (min_passage, max_passage),
                obfuscation: if intensity > 0.0 {
                    Obfuscation::Random(Intensity::uniform(intensity))
                } else {
                    Obfuscation::None
                },
                negative_pairs,
                seed,
                ..GenSpec::default()
            }
            .with_planted_pairs(planted_pairs);
            let corpus = generate(&spec)?;
            write_corpus(&output, &spec, &corpus)?;
            eprintln!(
                "{} documents, {} gold pairs written to {}",
                corpus.documents.len(),
                corpus.gold.len(),
                output.display()
            );
        }
        Command::Stats { cases, json } => {
            let s = textreuse::stats::stats(&cases)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&s)?);
            } else {
                print!("{}", s.to_text());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
