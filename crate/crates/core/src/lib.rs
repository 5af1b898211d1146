//! Text reuse detection over large plain-text document collections.
//!
//! The pipeline has two stages:
//!
//! 1. **Source retrieval** ([`retrieval`]): documents are cut into 50-word
//!    passages, each passage is sketched with 10 MinHash values, and any two
//!    documents with a colliding passage sketch become a candidate pair. This
//!    stage is linear in the corpus size.
//! 2. **Text alignment** ([`alignment`]): each candidate pair is compared with
//!    word 8-grams (overlap 7); matching n-grams are seeds, and seeds within
//!    250 characters of each other in both documents are merged into reuse cases.
//!
//! Cases are emitted as line-delimited JSON ([`case::ReuseCase`]) and can be
//! scored against gold annotations with character-level precision, recall and
//! F0.5 ([`metrics`]). [`synthgen`] builds corpora with planted reuse for
//! testing, and [`pipeline`] ties the stages together with checkpointing.
//!
//! See the `examples/` directory for one runnable program per capability.

pub mod alignment;
pub mod case;
pub mod error;
pub mod hash;
pub mod ingest;
pub mod jsonl;
pub mod metrics;
pub mod pan13;
pub mod pipeline;
pub mod retrieval;
pub mod span;
pub mod stats;
pub mod synthgen;

pub use alignment::{align_pair, chunk_ngrams, extend, seed_matches, AlignParams, Alignment, Seed};
pub use case::{OutputMode, ReuseCase};
pub use error::{Error, Result};
pub use ingest::{length_filter, load_corpus, normalize, Document, RawDocument};
pub use metrics::{char_precision_recall, evaluate, f_beta, granularity, grid_search, GoldAnnotation, Strategy};
pub use pipeline::{run_pipeline, RunConfig};
pub use retrieval::{
    build_index, chunk_passages, minhash_sketch, retrieve_candidates, retrieve_candidates_exact, CandidatePair,
};
pub use span::Span;
pub use synthgen::{generate, obfuscate_random, GenSpec};
