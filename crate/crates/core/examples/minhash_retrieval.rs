//! Source retrieval: passage sketches, the inverted index and candidate pairs,
//! compared with exact shared-term retrieval.
//!
//! ```text
//! cargo run --release --example minhash_retrieval
//! ```

use std::time::Instant;

use textreuse::pipeline::pruning_ratio;
use textreuse::retrieval::{build_index, retrieve_candidates, sketch_documents, MinHasher};
use textreuse::synthgen::{generate, GenSpec};
use textreuse::{normalize, retrieve_candidates_exact, Document, Result};

fn main() -> Result<()> {
    let spec = GenSpec {
        documents: 300,
        ..GenSpec::default()
    }
    .with_planted_pairs(30);
    let corpus = generate(&spec)?;
    let docs: Vec<Document> = corpus.documents.iter().map(normalize).collect();

    let start = Instant::now();
    let hasher = MinHasher::new(10, 0)?;
    let sketches = sketch_documents(&docs, 50, &hasher)?;
    let index = build_index(sketches.clone(), Some(1000));
    let candidates = retrieve_candidates(&index);
    println!(
        "minhash: {} passages, {} distinct hash values, {} candidate pairs in {:.2?}",
        sketches.len(),
        index.len(),
        candidates.len(),
        start.elapsed()
    );
    println!("pruning ratio {:.4}", pruning_ratio(candidates.len(), docs.len()));

    let found = corpus
        .gold
        .iter()
        .filter(|g| candidates.iter().any(|c| c.doi_a == g.doi_a && c.doi_b == g.doi_b))
        .count();
    println!("planted pairs retrieved: {found} of {}", corpus.gold.len());

    let mut strongest = candidates.clone();
    strongest.sort_by(|a, b| b.evidence.cmp(&a.evidence));
    for c in strongest.iter().take(5) {
        println!("  {} {} evidence {}", c.doi_a, c.doi_b, c.evidence);
    }

    let start = Instant::now();
    let exact = retrieve_candidates_exact(&docs, 50, 9)?;
    println!(
        "exact (>= 9 shared terms per passage pair): {} candidate pairs in {:.2?}",
        exact.len(),
        start.elapsed()
    );
    Ok(())
}
