//! Grid search over n-gram size, overlap and extension range.
//!
//! ```text
//! cargo run --release --example grid_search
//! ```

use textreuse::metrics::{grid_search, EvalOptions, GridRanges};
use textreuse::synthgen::{generate, GenSpec, Intensity, Obfuscation};
use textreuse::{normalize, AlignParams, Document, Result};

fn main() -> Result<()> {
    let spec = GenSpec {
        documents: 120,
        obfuscation: Obfuscation::Random(Intensity::uniform(0.1)),
        seed: 5,
        ..GenSpec::default()
    }
    .with_planted_pairs(60);
    let corpus = generate(&spec)?;
    let docs: Vec<Document> = corpus.documents.iter().map(normalize).collect();

    let ranges = GridRanges {
        n_gram: vec![4, 6, 8, 10],
        k: vec![0, 3, 5, 7],
        delta: vec![50, 250, 1000],
    };
    let rows = grid_search(&docs, &corpus.gold, &ranges, &AlignParams::default(), &EvalOptions::default())?;
    println!("rank  n_gram  k  delta  precision  recall  f0.5");
    for r in &rows {
        println!(
            "{:>4}  {:>6}  {}  {:>5}  {:>9.3}  {:>6.3}  {:.3}",
            r.rank, r.n_gram, r.k, r.delta, r.scores.precision, r.scores.recall, r.scores.f_beta
        );
    }
    Ok(())
}
