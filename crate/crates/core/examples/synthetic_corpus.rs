//! Synthetic corpora with planted reuse and exact gold annotations.
//!
//! ```text
//! cargo run --example synthetic_corpus -- /tmp/synthetic
//! ```

use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use textreuse::synthgen::{generate, word, write_corpus, GenSpec, Intensity, Obfuscation};
use textreuse::{normalize, obfuscate_random, Result};

fn main() -> Result<()> {
    let out: PathBuf = std::env::args()
        .nth(1)
        .map(Into::into)
        .unwrap_or_else(|| std::env::temp_dir().join("textreuse-synthetic"));

    // Random obfuscation on its own.
    let passage: Vec<u32> = (0..20).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let edited = obfuscate_random(&passage, &Intensity::uniform(0.3), &mut rng, |_| 999_999);
    let show = |ids: &[u32]| ids.iter().map(|&i| word(i)).collect::<Vec<_>>().join(" ");
    println!("original:   {}", show(&passage));
    println!("obfuscated: {} ({} edits)", show(&edited.tokens), edited.edits);

    let spec = GenSpec {
        documents: 100,
        obfuscation: Obfuscation::Random(Intensity::uniform(0.1)),
        negative_pairs: 10,
        seed: 42,
        ..GenSpec::default()
    }
    .with_planted_pairs(20);
    let corpus = generate(&spec)?;
    write_corpus(&out, &spec, &corpus)?;
    println!(
        "{} documents, {} gold pairs ({} skipped) written to {}",
        corpus.documents.len(),
        corpus.gold.len(),
        corpus.skipped,
        out.display()
    );

    let g = corpus.gold.iter().find(|g| !g.spans.is_empty()).expect("planted pair");
    let doc = |doi: &str| normalize(corpus.documents.iter().find(|d| d.doi == doi).unwrap());
    let span = g.spans[0];
    println!("{} ({:?})", g.pair_id, g.strategy);
    println!("  a: {}", doc(&g.doi_a).slice(span.span_a()));
    println!("  b: {}", doc(&g.doi_b).slice(span.span_b()));
    Ok(())
}
