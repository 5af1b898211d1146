//! Character-level precision, recall and F0.5 against gold annotations, per
//! obfuscation strategy.
//!
//! ```text
//! cargo run --release --example evaluate
//! ```

use textreuse::metrics::{evaluate, Averaging, EvalOptions, GoldAnnotation};
use textreuse::synthgen::{generate, GenSpec, Intensity, Obfuscation};
use textreuse::{align_pair, normalize, AlignParams, Document, ReuseCase, Result};

fn corpus(seed: u64, obfuscation: Obfuscation) -> Result<(Vec<Document>, Vec<GoldAnnotation>)> {
    let spec = GenSpec {
        documents: 100,
        obfuscation,
        negative_pairs: 20,
        seed,
        ..GenSpec::default()
    }
    .with_planted_pairs(40);
    let c = generate(&spec)?;
    Ok((c.documents.iter().map(normalize).collect(), c.gold))
}

fn main() -> Result<()> {
    // Two corpora, one per strategy; dois are prefixed to keep them apart.
    let mut docs = Vec::new();
    let mut gold = Vec::new();
    for (tag, obf) in [("clean", Obfuscation::None), ("noisy", Obfuscation::Random(Intensity::uniform(0.3)))] {
        let (d, g) = corpus(1, obf)?;
        docs.extend(d.into_iter().map(|mut d| {
            d.doi = format!("{tag}/{}", d.doi);
            d
        }));
        gold.extend(g.into_iter().map(|mut g| {
            g.doi_a = format!("{tag}/{}", g.doi_a);
            g.doi_b = format!("{tag}/{}", g.doi_b);
            g
        }));
    }

    let params = AlignParams::default();
    let find = |doi: &str| docs.iter().find(|d| d.doi == doi).unwrap();
    let mut detected: Vec<ReuseCase> = Vec::new();
    for g in &gold {
        detected.extend(align_pair(find(&g.doi_a), find(&g.doi_b), &params)?);
    }

    let report = evaluate(&gold, &detected, &EvalOptions::default())?;
    println!("macro-averaged:\n{}", report.to_table());
    let micro = EvalOptions {
        averaging: Averaging::Micro,
        fold_granularity: true,
        ..Default::default()
    };
    println!("micro-averaged, with plagdet:\n{}", evaluate(&gold, &detected, &micro)?.to_table());
    print!("{}", report.to_jsonl());
    Ok(())
}
