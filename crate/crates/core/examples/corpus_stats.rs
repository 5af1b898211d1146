//! Corpus statistics over a case file: metadata breakdowns, case lengths and
//! partners per document.
//!
//! ```text
//! cargo run --release --example corpus_stats
//! ```

use textreuse::ingest::RawDocument;
use textreuse::pipeline::{run_pipeline, RunConfig, CASES_FILE};
use textreuse::synthgen::{generate, GenSpec};
use textreuse::{jsonl, stats, Result};

fn main() -> Result<()> {
    let work = std::env::temp_dir().join("textreuse-stats-example");
    let spec = GenSpec {
        documents: 150,
        ..GenSpec::default()
    }
    .with_planted_pairs(60);
    let mut docs = generate(&spec)?.documents;
    // Attach some metadata so the breakdowns have something to show.
    let fields = ["Physics", "Biology", "Economics"];
    for (i, d) in docs.iter_mut().enumerate() {
        d.metadata.year = Some(2000 + (i % 5) as i32);
        d.metadata.field = Some(vec![fields[i % 3].to_owned()]);
    }
    std::fs::create_dir_all(&work).expect("work dir");
    let input = work.join("corpus.jsonl");
    jsonl::write_jsonl::<RawDocument>(&input, &docs)?;

    let config = RunConfig {
        input,
        output: work.join("out"),
        ..Default::default()
    };
    run_pipeline(&config)?;
    let summary = stats::stats(&config.output.join(CASES_FILE))?;
    print!("{}", summary.to_text());
    Ok(())
}
