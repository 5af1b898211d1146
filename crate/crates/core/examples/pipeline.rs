//! End-to-end run with a checkpoint between retrieval and alignment.
//!
//! ```text
//! cargo run --release --example pipeline
//! ```

use textreuse::pipeline::{run_pipeline, run_retrieval, RunConfig, CASES_FILE, MANIFEST_FILE};
use textreuse::synthgen::{generate, write_corpus, GenSpec};
use textreuse::Result;

fn main() -> Result<()> {
    let work = std::env::temp_dir().join("textreuse-pipeline-example");
    let spec = GenSpec {
        documents: 200,
        ..GenSpec::default()
    }
    .with_planted_pairs(50);
    write_corpus(&work.join("corpus"), &spec, &generate(&spec)?)?;

    let mut config = RunConfig {
        input: work.join("corpus").join("corpus.jsonl"),
        output: work.join("out"),
        checkpoint_dir: Some(work.join("checkpoint")),
        ..Default::default()
    };
    // Settings can also come from a key = value file.
    let conf = work.join("run.conf");
    std::fs::write(&conf, "delta = 250\nmin_seeds = 2\noutput_mode = metadata-only\n").expect("write config");
    config.apply_file(&conf)?;
    let _ = std::fs::remove_dir_all(work.join("checkpoint"));

    let stage = run_retrieval(&config)?;
    println!(
        "retrieval: {} documents, {} candidate pairs (resumed: {})",
        stage.documents.len(),
        stage.candidates.len(),
        stage.resumed
    );

    // The second call picks up the candidate file written above.
    let summary = run_pipeline(&config)?;
    println!("{}", serde_json::to_string_pretty(&summary)?);
    let cases = std::fs::read_to_string(config.output.join(CASES_FILE)).expect("case file");
    println!("first case: {}", cases.lines().next().unwrap_or("(none)"));
    println!("manifest at {}", config.output.join(MANIFEST_FILE).display());
    Ok(())
}
