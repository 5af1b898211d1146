use std::path::Path;
use std::process::{Command, Output};

fn textreuse(args: &[&str]) -> Output {
    let out = Command::new(env!("CARGO_BIN_EXE_textreuse")).args(args).output().unwrap();
    assert!(
        out.status.success(),
        "textreuse {args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn end_to_end_through_every_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    let gen = root.join("gen");
    textreuse(&[
        "gen-corpus", "--output", p(&gen), "--documents", "50", "--planted-pairs", "12", "--negative-pairs", "4",
        "--seed", "21",
    ]);
    let corpus = gen.join("corpus.jsonl");
    assert!(gen.join("gold.jsonl").exists() && gen.join("manifest.json").exists());

    let config = root.join("run.conf");
    std::fs::write(&config, "# run parameters\ndelta = 250\nn_gram = 8\nworkers = 2\n").unwrap();
    let out = root.join("out");
    let summary = textreuse(&[
        "pipeline", "--config", p(&config), "--input", p(&corpus), "--output", p(&out), "--k", "7",
    ]);
    let summary: serde_json::Value = serde_json::from_slice(&summary.stdout).unwrap();
    assert!(summary["cases"].as_u64().unwrap() >= 12);
    assert_eq!(summary["corpus"]["documents"], 50);

    // retrieve + align separately gives the same case file as the pipeline.
    let cands = root.join("candidates.tsv");
    textreuse(&["retrieve", "--input", p(&corpus), "--output", p(&cands)]);
    let cases = root.join("cases.jsonl");
    textreuse(&["align", "--input", p(&corpus), "--candidates", p(&cands), "--output", p(&cases)]);
    assert_eq!(std::fs::read(&cases).unwrap(), std::fs::read(out.join("cases.jsonl")).unwrap());

    let report = root.join("report.jsonl");
    let eval = textreuse(&[
        "evaluate", "--cases", p(&cases), "--gold", p(&gen.join("gold.jsonl")), "--report", p(&report),
        "--score-unknown-pairs", "--granularity",
    ]);
    let table = String::from_utf8(eval.stdout).unwrap();
    assert!(table.contains("Entire Corpus") && table.contains("Plagdet"));
    let last: serde_json::Value =
        serde_json::from_str(std::fs::read_to_string(&report).unwrap().lines().last().unwrap()).unwrap();
    assert_eq!(last["scope"], "Entire Corpus");
    assert!(last["precision"].as_f64().unwrap() > 0.9);
    assert!(last["recall"].as_f64().unwrap() > 0.9);

    let stats = textreuse(&["stats", "--cases", p(&cases), "--json"]);
    let stats: serde_json::Value = serde_json::from_slice(&stats.stdout).unwrap();
    assert_eq!(stats["cases"], summary["cases"]);
    let text = textreuse(&["stats", "--cases", p(&cases)]);
    assert!(String::from_utf8(text.stdout).unwrap().contains("partners per document"));

    let normalized = root.join("normalized.jsonl");
    textreuse(&["normalize", "--input", p(&corpus), "--output", p(&normalized), "--min-words", "1"]);
    let first: serde_json::Value =
        serde_json::from_str(std::fs::read_to_string(&normalized).unwrap().lines().next().unwrap()).unwrap();
    assert_eq!(first["doi"], "10.5555/synth.000000");
}

#[test]
fn errors_exit_nonzero_with_a_message() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_textreuse"))
        .args(["pipeline", "--input", "/nonexistent.jsonl", "--output"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));

    let bad = Command::new(env!("CARGO_BIN_EXE_textreuse"))
        .args(["retrieve", "--input", "x", "--output", "y", "--k", "9"])
        .output()
        .unwrap();
    assert!(!bad.status.success());
}
