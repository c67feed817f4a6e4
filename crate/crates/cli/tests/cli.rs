use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const TOY: &str = "id,text\n\
a,\"Monkey pox case confirmed in the city, health officials say\"\n\
b,Vaccine doses ordered for monkey pox outbreak https://t.co/x\n\
c,#MPox @WHO City health officials confirm vaccine supply\n";

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_sparselda"));
    c.env_remove("RUST_LOG");
    for (key, _) in std::env::vars() {
        if key.starts_with("SPARSELDA_") {
            c.env_remove(key);
        }
    }
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_owned()
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::ReaderBuilder::new().has_headers(false).from_path(path).unwrap();
    r.records().map(|x| x.unwrap().iter().map(str::to_owned).collect()).collect()
}

fn error_line(out: &Output) -> serde_json::Value {
    let stderr = String::from_utf8_lossy(&out.stderr);
    let last = stderr.lines().last().expect("an error line");
    serde_json::from_str(last).unwrap()
}

#[test]
fn train_writes_every_artifact() {
    let tmp = TempDir::new().unwrap();
    let input = write(tmp.path(), "toy.csv", TOY);
    let out = tmp.path().join("out");
    let o = run(&["train", "--input", &input, "--k", "2", "--seed", "7", "--iterations", "50", "--out-dir", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    for f in ["assignments.csv", "topics.json", "diagnostics.csv", "stats.csv", "histogram.csv", "counts.csv", "dropped.csv", "rejected.csv", "model.json"] {
        assert!(out.join(f).is_file(), "{f} missing");
    }
    let rows = csv_rows(&out.join("assignments.csv"));
    assert_eq!(rows[0], ["doc_id", "prediction", "confidence_topic_0", "confidence_topic_1"]);
    assert_eq!(rows.len(), 4);
    for r in &rows[1..] {
        let sum: f64 = r[2..].iter().map(|x| x.parse::<f64>().unwrap()).sum();
        assert!((sum - 1.0).abs() < 1e-5, "{r:?}");
    }
    let counts = csv_rows(&out.join("counts.csv"));
    let total: usize = counts[1..].iter().map(|r| r[1].parse::<usize>().unwrap()).sum();
    assert_eq!(total, 3);

    let topics: serde_json::Value = serde_json::from_slice(&fs::read(out.join("topics.json")).unwrap()).unwrap();
    assert_eq!(topics.as_array().unwrap().len(), 2);
    let summary: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(summary["documents"], 3);
}

#[test]
fn sweep_reports_one_row_per_k() {
    let tmp = TempDir::new().unwrap();
    let input = write(tmp.path(), "toy.csv", TOY);
    let out = tmp.path().join("out");
    let o = run(&["sweep", "--input", &input, "--k-min", "2", "--k-max", "5", "--iterations", "30", "--top-words", "3", "--out-dir", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&out.join("sweep.csv"));
    assert_eq!(rows[0], ["k", "avg_coherence", "wall_time_ms", "seed"]);
    assert_eq!(rows[1..].iter().map(|r| r[0].as_str()).collect::<Vec<_>>(), ["2", "3", "4", "5"]);
    let summary: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let k = summary["selected_k"].as_u64().unwrap();
    assert!((2..=5).contains(&k));
}

#[test]
fn missing_input_exits_2_with_json_error() {
    let tmp = TempDir::new().unwrap();
    let o = run(&["train", "--input", "/no/such/file.csv", "--k", "2", "--out-dir", tmp.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let e = error_line(&o);
    assert_eq!(e["error"], "missing_input");
    assert_eq!(e["exit_code"], 2);
}

#[test]
fn bad_flags_exit_2() {
    let tmp = TempDir::new().unwrap();
    let input = write(tmp.path(), "toy.csv", TOY);
    for args in [
        vec!["train", "--input", input.as_str(), "--k", "2", "--engine", "quantum"],
        vec!["sweep", "--input", input.as_str(), "--k-min", "6", "--k-max", "2"],
        vec!["frobnicate"],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert_eq!(error_line(&o)["error"], "usage");
    }
}

#[test]
fn all_rows_malformed_is_a_data_error() {
    let tmp = TempDir::new().unwrap();
    let input = write(tmp.path(), "bad.jsonl", "not json\n{\"id\": 1}\n");
    let o = run(&["preprocess", "--input", &input, "--out-dir", tmp.path().join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(error_line(&o)["error"], "data");
}

#[test]
fn some_rows_malformed_still_succeeds() {
    let tmp = TempDir::new().unwrap();
    let input = write(tmp.path(), "mixed.jsonl", "{\"id\": 1, \"text\": \"monkey pox\"}\nbroken\n{\"id\": 2, \"text\": \"https://t.co/only\"}\n");
    let out = tmp.path().join("o");
    let o = run(&["preprocess", "--input", &input, "--out-dir", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(csv_rows(&out.join("rejected.csv")).len(), 2);
    assert_eq!(csv_rows(&out.join("dropped.csv"))[1], ["2", "empty after preprocessing"]);
    assert_eq!(csv_rows(&out.join("tokens.csv"))[1], ["1", "monkey pox"]);
}

#[test]
fn environment_overrides_defaults() {
    let tmp = TempDir::new().unwrap();
    let input = write(tmp.path(), "toy.csv", TOY);
    let out = tmp.path().join("env-out");
    let o = bin()
        .args(["train", "--input", &input])
        .env("SPARSELDA_K", "3")
        .env("SPARSELDA_ITERATIONS", "20")
        .env("SPARSELDA_OUT_DIR", &out)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(csv_rows(&out.join("assignments.csv"))[0].len(), 2 + 3);
}

#[test]
fn score_and_diagnose_from_checkpoint() {
    let tmp = TempDir::new().unwrap();
    let input = write(tmp.path(), "toy.csv", TOY);
    let train_out = tmp.path().join("train");
    let o = run(&["train", "--input", &input, "--k", "2", "--iterations", "40", "--out-dir", train_out.to_str().unwrap()]);
    assert!(o.status.success());
    let ckpt = train_out.join("model.json");
    let queries = write(tmp.path(), "q.txt", "monkey pox vaccine\n\nhealth officials\nzebra\n");

    let score_out = tmp.path().join("score");
    let o = run(&["score", "--checkpoint", ckpt.to_str().unwrap(), "--queries", &queries, "--lambda", "0.5", "--out-dir", score_out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let mut r = csv::ReaderBuilder::new().delimiter(b'\t').from_path(score_out.join("scores.tsv")).unwrap();
    let rows: Vec<csv::StringRecord> = r.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 3 * 3);
    for q in rows.chunks(3) {
        let scores: Vec<f64> = q.iter().map(|r| r[2].parse().unwrap()).collect();
        assert!(scores.windows(2).all(|w| w[0] >= w[1]), "{scores:?}");
    }
    // an out-of-vocabulary query scores -inf everywhere
    assert!(rows[6..].iter().all(|r| &r[2] == "-inf"));

    let diag_out = tmp.path().join("diag");
    let o = run(&["diagnose", "--checkpoint", ckpt.to_str().unwrap(), "--out-dir", diag_out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    // single chain: the rows recomputed from the checkpoint equal training's
    assert_eq!(fs::read(diag_out.join("assignments.csv")).unwrap(), fs::read(train_out.join("assignments.csv")).unwrap());
    assert_eq!(fs::read(diag_out.join("diagnostics.csv")).unwrap(), fs::read(train_out.join("diagnostics.csv")).unwrap());
}

#[test]
fn generated_corpus_trains() {
    let tmp = TempDir::new().unwrap();
    let gen_out = tmp.path().join("gen");
    let o = run(&["generate", "--k", "3", "--vocab-size", "30", "--docs", "40", "--doc-length", "15", "--seed", "4", "--out-dir", gen_out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(csv_rows(&gen_out.join("planted_phi.csv")).len(), 1 + 3 * 30);
    let corpus = gen_out.join("corpus.csv");
    let out = tmp.path().join("train");
    let o = run(&["train", "--input", corpus.to_str().unwrap(), "--k", "3", "--iterations", "30", "--out-dir", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(csv_rows(&out.join("assignments.csv")).len(), 41);
    assert_eq!(csv_rows(&out.join("dropped.csv")).len(), 1);
}
