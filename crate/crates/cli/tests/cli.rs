use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn swb(args: &[&str]) -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_swb"));
    cmd.args(args).env_remove("SWB_SEED");
    cmd
}

fn run(args: &[&str]) -> Output {
    swb(args).output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn corpus(dir: &TempDir, n: usize, seed: u64) -> PathBuf {
    let out = dir.path().join(format!("corpus_{n}_{seed}.jsonl"));
    let o = run(&[
        "generate",
        "--n",
        &n.to_string(),
        "--seed",
        &seed.to_string(),
        "--out",
        path_str(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    out
}

fn report_json(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

#[test]
fn generate_writes_requested_count_deterministically() {
    let dir = TempDir::new().unwrap();
    let a = corpus(&dir, 40, 3);
    let b = dir.path().join("again.jsonl");
    let o = run(&["generate", "--n", "40", "--seed", "3", "--out", path_str(&b)]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("wrote 40 records"));
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    // Header line plus one line per record.
    assert_eq!(text.lines().count(), 41);
}

#[test]
fn seed_falls_back_to_environment() {
    let dir = TempDir::new().unwrap();
    let flagged = corpus(&dir, 15, 5);
    let from_env = dir.path().join("env.jsonl");
    let o = swb(&["generate", "--n", "15", "--out", path_str(&from_env)])
        .env("SWB_SEED", "5")
        .output()
        .unwrap();
    assert!(o.status.success());
    let other = corpus(&dir, 15, 6);
    let read = |p: &Path| std::fs::read_to_string(p).unwrap();
    assert_eq!(read(&flagged), read(&from_env));
    assert_ne!(read(&flagged), read(&other));

    let bad = swb(&["generate", "--n", "5", "--out", path_str(&dir.path().join("x.jsonl"))])
        .env("SWB_SEED", "abc")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn extract_demographics_writes_three_columns() {
    let dir = TempDir::new().unwrap();
    let data = corpus(&dir, 25, 1);
    let out = dir.path().join("d.csv");
    let o = run(&[
        "extract",
        "--data",
        path_str(&data),
        "--families",
        "D",
        "--out",
        path_str(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
    assert_eq!(header.len(), 4);
    assert_eq!(header[0], "user_id");
    assert_eq!(text.lines().count(), 26);
    assert!(dir.path().join("d.normalization.json").exists());
}

#[test]
fn extract_with_demo_lexicon_covers_all_families() {
    let dir = TempDir::new().unwrap();
    let data = corpus(&dir, 20, 2);
    let out = dir.path().join("all.csv");
    let norm = dir.path().join("norm.json");
    let o = run(&[
        "extract",
        "--data",
        path_str(&data),
        "--lexicon",
        "demo",
        "--out",
        path_str(&out),
        "--normalization",
        path_str(&norm),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let header = std::fs::read_to_string(&out)
        .unwrap()
        .lines()
        .next()
        .unwrap()
        .to_string();
    // user_id + 3 demographic + 26 behavioral + 24 demo-lexicon categories.
    assert_eq!(header.split(',').count(), 1 + 3 + 26 + 24);
    assert!(norm.exists());
}

#[test]
fn linguistic_features_without_lexicon_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let data = corpus(&dir, 10, 1);
    let o = run(&[
        "extract",
        "--data",
        path_str(&data),
        "--families",
        "L",
        "--out",
        path_str(&dir.path().join("l.csv")),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--lexicon"), "{}", stderr(&o));
}

#[test]
fn sweep_one_algorithm_one_combo_and_rerender() {
    let dir = TempDir::new().unwrap();
    let data = corpus(&dir, 60, 4);
    let out = dir.path().join("sweep");
    let o = run(&[
        "sweep",
        "--data",
        path_str(&data),
        "--lexicon",
        "demo",
        "--algorithms",
        "lasso",
        "--families",
        "D+B+L",
        "--seed",
        "1",
        "--out-dir",
        path_str(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert_eq!(stdout.lines().filter(|l| l.starts_with("best ")).count(), 8);

    let report = report_json(&out);
    let cells = report["cells"].as_array().unwrap();
    assert_eq!(cells.len(), 8);
    assert!(cells.iter().all(|c| c["algorithm"] == "lasso"));

    let txt = std::fs::read_to_string(out.join("report.txt")).unwrap();
    let rerendered = dir.path().join("again.txt");
    let o = run(&[
        "report",
        "--input",
        path_str(&out.join("report.json")),
        "--out",
        path_str(&rerendered),
    ]);
    assert!(o.status.success());
    assert_eq!(std::fs::read_to_string(&rerendered).unwrap(), txt);

    let o = run(&["report", "--input", path_str(&out.join("report.json"))]);
    assert_eq!(String::from_utf8_lossy(&o.stdout), txt);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = TempDir::new().unwrap();
    let data = corpus(&dir, 40, 8);
    let config = dir.path().join("run.json");
    std::fs::write(
        &config,
        format!(
            r#"{{"data": {:?}, "algorithms": ["mars"], "families": ["D", "B"], "dimensions": ["P.A."], "folds": 3, "seed": 11}}"#,
            path_str(&data)
        ),
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = run(&[
        "sweep",
        "--config",
        path_str(&config),
        "--algorithms",
        "stepwise",
        "--out-dir",
        path_str(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report = report_json(&out);
    assert_eq!(report["config"]["folds"], 3);
    assert_eq!(report["config"]["seed"], 11);
    let cells = report["cells"].as_array().unwrap();
    assert_eq!(cells.len(), 2);
    assert!(cells
        .iter()
        .all(|c| c["algorithm"] == "stepwise" && c["dimension"] == "P.A."));
}

#[test]
fn analyze_writes_both_outputs() {
    let dir = TempDir::new().unwrap();
    let data = corpus(&dir, 50, 9);
    let out = dir.path().join("analysis");
    let o = run(&["analyze", "--data", path_str(&data), "--out-dir", path_str(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let json: Value = serde_json::from_str(&std::fs::read_to_string(out.join("analysis.json")).unwrap()).unwrap();
    assert_eq!(json["n_users"], 50);
    assert!(out.join("analysis.txt").exists());
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["sweep", "--no-such-flag"]).status.code(), Some(1));
    assert_eq!(run(&["sweep"]).status.code(), Some(1));

    let missing = dir.path().join("missing.jsonl");
    let o = run(&[
        "extract",
        "--data",
        path_str(&missing),
        "--families",
        "D",
        "--out",
        path_str(&dir.path().join("x.csv")),
    ]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));

    let garbage = dir.path().join("garbage.jsonl");
    std::fs::write(&garbage, "not json\n").unwrap();
    let o = run(&[
        "sweep",
        "--data",
        path_str(&garbage),
        "--families",
        "D",
        "--out-dir",
        path_str(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(2));

    let data = corpus(&dir, 20, 1);
    let o = run(&["sweep", "--data", path_str(&data), "--families", "D", "--folds", "1"]);
    assert_eq!(o.status.code(), Some(1));
}
