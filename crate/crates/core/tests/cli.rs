//! End-to-end runs of the `hmes` binary.

use std::collections::HashMap;
use std::path::Path;
use std::process::{Command, Output};

use hmes::cli::exit;
use hmes::data::ScenarioSet;
use hmes::env::ExogenousRecord;

const SMALL: &str = r#"
[data]
synthetic_days = 3
n_train = 2

[train]
batch_size = 16

[train.nets]
embedding = [8, 8]
actor_hidden = [8]
critic_hidden = [8, 8]

[cem]
population = 20
iterations = 3

[analysis]
n_samples = 37
k_max = 4
"#;

fn hmes(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hmes"))
        .current_dir(dir)
        .args(args)
        .arg("--quiet")
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) {
    let out = hmes(dir, args);
    assert!(
        out.status.success(),
        "hmes {} failed: {}",
        args.join(" "),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn setup() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("small.toml"), SMALL).unwrap();
    dir
}

fn rows(path: &Path) -> Vec<HashMap<String, String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().clone();
    r.records()
        .map(|rec| {
            let rec = rec.unwrap();
            header.iter().map(String::from).zip(rec.iter().map(String::from)).collect()
        })
        .collect()
}

fn num(row: &HashMap<String, String>, key: &str) -> f64 {
    row[key].parse().unwrap()
}

#[test]
fn zero_policy_on_quiet_day_costs_nothing() {
    let dir = setup();
    let day: Vec<ExogenousRecord> = (1..=24).map(|h| ExogenousRecord::quiet(1, h)).collect();
    ScenarioSet::new("quiet", vec![day]).save(&dir.path().join("quiet.csv")).unwrap();
    ok(
        dir.path(),
        &["simulate", "--scenario", "quiet.csv", "--policy", "zero", "--split", "all", "--out", "run"],
    );
    let summary = rows(&dir.path().join("run/summary.csv"));
    assert_eq!(summary.len(), 1);
    assert_eq!(num(&summary[0], "cost"), 0.0);
    assert_eq!(rows(&dir.path().join("run/trace.csv")).len(), 24);
}

#[test]
fn random_simulation_repeats_exactly() {
    let dir = setup();
    for out in ["a", "b"] {
        ok(
            dir.path(),
            &["simulate", "--config", "small.toml", "--seed", "4", "--policy", "random", "--out", out],
        );
    }
    let read = |p: &str| std::fs::read(dir.path().join(p)).unwrap();
    assert_eq!(read("a/trace.csv"), read("b/trace.csv"));
    assert_eq!(read("a/summary.csv"), read("b/summary.csv"));
}

#[test]
fn train_evaluate_and_analyze_follow_their_contracts() {
    let dir = setup();
    let d = dir.path();
    let common = ["--config", "small.toml", "--seed", "9"];
    let run = |extra: &[&str]| {
        let mut args: Vec<&str> = extra.to_vec();
        args.extend(common);
        ok(d, &args);
    };

    run(&["train", "--algo", "td3", "--episodes", "1", "--out", "td3"]);
    let log = rows(&d.join("td3/train_log.csv"));
    assert_eq!(log.len(), 1);
    assert!(log.iter().all(|r| r["embedding_loss"].is_empty()));

    run(&["train", "--algo", "sr-td3", "--episodes", "3", "--out", "sr"]);
    let log = rows(&d.join("sr/train_log.csv"));
    assert_eq!(log.len(), 3);
    assert!(log.iter().any(|r| !r["embedding_loss"].is_empty()));
    assert!(d.join("sr/config.toml").exists());
    assert!(d.join("sr/provenance.csv").exists());

    run(&["train", "--algo", "sr-td3", "--episodes", "3", "--out", "sr2"]);
    assert_eq!(
        std::fs::read(d.join("sr/checkpoint_final.json")).unwrap(),
        std::fs::read(d.join("sr2/checkpoint_final.json")).unwrap()
    );

    run(&[
        "simulate",
        "--policy",
        "checkpoint",
        "--checkpoint",
        "sr/checkpoint_final.json",
        "--split",
        "test",
        "--out",
        "sim",
    ]);
    assert_eq!(rows(&d.join("sim/summary.csv")).len(), 1);

    run(&[
        "evaluate",
        "--checkpoint",
        "sr/checkpoint_final.json",
        "--checkpoint",
        "sr2/checkpoint_final.json",
        "--out",
        "eval",
    ]);
    let methods = rows(&d.join("eval/comparison.csv"));
    assert_eq!(methods.len(), 2);
    for m in &methods {
        let cost = num(m, "cost");
        let reference = num(m, "reference_cost");
        let gap = (cost - reference) / reference * 100.0;
        assert!((gap - num(m, "gap_pct")).abs() < 0.05);
    }
    let strip = |m: &HashMap<String, String>| {
        let mut m = m.clone();
        m.remove("method");
        let mut v: Vec<_> = m.into_iter().collect();
        v.sort();
        v
    };
    assert_eq!(strip(&methods[0]), strip(&methods[1]));

    run(&["analyze", "--checkpoint", "sr/checkpoint_final.json", "--out", "an"]);
    assert_eq!(rows(&d.join("an/projection.csv")).len(), 37);
    assert!(!rows(&d.join("an/spectrum.csv")).is_empty());
    assert_eq!(rows(&d.join("an/silhouette.csv")).len(), 3);
}

#[test]
fn errors_map_to_distinct_exit_codes() {
    let dir = setup();
    let d = dir.path();
    let code = |args: &[&str]| hmes(d, args).status.code().unwrap();

    std::fs::write(d.join("bad.toml"), "[train]\nno_such_key = 1\n").unwrap();
    assert_eq!(code(&["train", "--config", "bad.toml", "--out", "x"]), exit::CONFIG);
    assert_eq!(code(&["train", "--config", "small.toml", "--episodes", "0", "--out", "x"]), exit::CONFIG);
    assert_eq!(code(&["simulate", "--scenario", "missing.csv", "--out", "x"]), exit::DATA);
    assert_eq!(
        code(&["evaluate", "--config", "small.toml", "--checkpoint", "missing.json", "--out", "x"]),
        exit::DATA
    );
}
