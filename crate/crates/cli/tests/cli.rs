use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("rulingset-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn rulingset(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rulingset")).args(args).output().unwrap()
}

fn run_ok(args: &[&str]) {
    let out = rulingset(args);
    assert!(out.status.success(), "{:?}: {}", args, String::from_utf8_lossy(&out.stderr));
}

fn trial_json(dir: &Path, t: u64) -> Value {
    serde_json::from_slice(&fs::read(dir.join(format!("trial-{t:04}.json"))).unwrap()).unwrap()
}

fn csv_rows(path: &Path) -> Vec<csv::StringRecord> {
    csv::Reader::from_path(path).unwrap().records().map(|r| r.unwrap()).collect()
}

#[test]
fn rerun_writes_identical_json() {
    let dir = scratch("rerun");
    let (a, b) = (dir.join("a"), dir.join("b"));
    for out in [&a, &b] {
        run_ok(&[
            "--gen",
            "power-law:n=3000,exponent=2.3",
            "--harness",
            "stream",
            "--trials",
            "3",
            "--seed",
            "5",
            "--check-lemmas",
            "--out",
            out.to_str().unwrap(),
        ]);
    }
    for name in ["trial-0000.json", "trial-0001.json", "trial-0002.json", "trials.csv", "aggregate.csv"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
    let t = trial_json(&a, 1);
    assert_eq!(t["schema"], 1);
    assert_eq!(t["seed"], 6);
    assert_eq!(t["valid"], true);
    assert!(t["lemmas"].as_array().is_some_and(|l| !l.is_empty()));
}

#[test]
fn hundred_trials_give_hundred_rows() {
    let dir = scratch("hundred");
    run_ok(&[
        "--gen",
        "erdos-renyi:n=400,avg=6",
        "--harness",
        "clique",
        "--trials",
        "100",
        "--out",
        dir.to_str().unwrap(),
    ]);
    let rows = csv_rows(&dir.join("trials.csv"));
    assert_eq!(rows.len(), 100);
    assert!(rows.iter().all(|r| &r[6] == "true"));
    // aggregate rounds agree with the per-trial JSON
    let rounds: Vec<f64> = (0..100).map(|t| trial_json(&dir, t)["account"]["rounds"].as_f64().unwrap()).collect();
    let agg = csv_rows(&dir.join("aggregate.csv"));
    let row = agg.iter().find(|r| &r[0] == "rounds").unwrap();
    let mean: f64 = row[2].parse().unwrap();
    let max: f64 = row[3].parse().unwrap();
    assert!((mean - rounds.iter().sum::<f64>() / 100.0).abs() < 1e-9);
    assert_eq!(max, rounds.iter().copied().fold(0.0, f64::max));
}

#[test]
fn stream_and_clique_pick_the_same_ruling_set() {
    let dir = scratch("models");
    let mut rulings = Vec::new();
    for harness in ["stream", "clique", "none"] {
        let out = dir.join(harness);
        run_ok(&[
            "--gen",
            "bad-bipartite:n=2048,hubs=16,k=16",
            "--harness",
            harness,
            "--seed",
            "3",
            "--out",
            out.to_str().unwrap(),
        ]);
        let t = trial_json(&out, 0);
        rulings.push(t["ruling"].clone());
        match harness {
            "stream" => assert!(t["account"]["passes"].as_u64().unwrap() > 0),
            "clique" => assert!(t["account"]["rounds"].as_u64().unwrap() > 0),
            _ => assert!(t["account"].is_null()),
        }
    }
    assert_eq!(rulings[0], rulings[1]);
    assert_eq!(rulings[0], rulings[2]);
}

#[test]
fn edge_list_input_streams_from_file() {
    let dir = scratch("file");
    let graph = dir.join("g.txt");
    fs::write(&graph, "# a path and a triangle\nn 8\n0 1\n1 2\n2 3\n3 4\n5 6\n6 7\n7 5\n").unwrap();
    let out = dir.join("out");
    run_ok(&[
        "--graph",
        graph.to_str().unwrap(),
        "--harness",
        "stream",
        "--trials",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    let t = trial_json(&out, 0);
    assert_eq!(t["graph"]["n"], 8);
    assert_eq!(t["graph"]["m"], 7);
    assert_eq!(t["valid"], true);
}

#[test]
fn bad_arguments_fail_cleanly() {
    let dir = scratch("bad");
    let out = dir.to_str().unwrap();
    let missing = rulingset(&["--graph", "/nonexistent/graph.txt", "--out", out]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("/nonexistent/graph.txt"));
    let beta = rulingset(&["--gen", "matching:n=10", "--beta", "3", "--out", out]);
    assert_eq!(beta.status.code(), Some(2));
    let spec = rulingset(&["--gen", "nonsense:n=10", "--out", out]);
    assert_eq!(spec.status.code(), Some(2));
    let neither = rulingset(&["--out", out]);
    assert!(!neither.status.success());
}

#[test]
fn config_file_sets_parameters() {
    let dir = scratch("config");
    let cfg = dir.join("cfg.json");
    fs::write(&cfg, r#"{"gamma": 2.0, "c": 0.5, "alpha": 0.05, "seed": 41, "budget_K": 4.0, "d_min": 3}"#).unwrap();
    let out = dir.join("out");
    run_ok(&["--gen", "d-regular:n=500,d=8", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    let t = trial_json(&out, 0);
    assert_eq!(t["seed"], 41);
    assert_eq!(t["config"]["gamma"], 2.0);
    assert_eq!(t["config"]["budget_K"], 4.0);
}
