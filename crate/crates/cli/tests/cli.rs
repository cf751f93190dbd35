use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn slowent(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_slowent"));
    cmd.args(args).env_remove("SLOWENT_THREADS");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn write_config(dir: &Path, json: &str) -> String {
    let path = dir.join("config.json");
    fs::write(&path, json).unwrap();
    path.to_string_lossy().into_owned()
}

const SMALL_COVER: &str = r#"{"n": 32, "samples": 400, "orbit_len": 100000, "seed": 5}"#;

#[test]
fn cover_run_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL_COVER);
    let out = dir.path().join("out");
    let o = slowent(
        &["cover", "--config", &cfg, "--seed", "9", "--out", out.to_str().unwrap()],
        &[],
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report: Value = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["experiment"], "cover");
    assert_eq!(report["config"]["seed"], 9);
    assert_eq!(report["config"]["n"], 32);
    assert_eq!(report["verdict"], "pass");
    for c in report["checks"].as_array().unwrap() {
        assert!(c["bound"].is_number(), "unbounded check {c}");
    }
    let rows = fs::read_to_string(out.join("cover.csv")).unwrap();
    assert!(rows.starts_with("method,n,epsilon,delta,k,covered_mass,seed\n"));
    assert!(rows.contains("block_coding,32,"));
    assert!(fs::read_to_string(out.join("checks.csv"))
        .unwrap()
        .starts_with("name,value,relation,bound"));
}

#[test]
fn identical_runs_give_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"m": 6, "M": 4, "n": 24, "samples": 1000, "orbit_len": 50000, "export_samples": true}"#,
    );
    let run = |name: &str, threads: &str| {
        let out = dir.path().join(name);
        let o = slowent(
            &["dominance_gap", "--config", &cfg, "--out", out.to_str().unwrap()],
            &[("SLOWENT_THREADS", threads)],
        );
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        out
    };
    let (a, b) = (run("a", "1"), run("b", "2"));
    let strip = |p: &Path| -> String {
        fs::read_to_string(p)
            .unwrap()
            .lines()
            .filter(|l| !l.contains("\"wall_clock_ms\""))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip(&a.join("report.json")), strip(&b.join("report.json")));
    for f in ["checks.csv", "stacked_names.slw"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    let words = slowent_core::io::read_packed_all(&mut fs::File::open(a.join("stacked_names.slw")).unwrap()).unwrap();
    assert_eq!(words.len(), 1000);
    assert!(words.iter().all(|w| w.len() == 24));
}

#[test]
fn failed_assertion_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    // every block copies the first: the independence check must flag it
    let cfg = write_config(
        dir.path(),
        r#"{"m": 8, "M": 4, "n": 32, "samples": 2000, "orbit_len": 50000, "block_law": "copied",
            "sparse_instances": 100, "sparse_max_cells": 6, "sandwich_instances": 5, "independence_rows": 2000}"#,
    );
    let out = dir.path().join("out");
    let o = slowent(&["lemma_suite", "--config", &cfg, "--out", out.to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    let report: Value = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["verdict"], "fail");
    let mi = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "block_mutual_information")
        .unwrap();
    assert_eq!(mi["verdict"], "fail");
}

#[test]
fn bad_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    for bad in [
        r#"{"epsilon": 0}"#,
        r#"{"delta": 1.5}"#,
        r#"{"nonsense": 1}"#,
        r#"{"experiment": "vwb"}"#,
        r#"{"generator": {"kind": "bernoulli", "p": 2}}"#,
        r#"{"n": 100000, "orbit_len": 1000}"#,
        "not json",
    ] {
        let cfg = write_config(dir.path(), bad);
        let o = slowent(&["cover", "--config", &cfg, "--out", dir.path().to_str().unwrap()], &[]);
        assert_eq!(o.status.code(), Some(2), "{bad}");
        assert!(!o.stderr.is_empty());
    }
    assert_eq!(
        slowent(&["cover", "--config", "/nonexistent.json"], &[]).status.code(),
        Some(2)
    );
    assert_eq!(slowent(&["nonsense"], &[]).status.code(), Some(2));
    assert_eq!(
        slowent(&["cover", "--dry-run"], &[("SLOWENT_THREADS", "0")])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn dry_run_echoes_defaults() {
    let o = slowent(&["dominance_gap", "--dry-run"], &[]);
    assert_eq!(o.status.code(), Some(0));
    let cfg: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(cfg["experiment"], "dominance_gap");
    assert_eq!(
        (cfg["m"].as_u64(), cfg["M"].as_u64(), cfg["n"].as_u64()),
        (Some(40), Some(10), Some(400))
    );
    assert_eq!(cfg["samples"], 5000);
    assert_eq!(cfg["generator"]["kind"], "sturmian");
}
