use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn svineq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_svineq"))
        .args(args)
        .env_remove("SVINEQ_SEED")
        .output()
        .expect("binary runs")
}

fn read_report(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn theorem_suite_exits_zero() {
    let out = svineq(&["check", "--ineq", "von-neumann", "--trials", "100", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let table = String::from_utf8(out.stdout).unwrap();
    for n in 2..=8 {
        assert!(table.lines().any(|l| l.starts_with("von-neumann") && l.split_whitespace().nth(1) == Some(&n.to_string())));
    }
}

#[test]
fn fan_counterexample_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("repro.json");
    let out = svineq(&["repro", "fan-counterexample", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let doc = read_report(&path);
    let margin = doc["results"]["ahj_k1_margin"].as_f64().unwrap();
    assert!((margin - (13f64.sqrt() / 3.0 - 1.0)).abs() < 1e-9);
    assert_eq!(doc["schema"], "svineq-report/1");
    assert_eq!(doc["exit_status"], 2);
    let witness = &doc["results"]["witness"]["matrices"]["S"];
    assert_eq!(witness["rows"], 3);
}

#[test]
fn zero_budget_search_reports_no_counterexample() {
    let out = svineq(&["ptrace", "--question", "1", "--budget", "0", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    let r = &doc["results"][0];
    assert_eq!(r["outcome"], "no counterexample found within budget");
    assert_eq!(r["best_margin"], "-inf");
    assert_eq!(r["evaluations"], 0);
    assert!(r.get("witness").is_none());
}

#[test]
fn fan_lemma31_violation_exits_two_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("l31.json");
    let out = svineq(&[
        "check", "--ineq", "lemma31", "--form", "fan", "--n", "3", "--trials", "20", "--seed", "1", "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let doc = read_report(&path);
    let r = &doc["results"][0];
    assert_eq!(r["inequality_id"], "lemma31-fan");
    assert!(r["violations"].as_u64().unwrap() >= 1);
    assert!(r["worst_margin"].as_f64().unwrap() >= 13f64.sqrt() / 3.0 - 1.0 - 1e-9);
}

#[test]
fn usage_errors_are_rejected() {
    for args in [
        &["check", "--ineq", "bogus"][..],
        &["check"],
        &["check", "--ineq", "ahj", "--trials", "x"],
        &["check", "--ineq", "ahj", "--unknown-flag"],
        &["ptrace", "--question", "7"],
        &["frobnicate"],
    ] {
        let out = svineq(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    let help = svineq(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
    let text = String::from_utf8(help.stdout).unwrap();
    for id in ["von-neumann", "product-family", "hadamard-family", "ahj", "lemma31", "lemma32", "hmn-hadamard", "hmn-fan", "fan-sigma1"] {
        assert!(text.contains(id), "{id}");
    }
}

#[test]
fn unwritable_output_is_an_error() {
    let out = svineq(&["repro", "fan-counterexample", "--output", "/nonexistent/dir/report.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/dir/report.json"));
}

#[test]
fn env_seed_is_used_and_echoed() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, env: Option<&str>, extra: &[&str]| {
        let path = dir.path().join(name);
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_svineq"));
        cmd.args(["check", "--ineq", "lemma32", "--n", "3", "--trials", "50", "--output"])
            .arg(&path)
            .args(extra)
            .env_remove("SVINEQ_SEED");
        if let Some(v) = env {
            cmd.env("SVINEQ_SEED", v);
        }
        assert_eq!(cmd.output().unwrap().status.code(), Some(0));
        read_report(&path)
    };
    let from_env = run("env.json", Some("99"), &[]);
    assert_eq!(from_env["seed"]["seed"], 99);
    assert_eq!(from_env["seed"]["source"], "env:SVINEQ_SEED");
    let from_flag = run("flag.json", Some("1"), &["--seed", "99"]);
    assert_eq!(from_flag["seed"]["source"], "flag");
    assert_eq!(from_env["results"][0]["worst_margin"], from_flag["results"][0]["worst_margin"]);
    let default = run("default.json", None, &[]);
    assert_eq!(default["seed"]["source"], "default");
}

#[test]
fn reports_replay_byte_identically() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let mut bodies = Vec::new();
    for _ in 0..2 {
        let out = svineq(&[
            "check", "--ineq", "all", "--n", "3", "--trials", "200", "--seed", "11", "--output",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        let text = std::fs::read_to_string(&path).unwrap();
        let body: Vec<&str> = text
            .lines()
            .filter(|l| !l.contains("\"elapsed_seconds\"") && !l.contains("\"wall_time_seconds\""))
            .collect();
        bodies.push(body.join("\n"));
    }
    assert_eq!(bodies[0], bodies[1]);
    let doc = read_report(&path);
    let ids: Vec<&str> = doc["results"].as_array().unwrap().iter().map(|r| r["inequality_id"].as_str().unwrap()).collect();
    assert_eq!(
        ids,
        ["von-neumann", "product-family", "hadamard-family", "ahj", "ahj-sqrt", "lemma31", "lemma32", "hmn-hadamard", "hmn-fan", "fan-sigma1"]
    );
    assert_eq!(doc["config"]["trials"], 200);
    assert!(doc["tool_version"].is_string() && doc["generator"].is_string());
}

#[test]
fn extremal_and_search_commands() {
    let out = svineq(&["extremal", "--n", "5", "--trials", "100", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(doc["results"][0]["max_gap"].as_f64().unwrap() <= 1e-10);

    let out = svineq(&["search", "--max-n", "3", "--budget", "200", "--commuting", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["results"].as_array().unwrap().len(), 4);
}
