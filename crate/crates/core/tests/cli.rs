//! The `twomat` binary driven as a subprocess: outputs, exit codes and
//! byte-for-byte determinism.

use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use tempfile::TempDir;

fn reference() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/reference_measure.json")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twomat")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(out: &Output) -> Value {
    assert_eq!(code(out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).expect("stdout is JSON");
    assert_eq!(v["schema_version"], "1.0");
    v
}

fn complex(v: &Value) -> (f64, f64) {
    (v[0].as_f64().unwrap(), v[1].as_f64().unwrap())
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

const FULL_SPEC: &str =
    r#"{"N": 3, "xi": [[3.7, 1.5]], "zeta": [[-3.9, 1.0], [1.2, -4.1]], "eta": [[0.8, 4.0], [-3.2, -2.6]], "mu": [[4.3, -0.4]]}"#;

#[test]
fn single_atom_bimoments() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "one.json", r#"{"atoms": [{"x": 2, "y": 3, "w": 5}]}"#);
    let v = json(&run(&["bimoments", &m, "--trunc", "2"]));
    let b = &v["matrix"];
    assert_eq!(complex(&b[0][0]), (5.0, 0.0));
    assert_eq!(complex(&b[0][1]), (15.0, 0.0));
    assert_eq!(complex(&b[1][0]), (10.0, 0.0));
    assert_eq!(complex(&b[1][1]), (30.0, 0.0));
}

#[test]
fn malformed_input_exits_2() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "bad.json", r#"{"atoms": [{"x": 1, "y": "#);
    assert_eq!(code(&run(&["bimoments", &m])), 2);
    assert_eq!(code(&run(&["bimoments", "/nonexistent/measure.json"])), 2);
    assert_eq!(code(&run(&["verify", path(&reference()), "--format", "yaml"])), 2);
}

#[test]
fn same_inputs_give_identical_bytes() {
    let dir = TempDir::new().unwrap();
    let s = write(&dir, "spec.json", FULL_SPEC);
    let m = reference();
    for args in [
        vec!["bimoments", path(&m), "--trunc", "8"],
        vec!["biortho", path(&m)],
        vec!["eval", path(&m), &s, "--case", "all"],
        vec!["verify", path(&m)],
    ] {
        let a = run(&args);
        let b = run(&args);
        assert_eq!(code(&a), 0, "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn bimoments_document_reparses() {
    let v = json(&run(&["bimoments", path(&reference()), "--trunc", "8"]));
    assert_eq!(v["matrix"].as_array().unwrap().len(), 8);
    let text = serde_json::to_string(&v).unwrap();
    assert_eq!(serde_json::from_str::<Value>(&text).unwrap(), v);
}

#[test]
fn empty_insertion_evaluates_to_one() {
    let dir = TempDir::new().unwrap();
    let s = write(&dir, "empty.json", r#"{"N": 3}"#);
    let v = json(&run(&["eval", path(&reference()), &s]));
    assert_eq!(complex(&v["result"]["value"]), (1.0, 0.0));
}

#[test]
fn eval_agrees_with_oracle() {
    let dir = TempDir::new().unwrap();
    let m = reference();
    for text in [r#"{"N": 2, "zeta": [[3.8, 1.1]]}"#, FULL_SPEC] {
        let s = write(&dir, "spec.json", text);
        let e = json(&run(&["eval", path(&m), &s]));
        let o = json(&run(&["oracle", path(&m), &s, "--method", "both"]));
        assert!(o["cross_relative_difference"].as_f64().unwrap() <= 1e-9);
        let (er, ei) = complex(&e["result"]["value"]);
        let (or, oi) = complex(&o["results"][0]["value"]);
        let rel = ((er - or).hypot(ei - oi)) / or.hypot(oi);
        assert!(rel <= 1e-8, "{text}: {rel}");
    }
}

#[test]
fn brute_force_over_budget_exits_4() {
    let dir = TempDir::new().unwrap();
    let s = write(&dir, "big.json", r#"{"N": 7}"#);
    assert_eq!(code(&run(&["oracle", path(&reference()), &s, "--method", "brute"])), 4);
    assert_eq!(code(&run(&["wick-check", "--budget", "2"])), 4);
}

#[test]
fn numerical_preconditions_exit_3() {
    let dir = TempDir::new().unwrap();
    let rank_two = write(
        &dir,
        "rank2.json",
        r#"{"atoms": [{"x": 1, "y": 2, "w": 1}, {"x": -1, "y": 0.5, "w": 2}]}"#,
    );
    assert_eq!(code(&run(&["biortho", &rank_two, "--trunc", "4"])), 3);
    assert_eq!(code(&run(&["verify", &rank_two])), 3);

    let on_support = write(&dir, "pole.json", r#"{"atoms": [{"x": 1, "y": 2, "w": 1}]}"#);
    let s = write(&dir, "spec.json", r#"{"N": 1, "eta": [1]}"#);
    assert_eq!(code(&run(&["eval", &on_support, &s])), 3);
}

#[test]
fn impossible_tolerance_exits_5() {
    let out = run(&["verify", path(&reference()), "--tol", "1e-30"]);
    assert_eq!(code(&out), 5);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["checks"].as_array().unwrap().iter().any(|c| c["passed"] == false));
}

#[test]
fn verify_passes_under_other_seeds() {
    for seed in ["1", "987654321"] {
        let v = json(&run(&["verify", path(&reference()), "--seed", seed]));
        assert!(v["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true), "seed {seed}");
    }
}

#[test]
fn short_window_cauchy_is_classified() {
    let v = json(&run(&["wick-check", "--window", "8"]));
    let checks = v["checks"].as_array().unwrap();
    let cauchy = checks.iter().find(|c| c["name"] == "wick.cauchy_tail").expect("cauchy line");
    // worst is the residual as a fraction of the geometric tail bound
    assert_eq!(cauchy["passed"], true);
    assert!(cauchy["worst"].as_f64().unwrap() <= 1.0);
    let note = cauchy["note"].as_str().unwrap();
    assert!(note.contains("tail bound only"), "{note}");
    let residual: f64 = note.split_whitespace().nth(2).unwrap().trim_end_matches(';').parse().unwrap();
    assert!(residual > 1e-3 && residual < 1e-2, "{residual} is not near 2^-8");
}

#[test]
fn out_flag_and_csv() {
    let dir = TempDir::new().unwrap();
    let target = dir.path().join("report.json");
    let out = run(&["bimoments", path(&reference()), "--trunc", "3", "--out", path(&target)]);
    assert_eq!(code(&out), 0);
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&target).unwrap()).unwrap();
    assert_eq!(written["command"], "bimoments");

    let csv = run(&["verify", path(&reference()), "--format", "csv"]);
    assert_eq!(code(&csv), 0);
    let text = String::from_utf8(csv.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().contains("name"));
    assert!(lines.count() >= 30);
}
