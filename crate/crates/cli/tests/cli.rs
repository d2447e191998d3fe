use std::io::Write;
use std::process::{Command, Output};

use tempfile::NamedTempFile;

fn dimacs(text: &str) -> NamedTempFile {
    let mut f = NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quivsat")).args(args).output().unwrap()
}

const SINGLE: &str = "p cnf 3 1\n1 2 3 0\n";
const EXAMPLE: &str = "c running example\np cnf 5 3\n1 2 -3 0\n2 3 5 0\n3 -4 -5 0\n";
const CONTRADICTION: &str = "p cnf 1 2\n1 0\n-1 0\n";

#[test]
fn sat_exit_codes() {
    let f = dimacs(SINGLE);
    let out = run(&["sat", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("s SATISFIABLE"));
    assert!(stdout.contains("v 1 0 0"));

    let f = dimacs(CONTRADICTION);
    let out = run(&["sat", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stdout).unwrap().contains("s UNSATISFIABLE"));
}

#[test]
fn verify_passes_and_reports_json() {
    let f = dimacs(EXAMPLE);
    let out = run(&["verify", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["verdict"], "pass");
    assert_eq!(v["assignments"].as_array().unwrap().len(), 32);
}

#[test]
fn verify_sample_mode_over_gf3() {
    let f = dimacs(SINGLE);
    let out = run(&["verify", f.path().to_str().unwrap(), "--field", "3", "--mode", "sample", "--budget", "5", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["assignments"].as_array().unwrap().len() <= 5);
}

#[test]
fn verify_budget_error() {
    let f = dimacs(EXAMPLE);
    let out = run(&["verify", f.path().to_str().unwrap(), "--budget", "3"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn reduce_dot_and_json() {
    let f = dimacs(SINGLE);
    let out = run(&["reduce", f.path().to_str().unwrap(), "--out", "dot"]);
    assert_eq!(out.status.code(), Some(0));
    let dot = String::from_utf8(out.stdout).unwrap();
    assert_eq!(dot.matches(" -> ").count(), 12);
    let out = run(&["reduce", f.path().to_str().unwrap(), "--field", "3"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["quiver"]["vertices"].as_array().unwrap().len(), 14);
    assert_eq!(v["blocks"], 8);
}

#[test]
fn check_single_assignment() {
    let f = dimacs(SINGLE);
    let out = run(&["check", f.path().to_str().unwrap(), "--assign", "0,0,0"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["evaluates"], false);
    assert_eq!(v["certificate"], "explicit-decomposition");
    assert_eq!(v["verified"], true);
    let out = run(&["check", f.path().to_str().unwrap(), "--assign", "1,0,1"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["certificate"], "schur");
    assert_eq!(v["end_dim"], 1);
    let out = run(&["check", f.path().to_str().unwrap(), "--assign", "1,0"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn root_summary() {
    let f = dimacs(EXAMPLE);
    let out = run(&["root", f.path().to_str().unwrap()]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["gram_value"], -50);
    assert_eq!(v["closed_form"], -50);
    assert_eq!(v["root_class"], "imaginary");
}

#[test]
fn malformed_input_and_bad_flags() {
    let f = dimacs("p cnf 2\n1 2 0\n");
    assert_eq!(run(&["sat", f.path().to_str().unwrap()]).status.code(), Some(3));
    assert_eq!(run(&["sat", "/nonexistent/file.cnf"]).status.code(), Some(3));
    let f = dimacs(SINGLE);
    assert_eq!(run(&["sat", f.path().to_str().unwrap(), "--field", "6"]).status.code(), Some(3));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(3));
}
