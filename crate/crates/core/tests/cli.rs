mod common;

use std::process::{Command, Output};

use common::data_file;
use csdm::trace::{parse_trace, trace_header};

fn csdm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_csdm")).args(args).output().unwrap()
}

fn code(args: &[&str]) -> i32 {
    csdm(args).status.code().unwrap()
}

#[test]
fn solve_reports_published_endpoint() {
    let out = csdm(&["solve", "--problem", "rosenbrock-cubic", "--start", "0.5,1.5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("Converged"));
    assert!(text.contains("(1.0000, 1.0000)"));
}

#[test]
fn infeasible_starts_exit_3() {
    assert_eq!(code(&["solve", "--problem", "gomez-levy", "--start", "-1,-1"]), 3);
    assert_eq!(code(&["solve", "--problem", "rosenbrock-cubic", "--start", "2,2"]), 3);
}

#[test]
fn usage_errors_exit_4() {
    assert_eq!(code(&["solve", "--problem", "rosenbrock-cubic", "--file", "x.prob"]), 4);
    assert_eq!(code(&["solve", "--file", "/nonexistent.prob"]), 4);
    assert_eq!(code(&["fuzz-projection", "--max-edges", "25"]), 4);
    assert_eq!(code(&["solve", "--problem", "mishra-bird", "--eps", "-1"]), 4);
    assert_eq!(code(&[]), 4);
    assert_eq!(code(&["--version"]), 0);
}

#[test]
fn trace_file_is_reproducible() {
    let dir = std::env::temp_dir().join(format!("csdm-trace-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let a = dir.join("a.csv");
    let b = dir.join("b.csv");
    for path in [&a, &b] {
        let status = code(&["solve", "--file", data_file("mishra_bird.prob").to_str().unwrap(), "--trace", path.to_str().unwrap()]);
        assert_eq!(status, 0);
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    assert_eq!(text.lines().next().unwrap(), trace_header(2));
    let records = parse_trace(&text).unwrap();
    assert_eq!(records[0].active, vec![1, 4]);
    assert_eq!(records[0].t, None);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn gradcheck_exit_codes() {
    assert_eq!(code(&["gradcheck", "--problem", "rosenbrock-cubic"]), 0);
    assert_eq!(code(&["gradcheck", "--problem", "mishra-bird"]), 0);
    assert_eq!(code(&["gradcheck", "--file", data_file("gomez_levy.prob").to_str().unwrap()]), 0);
    let out = csdm(&["gradcheck", "--file", data_file("wrong_domain.prob").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("evaluation"));
}

#[test]
fn fuzz_projection_default_run_passes() {
    assert_eq!(code(&["fuzz-projection", "--count", "1000", "--max-dim", "6", "--max-edges", "6", "--seed", "42"]), 0);
    assert_eq!(code(&["fuzz-projection", "--count", "0"]), 0);
    let out = csdm(&["fuzz-projection", "--count", "20", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["count"], 20);
}

#[test]
fn validate_and_list() {
    assert_eq!(code(&["validate", "--file", data_file("circle_mixed.prob").to_str().unwrap()]), 0);
    assert_eq!(code(&["validate", "--problem", "rosenbrock-cubic", "--start", "2,2"]), 3);
    let out = csdm(&["list"]);
    assert!(String::from_utf8(out.stdout).unwrap().contains("gomez-levy"));
}
