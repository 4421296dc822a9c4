use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use polyreason::harness::{read_jsonl, Instance};

fn bin(dir: &Path) -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_polyreason"));
    c.current_dir(dir);
    c
}

fn run_with_stdin(mut cmd: Command, input: &str) -> Output {
    let mut child = cmd.stdin(Stdio::piped()).stdout(Stdio::piped()).stderr(Stdio::piped()).spawn().unwrap();
    let _ = child.stdin.take().unwrap().write_all(input.as_bytes());
    child.wait_with_output().unwrap()
}

const LP: &str = "STATEMENT:\nBob is a wumpus. Every wumpus is big.\n\nQUESTION:\nBob is big.\n\nA) True\nB) False";

#[test]
fn solve_prints_the_option_and_writes_a_trace() {
    let dir = tempfile::tempdir().unwrap();
    let mut cmd = bin(dir.path());
    cmd.args(["solve", "-", "--trace", "t.json"]);
    let out = run_with_stdin(cmd, LP);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "A) True");
    let trace: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("t.json")).unwrap()).unwrap();
    assert!(trace["plan"].is_object());
}

#[test]
fn solve_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let mut cmd = bin(dir.path());
    cmd.args(["solve", "--no-trace"]);
    assert_eq!(run_with_stdin(cmd, "").status.code(), Some(2));
    let out = bin(dir.path()).args(["solve", "missing.txt", "--no-trace"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.txt"));
    assert!(!dir.path().join("runs").exists());
}

#[test]
fn multi_question_answers_are_numbered() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!("Answer the following questions one by one.\n\nQ1:{LP}\n\nQ2:{}", LP.replace("Bob is big.", "Bob is not big."));
    let mut cmd = bin(dir.path());
    cmd.args(["solve", "--no-trace"]);
    let out = run_with_stdin(cmd, &text);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout), "Q1: A) True\nQ2: B) False\n");
}

#[test]
fn gen_is_deterministic_and_solvable() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a.jsonl", "b.jsonl"] {
        let s = bin(dir.path()).args(["gen", "csp", "--objects", "5", "--n", "6", "--seed", "9", "--out", name]).status().unwrap();
        assert!(s.success());
    }
    let a = std::fs::read(dir.path().join("a.jsonl")).unwrap();
    assert_eq!(a, std::fs::read(dir.path().join("b.jsonl")).unwrap());
    let set: Vec<Instance> = read_jsonl(&dir.path().join("a.jsonl")).unwrap();
    assert_eq!(set.len(), 6);
    let mut cmd = bin(dir.path());
    cmd.args(["solve", "--no-trace"]);
    let out = run_with_stdin(cmd, &set[0].nl_text);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with(&set[0].gold_answer));
}

#[test]
fn gen_rejects_bad_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin(dir.path()).args(["gen", "csp", "--objects", "4", "--out", "x.jsonl"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = bin(dir.path()).args(["gen", "nonsense", "--out", "x.jsonl"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn eval_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    assert!(bin(dir.path()).args(["gen", "smt", "--n", "6", "--out", "smt.jsonl"]).status().unwrap().success());
    assert!(bin(dir.path()).args(["gen", "lp-open", "--n", "6", "--out", "lp.jsonl"]).status().unwrap().success());
    let out = bin(dir.path())
        .args(["eval", "smt.jsonl", "lp.jsonl", "--seeds", "2", "--batch", "3", "--out", "report"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["report-1.json", "report-1.txt", "runs-1.jsonl", "report-2.json", "summary.json"] {
        assert!(dir.path().join("report").join(f).exists(), "{f}");
    }
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report/report-1.json")).unwrap()).unwrap();
    assert_eq!(report["runs"], 4);
    assert_eq!(report["overall_accuracy"], 1.0);
}

#[test]
fn check_reports_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("ok.smt2"), "(declare-const x Int)\n(assert (> x 1))\n(check-sat)\n").unwrap();
    std::fs::write(dir.path().join("bad.smt2"), "(declare-const x Int)\n(assert (> y 1))\n(check-sat)\n").unwrap();
    let ok = bin(dir.path()).args(["check", "ok.smt2", "--lang", "smt"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let bad = bin(dir.path()).args(["check", "bad.smt2", "--lang", "smt"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stdout).starts_with("2:"));
}

#[test]
fn route_prints_the_wire_plan() {
    let dir = tempfile::tempdir().unwrap();
    let mut cmd = bin(dir.path());
    cmd.arg("route");
    let out = run_with_stdin(cmd, LP);
    assert_eq!(out.status.code(), Some(0));
    let plan: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(plan["agents"], serde_json::json!(["ques_1", "lp_solver:1", "<END>"]));
}

#[test]
fn bad_config_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.toml"), "[execution]\njobs = 0\n").unwrap();
    let mut cmd = bin(dir.path());
    cmd.args(["--config", "c.toml", "solve", "--no-trace"]);
    let out = run_with_stdin(cmd, LP);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("jobs"));
}
