mod common;

use std::process::Command;

use bnb_tsp::audit::{AuditReport, Section4Fixture};
use bnb_tsp::cli::{run, EXIT_FAILED, EXIT_OK, EXIT_USAGE};
use bnb_tsp::{branch_bound, TraceChain};
use common::{c_star, C_STAR};
use tempfile::TempDir;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("bnb-tsp").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn solve_prints_tour_and_length() {
    let dir = TempDir::new().unwrap();
    let star = write(&dir, "star.txt", C_STAR);
    let (code, out, _) = call(&["solve", "--matrix", &star]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(
        out,
        "tour: 1→2→3→4→1\nlength: 0\ncomparisons: 148 (55 nontrivial)\n"
    );

    let cx = Section4Fixture::transcribed().cases[0]
        .matrix
        .to_structured();
    let cx = write(&dir, "cx.json", &cx);
    let (code, out, _) = call(&["solve", "--matrix", &cx, "--format", "structured"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(v["length"], 5);
}

#[test]
fn trace_out_round_trips() {
    let dir = TempDir::new().unwrap();
    let star = write(&dir, "star.txt", C_STAR);
    let full = dir.path().join("full.jsonl");
    let filtered = dir.path().join("filtered.jsonl");
    assert_eq!(
        call(&[
            "solve",
            "--matrix",
            &star,
            "--trace-out",
            full.to_str().unwrap()
        ])
        .0,
        EXIT_OK
    );
    let args = [
        "solve",
        "--matrix",
        &star,
        "--filter-trivial",
        "--trace-out",
        filtered.to_str().unwrap(),
    ];
    assert_eq!(call(&args).0, EXIT_OK);
    let full = TraceChain::from_jsonl(&std::fs::read_to_string(full).unwrap()).unwrap();
    let filtered = TraceChain::from_jsonl(&std::fs::read_to_string(filtered).unwrap()).unwrap();
    assert_eq!(full, branch_bound(&c_star()).unwrap().trace);
    assert_eq!(filtered, full.filter_nontrivial());
}

#[test]
fn input_errors_exit_with_usage_code() {
    let dir = TempDir::new().unwrap();
    let tiny = write(&dir, "tiny.txt", "2\n- 1\n1 -\n");
    let (code, _, err) = call(&["solve", "--matrix", &tiny]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.starts_with("error:"));
    let garbage = write(&dir, "bad.txt", "3\n- x 1\n");
    assert_eq!(call(&["solve", "--matrix", &garbage]).0, EXIT_USAGE);
    assert_eq!(
        call(&["solve", "--matrix", "/nonexistent/matrix.txt"]).0,
        EXIT_USAGE
    );
    assert_eq!(call(&["enumerate", "--n", "9"]).0, EXIT_USAGE);
    assert_eq!(call(&["adjacency", "--n", "7"]).0, EXIT_USAGE);
    assert_eq!(call(&["frobnicate"]).0, EXIT_USAGE);
    assert_eq!(call(&["audit", "chain", "--tour", "1 2 3 4"]).0, EXIT_USAGE);
    assert_eq!(call(&["--help"]).0, EXIT_OK);
}

#[test]
fn builtin_audits_pass() {
    let dir = TempDir::new().unwrap();
    let report = dir.path().join("node.json");
    let (code, out, _) = call(&["audit", "section4", "--out", report.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("PASS"));
    assert!(
        AuditReport::from_json(&std::fs::read_to_string(report).unwrap())
            .unwrap()
            .passed()
    );

    let (code, out, _) = call(&["audit", "section5", "--format", "structured"]);
    assert_eq!(code, EXIT_OK);
    let report = AuditReport::from_json(out.trim()).unwrap();
    assert!(report.passed());
    assert_eq!(report.adjacent, Some(true));
}

#[test]
fn chain_audit_exit_codes() {
    let dir = TempDir::new().unwrap();
    let star = write(&dir, "star.txt", C_STAR);
    let (code, out, _) = call(&["audit", "chain", "--matrix", &star, "--tour", "1 4 2 3"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("VIOLATES(*)"));
    // The leaf itself is a degenerate query.
    let (code, out, _) = call(&["audit", "chain", "--matrix", &star, "--tour", "1 2 3 4"]);
    assert_eq!(code, EXIT_FAILED);
    assert!(out.contains("DEGENERATE"));
}

#[test]
fn enumerate_and_adjacency() {
    let (code, out, _) = call(&["enumerate", "--n", "5"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.lines().count(), 24);
    assert_eq!(out.lines().next(), Some("1 2 3 4 5"));

    let dir = TempDir::new().unwrap();
    let star = write(&dir, "star.txt", C_STAR);
    let (_, out, _) = call(&["enumerate", "--matrix", &star]);
    let lengths: Vec<&str> = out.lines().map(|l| l.split('\t').nth(1).unwrap()).collect();
    assert_eq!(lengths, ["0", "5", "6", "5", "3", "7"]);

    let (code, out, _) = call(&["adjacency", "--n", "4"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("adjacent pairs: 15/15\n"));
}

#[test]
fn lemma1_command() {
    let (code, out, _) = call(&["lemma1", "--n", "4", "--cases", "50", "--seed", "3"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("50/50"));
}

#[test]
fn binary_output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let star = write(&dir, "star.txt", C_STAR);
    let exe = env!("CARGO_BIN_EXE_bnb-tsp");
    let trace = |name: &str| {
        let path = dir.path().join(name);
        let out = Command::new(exe)
            .args([
                "solve",
                "--matrix",
                &star,
                "--format",
                "structured",
                "--trace-out",
            ])
            .arg(&path)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(EXIT_OK));
        (out.stdout, std::fs::read(path).unwrap())
    };
    assert_eq!(trace("a.jsonl"), trace("b.jsonl"));
    let status = Command::new(exe)
        .args(["enumerate", "--n", "2"])
        .output()
        .unwrap()
        .status;
    assert_eq!(status.code(), Some(EXIT_USAGE));
}
