//! End-to-end CLI tests driving the compiled binary.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_floodgraph"))
}

fn fixture(name: &str, content: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("floodgraph-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    fs::write(&path, content).unwrap();
    path
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn centroid_of_segment_and_star() {
    let seg = fixture("seg.txt", "a b 1.0\n");
    let out = bin().args(["centroid", "--graph"]).arg(&seg).output().unwrap();
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "edge 0 offset 0.5");

    let star = fixture("star311.txt", "c l1 3\nc l2 1\nc l3 1\n");
    let out = bin().args(["centroid", "--graph"]).arg(&star).output().unwrap();
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "edge 0 offset 0.5");
}

#[test]
fn centroid_rejects_cycles() {
    let cyc = fixture("cyc.txt", "a b 1\nb c 1\nc a 1\n");
    let out = bin().args(["centroid", "--graph"]).arg(&cyc).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("NotATree"));
}

#[test]
fn malformed_graph_reports_line() {
    let bad = fixture("bad.txt", "a b 1.0\na b\n");
    let out = bin().args(["centroid", "--graph"]).arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));
}

#[test]
fn flood_trace_and_beta_roundtrip() {
    let seg = fixture("seg2.txt", "a b 1.0\n");
    let out = bin()
        .args(["flood", "--m", "1", "--graph"])
        .arg(&seg)
        .output()
        .unwrap();
    assert!(out.status.success());
    let trace = stdout(&out);
    assert!(trace.starts_with("stage 1 0 1"));
    assert_eq!(trace.lines().count(), 3);

    let trace_path = fixture("seg.trace", &trace);
    let out = bin().arg("beta").arg(&trace_path).output().unwrap();
    assert!(out.status.success());
    let b: f64 = stdout(&out).trim().parse().unwrap();
    assert!((b - 2.0f64.ln()).abs() < 1e-9);
}

#[test]
fn circle_uniform_flood_gives_log2() {
    let circle = fixture(
        "circle.txt",
        "a b 0.3333333333333333\nb c 0.3333333333333333\nc a 0.3333333333333334\n",
    );
    let out = bin()
        .args(["flood", "--m", "1", "--policy", "uniform", "--graph"])
        .arg(&circle)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    let trace_path = fixture("circle.trace", &stdout(&out));
    let out = bin().arg("beta").arg(&trace_path).output().unwrap();
    assert!(out.status.success());
    let b: f64 = stdout(&out).trim().parse().unwrap();
    assert!((b - 2.0f64.ln()).abs() < 1e-9, "beta {b}");
}

#[test]
fn uniform_and_optimal_differ_on_lopsided_star() {
    let star = fixture("star311b.txt", "c l1 3\nc l2 1\nc l3 1\n");
    let optimal = bin()
        .args(["flood", "--m", "1", "--policy", "optimal", "--graph"])
        .arg(&star)
        .output()
        .unwrap();
    let uniform = bin()
        .args(["flood", "--m", "1", "--policy", "uniform", "--graph"])
        .arg(&star)
        .output()
        .unwrap();
    assert!(optimal.status.success() && uniform.status.success());
    assert_ne!(stdout(&optimal), stdout(&uniform));
}

#[test]
fn beta_rejects_bad_rates() {
    let trace = fixture("bad.trace", "stage 1 0 1\n0 0.5 1 0.7\n0 0.5 -1 0.7\n");
    let out = bin().arg("beta").arg(&trace).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("BadPolicy"), "{}", stderr(&out));

    // A single rate-1 arm is a valid zero-entropy trace.
    let trace = fixture("single.trace", "stage 1 0 1\n0 0 1 1\n");
    let out = bin().arg("beta").arg(&trace).output().unwrap();
    assert!(out.status.success());
    let b: f64 = stdout(&out).trim().parse().unwrap();
    assert_eq!(b, 0.0);
}

#[test]
fn sample_is_deterministic_and_writes_histogram() {
    let seg = fixture("seg3.txt", "a b 1.0\n");
    let run = |tag: &str| {
        let dump = fixture(&format!("dump-{tag}.txt"), "");
        let hist = fixture(&format!("hist-{tag}.csv"), "");
        let out = bin()
            .args(["sample", "--n", "3", "--m", "1", "--trials", "50", "--seed", "7", "--graph"])
            .arg(&seg)
            .arg("--out")
            .arg(&dump)
            .arg("--hist")
            .arg(&hist)
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", stderr(&out));
        (fs::read_to_string(&dump).unwrap(), fs::read_to_string(&hist).unwrap())
    };
    let (d1, h1) = run("a");
    let (d2, h2) = run("b");
    assert_eq!(d1, d2);
    assert_eq!(h1, h2);
    assert_eq!(d1.lines().count(), 50);
    // Every dump line: seed trial peakcount labels...
    let first = d1.lines().next().unwrap();
    let fields: Vec<&str> = first.split_whitespace().collect();
    assert_eq!(fields[0], "7");
    assert_eq!(fields[2], "1");
    assert!(h1.starts_with("vertex,count,frequency\n"));
}

#[test]
fn sample_budget_exhaustion_exits_3() {
    let seg = fixture("seg4.txt", "a b 1.0\n");
    let out = bin()
        .args([
            "sample", "--n", "4", "--m", "1", "--trials", "1000", "--seed", "0", "--budget", "20",
            "--graph",
        ])
        .arg(&seg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("BudgetExhausted"));
}

#[test]
fn validate_circle_passes() {
    let out = bin().args(["validate", "circle"]).output().unwrap();
    assert!(out.status.success(), "{}", stdout(&out));
    assert!(stdout(&out).contains("beta_equals_log_2M"));
}

#[test]
fn validate_unknown_suite_is_usage_error() {
    let out = bin().args(["validate", "nonsense"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("unknown suite"));
}
