use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn bary(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bary")).args(args).env_remove("BARY_SEED").output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

#[test]
fn weighted_mean_strong_check_fails_with_a_witness() {
    let o = bary(&["check", "--op", "builtin:weighted-pow2", "--prop", "strong-b-assoc", "--format", "json", "--samples", "500"]);
    assert_eq!(code(&o), 1);
    let j = stdout_json(&o);
    let v = &j["verdicts"][0];
    assert_eq!(v["status"], "fails");
    assert_eq!(v["witness"]["property"], "STRONG_B_ASSOC_DEF");
    assert_eq!(v["witness"]["size"], 3);
}

#[test]
fn b_associativity_holds_for_the_weighted_mean() {
    let o = bary(&["check", "--op", "builtin:weighted-pow2", "--prop", "b-assoc", "--samples", "300"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn json_reports_are_byte_identical() {
    let args = ["suite", "--op", "builtin:weighted-pow2", "--samples", "100", "--max-len", "3", "--format", "json"];
    let a = bary(&args);
    let b = bary(&args);
    let mut seq_args = args.to_vec();
    seq_args.extend(["--jobs", "1"]);
    let s = bary(&seq_args);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, s.stdout);
    assert_eq!(code(&a), 1);
}

#[test]
fn seed_comes_from_the_environment() {
    let run = |seed: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_bary"));
        c.args(["check", "--op", "builtin:arith-mean", "--prop", "b-assoc", "--samples", "20", "--format", "json"]);
        match seed {
            Some(s) => c.env("BARY_SEED", s),
            None => c.env_remove("BARY_SEED"),
        };
        stdout_json(&c.output().unwrap())
    };
    assert_eq!(run(Some("99"))["domain"]["seed"], 99);
    assert_eq!(run(None)["domain"]["seed"], 42);
}

#[test]
fn replay_reproduces_a_stored_violation() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let o = bary(&[
        "check",
        "--op",
        "builtin:weighted-pow2",
        "--prop",
        "strong-b-assoc",
        "--samples",
        "200",
        "--format",
        "json",
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 1);
    let r = bary(&["check", "--op", "builtin:weighted-pow2", "--replay", report.to_str().unwrap(), "--format", "json"]);
    assert_eq!(code(&r), 1, "{}", String::from_utf8_lossy(&r.stderr));
    assert!(String::from_utf8_lossy(&r.stdout).contains("violated"));
}

#[test]
fn replay_of_a_hand_written_witness() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w.json");
    std::fs::write(
        &w,
        json!({"property": "STRONG_B_ASSOC_DEF", "instance": {"x": [0.5, 0.5, 0.5], "K": [1, 3]}}).to_string(),
    )
    .unwrap();
    let r = bary(&["check", "--op", "builtin:weighted-pow2", "--replay", w.to_str().unwrap()]);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
}

fn write_first_projection(dir: &Path) -> String {
    let mut tables = serde_json::Map::new();
    for n in 1..=3usize {
        let mut t = serde_json::Map::new();
        for i in 0..(1u32 << n) {
            let key: String = (0..n).map(|k| if i >> (n - 1 - k) & 1 == 1 { 'b' } else { 'a' }).collect();
            let first = key[..1].to_string();
            t.insert(key, json!(first));
        }
        tables.insert(n.to_string(), Value::Object(t));
    }
    let spec = json!({"kind": "table", "name": "first", "alphabet": ["a", "b"], "tables": tables});
    let path = dir.join("first.json");
    std::fs::write(&path, spec.to_string()).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn table_spec_files_are_checked_exhaustively() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_first_projection(dir.path());
    let o = bary(&["check", "--op", &path, "--prop", "strong-b-assoc,symmetric", "--format", "json"]);
    assert_eq!(code(&o), 1);
    let j = stdout_json(&o);
    assert_eq!(j["domain"]["mode"], "exhaustive");
    assert_eq!(j["verdicts"][0]["status"], "holds");
    assert_eq!(j["verdicts"][1]["status"], "fails");
    let f = bary(&["factorize", "--op", &path, "--max-len", "3"]);
    assert_eq!(code(&f), 0, "{}", String::from_utf8_lossy(&f.stdout));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(code(&bary(&["check", "--op", "missing.json"])), 2);
    assert_eq!(code(&bary(&["check", "--op", "builtin:arith-mean", "--prop", "no-such-law"])), 2);
    assert_eq!(code(&bary(&["frobnicate"])), 2);
    assert_eq!(code(&bary(&["--help"])), 0);
}

#[test]
fn factorize_refuses_non_preassociative_tables() {
    let o = bary(&["factorize", "--op", "table:non-preassoc-random", "--format", "json"]);
    assert_eq!(code(&o), 1);
    assert_eq!(stdout_json(&o)["refused"]["property"], "B_PREASSOC");
}

#[test]
fn general_factorization_of_length() {
    let o = bary(&["factorize", "--op", "table:length-like", "--general"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn extract_recovers_log2_for_the_geometric_mean() {
    let o = bary(&[
        "extract", "--op", "builtin:geometric-mean", "--interval", "1,2", "--grid-q", "1024", "--compare", "log2",
        "--format", "json", "--samples", "300",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let j = stdout_json(&o);
    assert_eq!(j["compare"]["fit"]["holds"], true);
    assert_eq!(j["residuals"]["within"], true);
}

#[test]
fn extract_flags_a_non_quasi_arithmetic_mean() {
    let o = bary(&["extract", "--op", "builtin:weighted-pow2", "--interval", "0,1", "--samples", "300"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn pre_mean_extraction_of_the_product() {
    let o = bary(&[
        "extract", "--op", "builtin:product", "--interval", "1,2", "--pre-mean", "--grid-q", "512", "--refine", "3",
        "--residual-tol", "1e-6", "--samples", "300",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn psi_identity_holds_for_the_arithmetic_mean() {
    let o = bary(&["psi", "--op", "builtin:arith-mean", "--interval", "0,1", "--grid-q", "16", "--max-len", "3", "--check", "--tol", "1e-12"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    assert!(String::from_utf8_lossy(&o.stdout).contains("holds"));
}
