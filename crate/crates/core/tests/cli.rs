use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_logpurity"));
    c.env_remove("LOGPURITY_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn dims(v: &Value) -> Vec<u64> {
    v["dims"].as_array().unwrap().iter().map(|d| d.as_u64().unwrap()).collect()
}

#[test]
fn plane_one_forms() {
    let out = run(&["cohomology", "--space", "P2", "--form-degree", "1", "--twist", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(dims(&v), vec![0, 1, 0]);
    assert_eq!(v["elapsed_ms"], Value::Null);
}

#[test]
fn line_structure_sheaf_twisted_down() {
    let out = run(&["cohomology", "--space", "P1", "--sheaf", "O", "--twist", "-2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(dims(&json(&out)), vec![0, 1]);
}

#[test]
fn blowup_surface_is_acyclic() {
    let out = run(&["cohomology", "--space", "blowup", "--m", "2", "--c", "2", "--form-degree", "1", "-p", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(dims(&v)[1..].iter().all(|&d| d == 0));
    assert_eq!(v["truncated_degrees"], serde_json::json!([0]));
}

#[test]
fn text_table() {
    let out = run(&["cohomology", "--space", "P3", "-j", "2", "--format", "text"]);
    let s = stdout(&out);
    assert!(s.contains("H^2 = 1"), "{s}");
    assert!(s.contains("H^1 = 0"), "{s}");
}

#[test]
fn verify_cartier_passes() {
    let out = run(&["verify", "cartier", "-p", "3", "-m", "2", "--format", "text"]);
    assert_eq!(out.status.code(), Some(0));
    let s = stdout(&out);
    let lines: Vec<&str> = s.lines().filter(|l| l.starts_with("cartier-axioms")).collect();
    assert_eq!(lines.len(), 2);
    assert!(lines.iter().all(|l| l.contains(" PASS ") && l.contains("p=3")));
}

#[test]
fn verify_purity_square() {
    let out = run(&["verify", "purity-square", "-p", "2", "-m", "2", "-n", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let checks = v.as_array().unwrap();
    assert!(!checks.is_empty());
    assert!(checks.iter().all(|c| c["verdict"] == "PASS" && c["params"]["n"] == 1));
}

#[test]
fn verify_obstruction_wording() {
    let out = run(&["verify", "obstruction", "-p", "2", "--format", "text"]);
    assert_eq!(out.status.code(), Some(0));
    let s = stdout(&out);
    assert!(s.contains("no Laurent preimage; extension preimage found"), "{s}");
    assert!(s.contains(" PASS "));
}

#[test]
fn failing_check_exits_three() {
    // P^0 has no generator check; the error is reported as a failed check
    let out = run(&["verify", "generators", "-p", "2", "-n", "0"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(json(&out).as_array().unwrap().iter().all(|c| c["verdict"] == "FAIL"));
}

#[test]
fn identical_runs_are_byte_identical() {
    for args in [&["verify", "nu", "-p", "2", "-m", "2"][..], &["report", "--max-n", "2"][..]] {
        let a = run(args);
        let b = run(args);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn timings_fill_elapsed() {
    let v = json(&run(&["verify", "obstruction", "-p", "2", "--timings"]));
    assert!(v[0]["elapsed_ms"].is_u64());
    let v = json(&run(&["verify", "obstruction", "-p", "2"]));
    assert!(v[0]["elapsed_ms"].is_null());
}

#[test]
fn csv_columns() {
    let out = run(&["verify", "connecting", "-p", "2", "--format", "csv"]);
    let s = stdout(&out);
    let mut lines = s.lines();
    assert_eq!(lines.next(), Some("check,params,verdict,dims,elapsed_ms"));
    let row = lines.next().unwrap();
    assert!(row.starts_with("connecting,n=1;p=2,PASS,"), "{row}");
    assert!(row.ends_with(','), "elapsed column is empty without --timings: {row}");
}

#[test]
fn report_sweep() {
    let out = run(&["report", "-p", "2,3", "--max-n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let entries = v.as_array().unwrap();
    // (n, j) ∈ {(1,0),(1,1),(2,0),(2,1),(2,2)} for each prime
    assert_eq!(entries.len(), 10);
    for e in entries {
        assert_eq!(e["schema_version"], 1);
        let j = e["spec"]["j"].as_u64().unwrap() as usize;
        let d = dims(e);
        assert!(d.iter().enumerate().all(|(i, &x)| x == u64::from(i == j)));
    }
}

#[test]
fn empty_sweep() {
    let out = run(&["report", "--max-n", "0"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "[]\n");
}

#[test]
fn output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cartier.json");
    let out = run(&["verify", "obstruction", "-p", "3", "-o", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v[0]["params"]["p"], 3);
}

#[test]
fn malformed_output_path() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("missing").join("out.json");
    let out = run(&["report", "--max-n", "1", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("i/o error"));
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        &["cohomology", "--space", "P2", "-p", "4"][..],
        &["cohomology", "--space", "P2", "-p", "257"][..],
        &["cohomology", "--space", "Q2"][..],
        &["cohomology", "--space", "P2", "--form-degree", "3"][..],
        &["cohomology", "--space", "P2", "--radius", "65"][..],
        &["cohomology", "--space", "blowup", "--m", "2"][..],
        &["verify", "nope"][..],
        &["verify", "nu", "-m", "7"][..],
        &["frobnicate"][..],
        &["verify", "nu", "--bogus"][..],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn resource_cap_exits_two() {
    let out = run(&["cohomology", "--space", "P1", "--radius", "10", "--cap", "5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("resource limit"));
}

#[test]
fn thread_env() {
    let out = bin().args(["verify", "obstruction", "-p", "2"]).env("LOGPURITY_THREADS", "2").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let out = bin().args(["verify", "obstruction", "-p", "2"]).env("LOGPURITY_THREADS", "zero").output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn help_exits_zero() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn schema_matches_output_keys() {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../schema/report.schema.json");
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(schema["x-schema-version"], logpurity::cli::SCHEMA_VERSION);
    let keys = |v: &Value| {
        let mut k: Vec<String> = v.as_object().unwrap().keys().cloned().collect();
        k.sort();
        k
    };
    let required = |name: &str| {
        let mut k: Vec<String> =
            schema["$defs"][name]["required"].as_array().unwrap().iter().map(|s| s.as_str().unwrap().to_string()).collect();
        k.sort();
        k
    };
    assert_eq!(keys(&json(&run(&["verify", "obstruction", "-p", "2"]))[0]), required("checkOutcome"));
    assert_eq!(keys(&json(&run(&["cohomology", "--space", "P1"]))), required("cohomologyReport"));
    assert_eq!(keys(&json(&run(&["report", "--max-n", "1"]))[0]), required("reportEntry"));
}
