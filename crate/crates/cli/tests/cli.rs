use std::process::{Command, Output};

use serde_json::Value;
use unitsum_cli::{to_canonical_json, CertificateReport, FieldReport, RewriteReport, TablesReport};

fn unitsum(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_unitsum")).args(args).output().expect("spawn unitsum")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn verify_table_2_matches() {
    let o = unitsum(&["verify-tables", "--table", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("4/4 rows match"));
}

#[test]
fn verify_tables_json_is_deterministic() {
    let a = unitsum(&["--format", "json", "verify-tables", "--table", "all"]);
    let b = Command::new(env!("CARGO_BIN_EXE_unitsum"))
        .args(["--format", "json", "verify-tables", "--table", "all"])
        .env("RAYON_NUM_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let r: TablesReport = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!((r.matched, r.total), (28, 28));
}

#[test]
fn rewrite_zero_is_empty() {
    let o = unitsum(&["rewrite", "--word", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "0");
    let o = unitsum(&["--format", "json", "rewrite", "--word", "0"]);
    let r: RewriteReport = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r.output, "0");
}

#[test]
fn rewrite_trace_is_listed() {
    let o = unitsum(&["--format", "json", "rewrite", "--word", "2,-3,1@0", "--trace"]);
    assert_eq!(o.status.code(), Some(0));
    let r: RewriteReport = serde_json::from_slice(&o.stdout).unwrap();
    assert!(!r.trace.unwrap().is_empty());
    assert!(r.output.split('@').next().unwrap().split(',').all(|d| ["-1", "0", "1"].contains(&d)));
}

#[test]
fn expand_one_minus_gamma() {
    let o = unitsum(&["--format", "json", "expand", "--field", "q-sqrt-1-zeta4", "--alpha", "1,-1,0,0"]);
    assert_eq!(o.status.code(), Some(0));
    let r: CertificateReport = serde_json::from_slice(&o.stdout).unwrap();
    assert!(r.verified);
    assert_eq!(r.terms.len(), 1);
    assert_eq!((r.terms[0].coefficient, r.terms[0].exponent, r.terms[0].root_index), (1, -1, Some(3)));
}

#[test]
fn expand_with_delta() {
    let o = unitsum(&["expand", "--field", "q-sqrt-1-2zeta4", "--alpha", "7,-3,2,5", "--delta", "1e-4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("verified true"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(unitsum(&["expand", "--field", "no-such-field", "--alpha", "1,0,0,0"]).status.code(), Some(2));
    assert_eq!(unitsum(&["expand", "--field", "q-sqrt-1-zeta4", "--alpha", "1,0"]).status.code(), Some(2));
    assert_eq!(unitsum(&["rewrite", "--word", "1,x"]).status.code(), Some(2));
    assert_eq!(unitsum(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(unitsum(&["analyze", "--field", "q-sqrt-1-zeta4", "--embedding", "7"]).status.code(), Some(2));
}

#[test]
fn analyze_report_round_trips() {
    let o = unitsum(&["--format", "json", "analyze", "--field", "q-sqrt-1-2zeta4"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let r: FieldReport = serde_json::from_str(&text).unwrap();
    assert_eq!(r.schema, 1);
    assert_eq!((r.w, r.c, r.b), (1, 8, Some(2)));
    assert_eq!(to_canonical_json(&r).unwrap(), text.trim_end());
}

#[test]
fn precision_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_unitsum"))
        .args(["--format", "json", "analyze", "--field", "q-sqrt-1-zeta4"])
        .env("UNITSUM_PRECISION_BITS", "320")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["precision_bits"], 320);
}

#[test]
fn covering_exact_reports_witness() {
    let o = unitsum(&["--format", "json", "covering", "--field", "q-sqrt-17-12zeta3", "--w", "1", "--exact"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["exact"]["status"], "not_covered");
    assert!(v["exact"]["witness"].is_array());
}

#[test]
fn critical_points_json_file() {
    let dir = std::env::temp_dir().join(format!("unitsum-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("points.json");
    let o = unitsum(&["critical-points", "--field", "q-sqrt-1-zeta4", "--w", "1", "--json", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["points"].as_array().unwrap().len(), 4);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn round_trip_is_seeded() {
    let args = ["--format", "json", "round-trip", "--field", "x4-x+1", "--count", "20", "--seed", "3"];
    let a = unitsum(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, unitsum(&args).stdout);
}

#[test]
fn catalog_lists_all_fields() {
    let o = unitsum(&["--format", "json", "catalog"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema"], 1);
    assert!(v["fields"].as_array().unwrap().len() >= 29);
}
