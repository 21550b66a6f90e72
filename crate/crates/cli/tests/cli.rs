use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_clr-lab"));
    c.env_remove("CLR_LAB_CONFIG");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let o = run(&all);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_str(&stdout(&o)).unwrap()
}

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "data", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

const TABLE1: [f64; 7] = [7.55151, 6.32791, 5.95405, 5.77058, 5.67647, 5.63198, 5.62080];

#[test]
fn table_reproduces_published_constants() {
    let v = json(&["table", "--dims", "3..9", "--alpha", "1"]);
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 7);
    for (row, c) in rows.iter().zip(TABLE1) {
        assert!(rel(row["c_gamma"].as_f64().unwrap(), c) < 1e-3, "{row}");
        assert!(row["c_op"].as_f64().unwrap() <= row["c_gamma"].as_f64().unwrap());
    }
    let md = stdout(&run(&["table", "--dims", "3..9", "--alpha", "1", "--format", "md"]));
    assert_eq!(md.lines().filter(|l| l.starts_with("| ") && !l.starts_with("| d ")).count(), 7);
}

#[test]
fn relativistic_row() {
    let v = json(&["table", "--dims", "3", "--alpha", "0.5"]);
    let row = &v["rows"][0];
    assert_eq!(row["gamma"], 6.0);
    assert!(rel(row["c_gamma"].as_f64().unwrap(), 5.77058) < 1e-3);
    assert_eq!(row["reference_daubechies"], 6.08);
    assert!(v["notes"][0].as_str().unwrap().contains("is below"));
}

#[test]
fn csv_has_ten_columns() {
    let o = run(&["table", "--dims", "3,4", "--format", "csv"]);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    for l in lines {
        assert_eq!(l.split(',').count(), 10, "{l}");
    }
}

#[test]
fn invalid_inputs_exit_2() {
    assert_eq!(run(&["table", "--dims", "2", "--alpha", "1"]).status.code(), Some(2));
    assert_eq!(run(&["table", "--dims", "9..3"]).status.code(), Some(2));
    assert_eq!(run(&["optimize", "--gamma", "2"]).status.code(), Some(2));
    assert_eq!(run(&["optimize", "--gamma", "3", "--cells", "9,1"]).status.code(), Some(2));
    assert_eq!(run(&["table", "--dims", "3", "--format", "xml"]).status.code(), Some(2));
    assert_eq!(run(&["check", "--only", "nonsense"]).status.code(), Some(2));
    assert_eq!(run(&["mgamma", "--gamma", "1.5"]).status.code(), Some(2));
}

#[test]
fn optimize_d3_cell() {
    let v = json(&["optimize", "--gamma", "3", "--cells", "2,3"]);
    let r = &v[0];
    assert!((r["alpha"].as_f64().unwrap() - 2.93254).abs() < 1e-2, "{r}");
    assert!((r["beta"].as_f64().unwrap() - 2.49795).abs() < 1e-2, "{r}");
    assert!(rel(r["c_gamma"].as_f64().unwrap(), 7.55151) < 1e-3);
    assert_eq!(r["converged"], true);
}

#[test]
fn optimize_d9_cell() {
    let v = json(&["optimize", "--gamma", "9", "--cells", "3,2"]);
    assert!(rel(v[0]["c_gamma"].as_f64().unwrap(), 5.62080) < 1e-3);
}

#[test]
fn mgamma_and_constant() {
    let m = json(&["mgamma", "--gamma", "3"]);
    let r = &m[0];
    let (lo, up, hi) = (r["m_lower"].as_f64().unwrap(), r["m_upper"].as_f64().unwrap(), r["m_simple"].as_f64().unwrap());
    assert!(lo <= up && up <= hi);
    let c = json(&["constant", "--gamma", "3", "--m", "0.5333333333333333"]);
    assert!((c[0]["c_gamma"].as_f64().unwrap() - 10.8).abs() < 1e-9);
}

#[test]
fn cwikel_flags_ratio_discrepancy() {
    let v = json(&["cwikel", "--p", "4"]);
    let r = &v["rows"][0];
    assert!((r["cwikel_simple"].as_f64().unwrap() - 32.0 / 3.0).abs() < 1e-12);
    assert!((r["cwikel_general"].as_f64().unwrap() - 32.0 / 3.0).abs() < 1e-12);
    assert!((r["frank_ratio"].as_f64().unwrap() - 1.5).abs() < 1e-12);
    assert!(v["notes"][0].as_str().unwrap().contains("(p+2)/2"));
}

#[test]
fn bound_power_symbol_matches_closed_form() {
    let v = json(&["bound", "--symbol", &data("laplacian.json"), "--profile", &data("unit_sample.json")]);
    let r = &v[0];
    let factor = 4.0 / 3.0 * std::f64::consts::PI / (2.0 * std::f64::consts::PI).powi(3);
    assert!(rel(r["bound"].as_f64().unwrap(), 10.8 * factor) < 1e-6, "{r}");
    assert!(r["closed_form_rel_delta"].as_f64().unwrap() < 1e-6);
    assert!((r["lambda"].as_f64().unwrap() - 2.0).abs() < 1e-6);
}

#[test]
fn bound_weak_coupling_marker() {
    let o = run(&["bound", "--symbol", &data("saturating.json"), "--profile", &data("unit_sample.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("unbounded (weak-coupling regime)"));
}

#[test]
fn bound_input_errors() {
    let o = run(&["bound", "--symbol", &data("missing.json"), "--profile", &data("unit_sample.json")]);
    assert_eq!(o.status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"d": 3, "samples": [{"u": 1.0, "w": 1.0}, {"u": -0.1, "w": 1.0}]}"#).unwrap();
    let o = run(&["bound", "--symbol", &data("laplacian.json"), "--profile", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("row 1"));
}

#[test]
fn check_only_sandwich() {
    let o = run(&["check", "--only", "sandwich", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let results = v["results"].as_array().unwrap();
    assert_eq!(results.len(), 8);
    assert!(results.iter().all(|r| r["suite"] == "sandwich" && r["passed"] == true));
}

#[test]
fn check_full_passes_and_is_deterministic() {
    let a = run(&["check"]);
    assert_eq!(a.status.code(), Some(0), "{}", stdout(&a));
    let b = run(&["check"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn loose_quadrature_fails_checks() {
    let o = run(&["check", "--quad-rel-tol", "0.5", "--format", "json"]);
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["failed"].as_u64().unwrap() > 0);
    assert!(v["results"].as_array().unwrap().iter().any(|r| r["passed"] == false));
}

#[test]
fn table_is_deterministic() {
    let args = ["table", "--dims", "3..9", "--seed", "42", "--format", "json"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn config_file_and_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"output_format": "csv", "digits": 3}"#).unwrap();
    let o = run(&["cwikel", "--p", "3", "--config", cfg.to_str().unwrap()]);
    assert!(stdout(&o).starts_with("p,mu,tail"));
    assert!(stdout(&o).contains("10.8,"));
    let o = bin().args(["cwikel", "--p", "3"]).env("CLR_LAB_CONFIG", &cfg).output().unwrap();
    assert!(stdout(&o).starts_with("p,mu,tail"));
    let o = run(&["cwikel", "--p", "3", "--config", cfg.to_str().unwrap(), "--format", "md"]);
    assert!(stdout(&o).starts_with("| p |"));
    std::fs::write(&cfg, r#"{"colour": "red"}"#).unwrap();
    assert_eq!(run(&["cwikel", "--p", "3", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn provenance_and_digits() {
    let o = run(&["constant", "--gamma", "3", "--m", "0.4", "--provenance", "--digits", "4"]);
    let s = stdout(&o);
    assert!(s.contains("| column | source |"));
    assert!(s.contains("γ^{γ+1}/(4(γ-2)^{γ-2})·m"));
    assert!(s.contains("| 8.100 |"));
}
