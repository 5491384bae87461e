use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn rncurves(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rncurves"))
        .args(args)
        .env_remove("RNCURVES_CONFIG")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn keys(v: &Value) -> Vec<&str> {
    v.as_object().unwrap().keys().map(String::as_str).collect()
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

fn scratch(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("rncurves-{}-{name}", std::process::id()))
}

#[test]
fn curve_info_schema_and_roots() {
    let v = json(&rncurves(&["curve-info", "--coeffs", "0,-1,0"]));
    assert_eq!(keys(&v), ["curve", "roots", "coeffs", "discriminant", "conj_symmetric"]);
    let roots: Vec<(f64, f64)> = v["roots"].as_array().unwrap().iter().map(|z| (f(&z[0]), f(&z[1]))).collect();
    assert_eq!(roots, [(-1.0, 0.0), (0.0, 0.0), (1.0, 0.0)]);
    assert_eq!(v["conj_symmetric"], Value::Bool(true));
    assert_eq!(f(&v["discriminant"][0]), 4.0);
}

#[test]
fn curve_sources_agree() {
    let a = rncurves(&["curve-info", "--roots", "-1,0,1"]);
    let b = rncurves(&["curve-info", "--family", "i", "--g2", "1", "--g3", "0"]);
    let c = rncurves(&["curve-info", "--coeffs", "0,-1,0"]);
    assert_eq!(json(&a)["roots"], json(&c)["roots"]);
    assert_eq!(json(&b)["coeffs"], json(&c)["coeffs"]);
    let complex = json(&rncurves(&["curve-info", "--roots", "1,0.5+2i,0.5-2i"]));
    assert_eq!(complex["conj_symmetric"], Value::Bool(true));
}

#[test]
fn degenerate_and_malformed_curves_exit_2() {
    for args in [
        &["curve-info", "--coeffs", "0,0,0"][..],
        &["curve-info", "--coeffs", "1,2"],
        &["curve-info", "--coeffs", "1,x,2"],
        &["curve-info"],
        &["kdv", "--roots", "1,1,2"],
        &["frobnicate"],
    ] {
        let out = rncurves(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn kdv_is_real_and_deterministic() {
    let args = ["kdv", "--roots", "-1.2,0.3,0.9"];
    let a = rncurves(&args);
    let b = rncurves(&args);
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(keys(&v)[..5], ["H", "T1", "qde2", "im_H", "periods"]);
    assert_eq!(keys(&v["H"]), ["m1", "p1", "p3"]);
    for h in v["im_H"].as_array().unwrap() {
        assert!(f(h).abs() < 1e-10);
    }
    // The two conventions differ by the factor −2.
    assert!((f(&v["qde2"]["H"]["1"][0]) + 2.0 * f(&v["H"]["p1"][0])).abs() < 1e-12);
    assert!((f(&v["T1"][0]) + 2.0 * f(&v["H"]["m1"][0])).abs() < 1e-12);
}

#[test]
fn kdv_order_limit_is_an_input_error() {
    let out = rncurves(&["kdv", "--coeffs", "0,-1,0", "--order", "50"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("50"));
    let out = rncurves(&["kdv", "--coeffs", "0,-1,0", "--tol", "-1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn kdv_handles_genus_two() {
    let v = json(&rncurves(&["kdv", "--roots", "-2,-1,0,1,2.5"]));
    assert_eq!(v["periods"]["A"].as_array().unwrap().len(), 2);
    assert!(f(&v["periods"]["max_abs_imag"]) < 1e-10);
}

#[test]
fn boutroux_schema_and_scale_invariance() {
    let one = json(&rncurves(&["boutroux", "--g2", "1"]));
    assert_eq!(keys(&one), ["family", "g2", "g3", "residuals", "ratio", "implied_h", "iterations"]);
    assert_eq!(one["family"], "iv:4E3+g2E-g3");
    let sixteen = json(&rncurves(&["boutroux", "--g2", "16"]));
    assert!((f(&one["ratio"]) - f(&sixteen["ratio"])).abs() < 1e-8);
}

#[test]
fn boutroux_without_solution_exits_1_with_bracket() {
    let out = rncurves(&["boutroux", "--family", "i", "--bracket", "0.01,3"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("[0.01, 3]"), "{err}");
    assert_eq!(rncurves(&["boutroux", "--family", "v"]).status.code(), Some(2));
    assert_eq!(rncurves(&["boutroux", "--g2", "-1"]).status.code(), Some(2));
    assert_eq!(rncurves(&["boutroux", "--bracket", "3,1"]).status.code(), Some(2));
    assert_eq!(rncurves(&["boutroux", "--scan", "--bracket", "0,1"]).status.code(), Some(2));
}

#[test]
fn scan_reports_every_family() {
    let out = rncurves(&["boutroux", "--g2", "1", "--scan"]);
    let v = json(&out);
    let entries = v.as_array().unwrap();
    assert_eq!(entries.len(), 4);
    for e in entries {
        assert_eq!(keys(e), ["family", "status", "ratio", "implied_h", "h_error"]);
    }
    assert!(entries.iter().any(|e| e["status"] == "no_solution_in_bracket"));
    assert_eq!(entries[0]["family"], "iv:4E3+g2E-g3");
    assert!(f(&entries[0]["h_error"]) < 1e-6);
    assert_eq!(out.stdout, rncurves(&["boutroux", "--g2", "1", "--scan"]).stdout);
}

#[test]
fn verify_suites() {
    let out = rncurves(&["verify", "gradient"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("PASS critical at the Boutroux curve"));
    assert!(text.contains("PASS not critical at E^3 - E"));
    let path = scratch("triple.json");
    let out = rncurves(&["verify", "triple-consistency", "--g2", "4", "--g3", "0.5", "--json-out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    for route in ["direct quadrature", "quasimomentum fit", "series of dQ"] {
        assert!(text.contains(route));
    }
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert_eq!(v["pass"], Value::Bool(true));
    assert_eq!(v["checks"].as_array().unwrap().len(), 12);
    assert_eq!(rncurves(&["verify", "obstruction"]).status.code(), Some(0));
    assert_eq!(rncurves(&["verify", "nonsense"]).status.code(), Some(2));
    // Complex turning points have no real potential.
    assert_eq!(rncurves(&["verify", "triple-consistency", "--g2", "0", "--g3", "1"]).status.code(), Some(2));
}

#[test]
fn numeric_failure_in_a_suite_exits_1() {
    // The configured bracket misses the Boutroux point, so the gradient
    // suite cannot start.
    let path = scratch("narrow.json");
    std::fs::write(&path, r#"{"brackets": {"iv": [0.5, 0.6]}}"#).unwrap();
    let out = rncurves(&["verify", "gradient", "--config", path.to_str().unwrap()]);
    std::fs::remove_file(&path).unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn config_file_and_environment() {
    let path = scratch("config.json");
    std::fs::write(&path, r#"{"order": 50}"#).unwrap();
    let out = rncurves(&["kdv", "--coeffs", "0,-1,0", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::write(&path, r#"{"order": 6, "format": "csv"}"#).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_rncurves"))
        .args(["kdv", "--coeffs", "0,-1,0"])
        .env("RNCURVES_CONFIG", &path)
        .output()
        .unwrap();
    let v = json(&out);
    assert_eq!(v["order"], Value::from(6));
    // Flags override the file.
    let out = Command::new(env!("CARGO_BIN_EXE_rncurves"))
        .args(["kdv", "--coeffs", "0,-1,0", "--order", "10"])
        .env("RNCURVES_CONFIG", &path)
        .output()
        .unwrap();
    assert_eq!(json(&out)["order"], Value::from(10));
    std::fs::write(&path, "{not json").unwrap();
    assert_eq!(rncurves(&["kdv", "--coeffs", "0,-1,0", "--config", path.to_str().unwrap()]).status.code(), Some(2));
    std::fs::remove_file(&path).unwrap();
    assert_eq!(rncurves(&["kdv", "--coeffs", "0,-1,0", "--config", "/nonexistent/rncurves.json"]).status.code(), Some(2));
}

#[test]
fn sweep_keeps_grid_order() {
    let args = ["sweep", "--bracket", "0.1,0.3", "--points", "9", "--format", "csv"];
    let out = rncurves(&args);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(out.stdout, rncurves(&args).stdout);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "family,g2,g3,r_A,r_B,period_scale,conj_symmetric,real_roots,status");
    assert_eq!(lines.len(), 10);
    let g3: Vec<f64> = lines[1..].iter().map(|l| l.split(',').nth(2).unwrap().parse().unwrap()).collect();
    assert!(g3.windows(2).all(|w| w[0] < w[1]));
    // The residual r_B changes sign once across the Boutroux point near 0.176.
    let r_b: Vec<f64> = lines[1..].iter().map(|l| l.split(',').nth(4).unwrap().parse().unwrap()).collect();
    assert_eq!(r_b.windows(2).filter(|w| w[0] * w[1] < 0.0).count(), 1);
    let path = scratch("sweep.json");
    let out = rncurves(&["sweep", "--points", "3", "--json-out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 3);
    assert_eq!(rncurves(&["sweep", "--points", "1"]).status.code(), Some(2));
}
