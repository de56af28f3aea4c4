use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn peakon(args: &[&str]) -> Output {
    peakon_env(args, None)
}

fn peakon_env(args: &[&str], config: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_peakon"));
    cmd.args(args).env_remove("PEAKON_CONFIG");
    if let Some(c) = config {
        cmd.env("PEAKON_CONFIG", c);
    }
    cmd.output().expect("binary runs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn json(o: &Output) -> Value {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

const SINGLE: &str = r#"{"points":[{"x":0.0,"w":2.0,"v":0.0}]}"#;
const PAIR: &str = r#"{"points":[{"x":-1.0,"w":1.0,"v":0.0},{"x":1.0,"w":-1.0,"v":0.0}]}"#;

#[test]
fn forward_single_peakon() {
    let d = TempDir::new().unwrap();
    let f = write(&d, "m.json", SINGLE);
    let v = json(&peakon(&["forward", f.to_str().unwrap(), "--at", "0"]));
    assert_eq!(floats(&v["eigenvalues"]), vec![0.5]);
    assert_eq!(floats(&v["norming"]), vec![1.0]);
    assert!((floats(&v["phi"])[0] - 1.0).abs() < 1e-12);
    assert_eq!(v["oscillation"][0]["ok"], true);
}

#[test]
fn forward_rejects_negative_v() {
    let d = TempDir::new().unwrap();
    let f = write(&d, "m.json", r#"{"points":[{"x":0,"w":1,"v":-1}]}"#);
    let o = peakon(&["forward", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("NegativeVee"));
}

#[test]
fn malformed_json_is_a_validation_error() {
    let d = TempDir::new().unwrap();
    let f = write(&d, "m.json", "{not json");
    assert_eq!(peakon(&["forward", f.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(peakon(&["forward", "/nonexistent/file.json"]).status.code(), Some(2));
}

#[test]
fn inverse_single_peakon_and_out_file() {
    let d = TempDir::new().unwrap();
    let f = write(&d, "s.json", r#"{"eigenvalues":[0.5],"norming":[1.0]}"#);
    let out = d.path().join("m.json");
    let o = peakon(&["inverse", f.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let p = &v["points"][0];
    assert!(p["x"].as_f64().unwrap().abs() < 1e-9);
    assert!((p["w"].as_f64().unwrap() - 2.0).abs() < 1e-9);
}

#[test]
fn forward_then_inverse_roundtrip() {
    let d = TempDir::new().unwrap();
    let m = r#"{"points":[{"x":-1.5,"w":1.0,"v":0.0},{"x":0.0,"w":-0.7,"v":0.8},{"x":1.2,"w":2.0,"v":0.0}]}"#;
    let f = write(&d, "m.json", m);
    let spec = d.path().join("s.json");
    assert!(peakon(&["forward", f.to_str().unwrap(), "--out", spec.to_str().unwrap()]).status.success());
    let v = json(&peakon(&["inverse", spec.to_str().unwrap()]));
    let xs: Vec<f64> = v["points"].as_array().unwrap().iter().map(|p| p["x"].as_f64().unwrap()).collect();
    for (a, b) in xs.iter().zip([-1.5, 0.0, 1.2]) {
        assert!((a - b).abs() < 1e-6, "{xs:?}");
    }
    assert!((v["points"][1]["v"].as_f64().unwrap() - 0.8).abs() < 1e-6);
}

#[test]
fn numerical_failure_exit_code() {
    let d = TempDir::new().unwrap();
    let f = write(&d, "s.json", r#"{"eigenvalues":[-1.0,0.5,2.0],"norming":[0.3,1.2,4.0]}"#);
    let o = peakon(&["--tol.inv", "1e-300", "inverse", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn interior_case_two_solutions() {
    let d = TempDir::new().unwrap();
    let phi = (-0.5f64).exp();
    let f = write(&d, "i.json", &format!(r#"{{"a":0.25,"pairs":[{{"lambda":0.5,"phi":{phi}}}]}}"#));
    let v = json(&peakon(&["interior", f.to_str().unwrap(), "--enumerate"]));
    assert_eq!(v["count"]["kind"], "finite");
    assert_eq!(v["count"]["count"], 2);
    assert_eq!(v["branches"].as_array().unwrap().len(), 2);
    let mut xs: Vec<f64> = v["solutions"].as_array().unwrap().iter().map(|s| s["points"][0]["x"].as_f64().unwrap()).collect();
    xs.sort_by(f64::total_cmp);
    assert!((xs[0] + 0.75).abs() < 1e-9 && (xs[1] - 1.25).abs() < 1e-9, "{xs:?}");
}

#[test]
fn interior_infeasible_exit_code() {
    let d = TempDir::new().unwrap();
    // a zero between two values of the same sign
    let f = write(&d, "i.json", r#"{"a":0.0,"pairs":[{"lambda":0.5,"phi":0.3},{"lambda":1.0,"phi":0.0},{"lambda":2.0,"phi":0.2}]}"#);
    let o = peakon(&["interior", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["feasibility"]["ok"], false);
    let kinds: Vec<&str> = v["feasibility"]["violations"].as_array().unwrap().iter().map(|x| x["kind"].as_str().unwrap()).collect();
    assert!(kinds.contains(&"neighbours_same_sign"), "{kinds:?}");
}

#[test]
fn moduli_count_for_three_eigenvalues() {
    let d = TempDir::new().unwrap();
    let m = write(&d, "m.json", r#"{"points":[{"x":0.0,"w":1.0,"v":0.0},{"x":1.0,"w":0.0,"v":1.0}]}"#);
    let data = d.path().join("i.json");
    assert!(peakon(&["forward", m.to_str().unwrap(), "--at", "1", "--out", data.to_str().unwrap()]).status.success());
    let v = json(&peakon(&["interior", data.to_str().unwrap(), "--moduli"]));
    assert_eq!(v["modulus_count"], 2);
    assert_eq!(v["count"]["kind"], "unique");
}

#[test]
fn evolve_csv_single_peakon_speed() {
    let d = TempDir::new().unwrap();
    let f = write(&d, "m.json", SINGLE);
    let o = peakon(&["evolve", f.to_str().unwrap(), "--t", "0:2:0.5", "--x", "-1:3:0.25"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,x,u"));
    let rows: Vec<[f64; 3]> = lines
        .map(|l| {
            let c: Vec<f64> = l.split(',').map(|s| s.parse().unwrap()).collect();
            [c[0], c[1], c[2]]
        })
        .collect();
    assert_eq!(rows.len(), 5 * 17);
    for t in [0.0, 0.5, 1.0, 1.5, 2.0] {
        // the peak sits at x = t
        let peak = rows.iter().filter(|r| r[0] == t).max_by(|a, b| a[2].total_cmp(&b[2])).unwrap();
        assert!((peak[1] - t).abs() < 1e-12 && (peak[2] - 1.0).abs() < 1e-9, "{peak:?}");
    }
}

#[test]
fn evolve_reports_collision() {
    let d = TempDir::new().unwrap();
    let f = write(&d, "m.json", PAIR);
    let v = json(&peakon(&["evolve", f.to_str().unwrap(), "--t", "0:8:0.5", "--x", "0:0:1", "--format", "json"]));
    let w = v["collisions"]["windows"].as_array().unwrap();
    assert_eq!(w.len(), 1);
    assert_eq!(v["sup_u"]["attained"], false);
    assert_eq!(v["measures"].as_array().unwrap().len(), 17);
}

#[test]
fn deterministic_output() {
    let d = TempDir::new().unwrap();
    let f = write(&d, "m.json", PAIR);
    let args = ["evolve", f.to_str().unwrap(), "--t", "0:5:0.25", "--x", "-3:3:0.5", "--format", "json"];
    assert_eq!(peakon(&args).stdout, peakon(&args).stdout);
}

#[test]
fn config_file_and_flag_precedence() {
    let d = TempDir::new().unwrap();
    let f = write(&d, "m.json", SINGLE);
    let c = write(&d, "c.json", r#"{"tol":{"trace":1e-9},"t":"0:1:1","x":"0:1:0.5"}"#);
    let o = peakon_env(&["evolve", f.to_str().unwrap()], Some(&c));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(String::from_utf8(o.stdout).unwrap().lines().count(), 1 + 2 * 3);
    let o = peakon_env(&["evolve", f.to_str().unwrap(), "--x", "0:0:1"], Some(&c));
    assert_eq!(String::from_utf8(o.stdout).unwrap().lines().count(), 1 + 2);
    let bad = write(&d, "bad.json", r#"{"tolerance":{}}"#);
    assert_eq!(peakon_env(&["evolve", f.to_str().unwrap()], Some(&bad)).status.code(), Some(2));
}

#[test]
fn tolerance_flags() {
    let d = TempDir::new().unwrap();
    let f = write(&d, "m.json", SINGLE);
    assert!(peakon(&["forward", f.to_str().unwrap(), "--tol.root=1e-13"]).status.success());
    assert_eq!(peakon(&["--tol.bogus", "1", "forward", f.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(peakon(&["--tol.inv", "-1", "forward", f.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(peakon(&["evolve", f.to_str().unwrap(), "--t", "0:1:0", "--x", "0:1:1"]).status.code(), Some(2));
}
