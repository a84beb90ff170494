use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_treelimit")).args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn point_dendron(a: f64) -> String {
    format!(r#"{{"kind":"point","nu":{{"kind":"dirac","a":{a}}}}}"#)
}

#[test]
fn generate_star() {
    let out = run(&["generate", "--model", "star", "--n", "5", "--seed", "1"]);
    let tree = stdout_json(&out);
    assert_eq!(tree["n"], 5);
    let parents = tree["parent"].as_array().unwrap();
    assert_eq!(parents.iter().filter(|p| p.as_i64() == Some(0)).count(), 4);
}

#[test]
fn generate_is_reproducible() {
    let args = ["generate", "--model", "cgw", "--n", "300", "--m-trees", "4", "--seed", "99"];
    let (a, b) = (run(&args), run(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(String::from_utf8(a.stdout).unwrap().lines().count(), 4);
    let c = run(&["generate", "--model", "cgw", "--n", "300", "--m-trees", "4", "--seed", "100"]);
    assert_ne!(c.stdout, b.stdout);
}

#[test]
fn invalid_specs_fail() {
    assert_eq!(run(&["generate", "--model", "no_such_model", "--n", "5"]).status.code(), Some(2));
    let bad_law = run(&["generate", "--model", "cgw", "--offspring", "poisson:-1", "--n", "5"]);
    assert_eq!(bad_law.status.code(), Some(2));
    let underflow = r#"{"model":"pa","chi":-1.0,"rho":1.5}"#;
    assert_eq!(run(&["generate", "--model", underflow, "--n", "100"]).status.code(), Some(3));
    assert_eq!(run(&["generate", "--model", "star"]).status.code(), Some(2));
}

#[test]
fn limits_report_characteristic_sizes() {
    let a = |args: &[&str]| stdout_json(&run(args))["a"].as_f64().unwrap();
    assert!((a(&["limits", "--model", "split_bst"]) - 2.0).abs() < 1e-9);
    assert!((a(&["limits", "--model", r#"{"model":"pa","chi":1.0,"rho":1.0}"#]) - 0.5).abs() < 1e-9);
    assert!((a(&["limits", "--model", "yule"]) - 1.0).abs() < 1e-6);
    let star = stdout_json(&run(&["limits", "--model", "star"]));
    assert_eq!(star["family"]["family"], "constant");
    assert_eq!(star["two_a"], 2.0);
}

#[test]
fn converge_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("star");
    let pass = run(&[
        "converge",
        "--model",
        "star",
        "--n-grid",
        "100,1000",
        "--seed",
        "3",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(pass.status.code(), Some(0), "{}", String::from_utf8_lossy(&pass.stderr));
    assert!(String::from_utf8_lossy(&pass.stderr).contains("verdict: PASS"));
    let report: Value = serde_json::from_str(&fs::read_to_string(out_dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], true);
    assert!(out_dir.join("distance_n1000.csv").is_file());

    let fail = run(&["converge", "--model", "path", "--n-grid", "100,1000", "--scale", "none", "--seed", "3"]);
    assert_eq!(fail.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&fail.stderr).contains("verdict: FAIL"));
}

fn write_tau(dir: &Path, name: &str, dendron: &str) -> String {
    let path = dir.join(name);
    let out = run(&[
        "tau",
        "--dendron",
        dendron,
        "--r",
        "3",
        "--m-trees",
        "4",
        "--m-pairs",
        "5",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    path.to_str().unwrap().to_string()
}

#[test]
fn compare_constant_dendrons() {
    let dir = tempfile::tempdir().unwrap();
    let one = write_tau(dir.path(), "one.json", &point_dendron(1.0));
    let two = write_tau(dir.path(), "two.json", &point_dendron(2.0));

    let same = stdout_json(&run(&["compare", &one, &one]));
    assert_eq!(same["energy_distance"], 0.0);

    let apart = stdout_json(&run(&["compare", &one, &two, "--r", "2"]));
    assert!((apart["energy_distance"].as_f64().unwrap() - 4.0).abs() < 1e-12);
    assert_eq!(apart["entry_ks"][0]["ks"], 1.0);

    let junk = dir.path().join("junk.json");
    fs::write(&junk, "[[0.0, 1.0], [2.0, 0.0]]").unwrap();
    assert_eq!(run(&["compare", &one, junk.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["compare", &one, "/nonexistent/tau.json"]).status.code(), Some(3));
}

#[test]
fn tau_from_a_model() {
    let out = stdout_json(&run(&[
        "tau",
        "--model",
        "bst",
        "--n",
        "500",
        "--r",
        "4",
        "--m-trees",
        "3",
        "--m-pairs",
        "2",
        "--seed",
        "5",
    ]));
    assert_eq!(out["r"], 4);
    assert_eq!(out["draws"].as_array().unwrap().len(), 6);
}
