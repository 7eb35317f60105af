use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_entwitness"))
        .args(args)
        .env_remove("ENTWITNESS_DENSE_LIMIT")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

#[test]
fn verify_builtin_sets() {
    let out = run(&["verify", "--kind", "mum", "--d", "3"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["passed"], true);
    assert!((v["measured_parameter"].as_f64().unwrap() - 1.0).abs() < 1e-10);

    let out = run(&["verify", "--kind", "gsic", "--d", "3"]);
    assert_eq!(code(&out), 0);
    assert!((json(&out)["measured_parameter"].as_f64().unwrap() - 1.0 / 9.0).abs() < 1e-10);

    assert_eq!(code(&run(&["verify", "--kind", "gsic", "--d", "5"])), 2);
    assert_eq!(code(&run(&["verify", "--kind", "mum", "--d", "6"])), 2);
}

#[test]
fn evaluate_exit_codes_follow_verdict() {
    let out = run(&["evaluate", "--family", "dicke", "--N", "3", "--measurement", "mum", "--p", "0.6", "--s", "-1"]);
    assert_eq!(code(&out), 3);
    assert_eq!(json(&out)["verdict"], "EntangledBySkew");

    let out = run(&["evaluate", "--family", "w", "--N", "3", "--measurement", "gsic", "--p", "0.4", "--s", "-1"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["verdict"], "Inconclusive");

    let out = run(&["evaluate", "--family", "w", "--N", "3", "--measurement", "gsic", "--p", "0.4", "--s", "0.5"]);
    assert_eq!(code(&out), 2);
    assert!(out.stdout.is_empty());
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&run(&["evaluate", "--family", "dicke", "--measurement", "mum", "--p", "0.5"])), 2);
    assert_eq!(code(&run(&["evaluate", "--family", "ghz", "--N", "3", "--p", "0.5"])), 2);
    assert_eq!(code(&run(&["evaluate", "--family", "dicke", "--N", "3", "--p", "1.5"])), 2);
    assert_eq!(code(&run(&["sweep", "--family", "w", "--N", "3", "--grid", "0:1"])), 2);
    assert_eq!(code(&run(&["threshold", "--family", "antisym", "--N", "8", "--detector", "variance"])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
}

#[test]
fn thresholds() {
    let out = run(&["threshold", "--family", "antisym", "--N", "4", "--measurement", "mum", "--detector", "variance", "--s", "-1"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert!((v["p_star"].as_f64().unwrap() - 0.2).abs() < 5e-4);
    assert_eq!(v["p_star_rounded"], "0.2000");
    assert_eq!(v["provenance"], "dense");

    let out = run(&["threshold", "--family", "two_qutrit", "--measurement", "gsic", "--detector", "variance", "--s", "-1"]);
    assert_eq!(code(&out), 0);
    assert!((json(&out)["p_star"].as_f64().unwrap() - 0.4495).abs() < 5e-4);

    let out = run(&["threshold", "--family", "dicke", "--N", "3", "--measurement", "mum", "--detector", "variance", "--s", "-1"]);
    assert_eq!(code(&out), 4);
    assert!(json(&out)["p_star"].is_null());

    let out = run(&[
        "threshold", "--family", "antisym", "--N", "9", "--measurement", "mum", "--detector", "variance", "--analytic",
    ]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["provenance"], "analytic");
    assert!((v["p_star"].as_f64().unwrap() - 0.1).abs() < 5e-4);
}

#[test]
fn sweep_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w4.csv");
    let out = run(&[
        "sweep", "--family", "w", "--N", "4", "--measurement", "gsic", "--s", "-1", "--grid", "0:1:101", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "p,lhs_skew,lhs_variance,bound,verdict");
    assert_eq!(lines.len(), 102);
    let verdict = |p: &str| {
        let line = lines.iter().find(|l| l.split(',').next() == Some(p)).expect("grid point present");
        line.rsplit(',').next().unwrap().to_string()
    };
    assert_eq!(verdict("0"), "Inconclusive");
    assert_eq!(verdict("0.45"), "Inconclusive");
    assert_eq!(verdict("0.46"), "EntangledBySkew");
}

#[test]
fn unwritable_output_exits_5() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("missing").join("out.csv");
    let out = run(&["sweep", "--family", "w", "--N", "3", "--measurement", "gsic", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 5);
    assert!(!Path::new(&path).exists());
}

#[test]
fn tables_are_stable_and_complete() {
    let first = run(&["table", "--table", "II"]);
    assert_eq!(code(&first), 0);
    assert_eq!(first.stdout, run(&["table", "--table", "II"]).stdout);
    let text = String::from_utf8(first.stdout).unwrap();
    let skew = text.lines().find(|l| l.starts_with("w skew")).unwrap();
    for p in ["0.5254", "0.4589", "0.4181", "0.3931", "0.3779"] {
        assert!(skew.contains(p), "{skew}");
    }

    let first = run(&["table", "--table", "I"]);
    assert_eq!(code(&first), 0);
    assert_eq!(first.stdout, run(&["table", "--table", "I"]).stdout);
    let text = String::from_utf8(first.stdout).unwrap();
    let variance = text.lines().find(|l| l.starts_with("antisym variance")).unwrap();
    for p in ["0.2500", "0.2000", "0.1667", "0.1111 *", "0.1000 *"] {
        assert!(variance.contains(p), "{variance}");
    }
    let skew = text.lines().find(|l| l.starts_with("antisym skew")).unwrap();
    assert_eq!(skew.matches("✗ no detection").count(), 5);
    assert!(text.lines().any(|l| l.contains("n/a (external)")));
}

#[test]
fn json_output_round_trips_byte_identically() {
    for args in [
        vec!["evaluate", "--family", "dicke", "--N", "5", "--measurement", "gsic", "--p", "0.37", "--s", "-0.3"],
        vec!["threshold", "--family", "w", "--N", "6", "--measurement", "gsic"],
        vec!["export-measurements", "--kind", "gsic", "--d", "2"],
    ] {
        let out = run(&args);
        assert!(code(&out) == 0 || code(&out) == 3);
        let text = String::from_utf8(out.stdout).unwrap();
        assert!(text.ends_with("}\n") && !text.contains('\r'));
        let value: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(format!("{}\n", serde_json::to_string_pretty(&value).unwrap()), text);
    }
}

#[test]
fn export_measurements_shape() {
    let out = run(&["export-measurements", "--kind", "mum", "--d", "3"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["kind"], "mum");
    assert_eq!(v["d"], 3);
    let elements = v["elements"].as_array().unwrap();
    assert_eq!(elements.len(), 12);
    assert_eq!(elements[0].as_array().unwrap().len(), 9);
}

#[test]
fn dense_limit_flag_caps_state_vectors() {
    let args = ["evaluate", "--family", "dicke", "--N", "9", "--p", "0.5", "--dense-limit", "64"];
    assert_eq!(code(&run(&args)), 2);
    let out = Command::new(env!("CARGO_BIN_EXE_entwitness"))
        .args(&args[..args.len() - 2])
        .env("ENTWITNESS_DENSE_LIMIT", "64")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}
