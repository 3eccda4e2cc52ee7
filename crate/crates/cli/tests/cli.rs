use std::process::{Command, Output};

use serde_json::Value;

fn fracplane(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracplane"))
        .args(args)
        .env_remove("FRACPLANE_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = fracplane(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json output")
}

fn rat(v: &Value) -> (i64, i64) {
    (v["num"].as_i64().unwrap(), v["den"].as_i64().unwrap())
}

#[test]
fn build_formats() {
    let m = json(&["build", "moser", "--format", "json"]);
    assert_eq!(m["vertices"].as_array().unwrap().len(), 7);
    assert_eq!(m["embedding"]["vertices"], 7);

    let out = fracplane(&["build", "core:2", "--format", "dimacs"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("p edge 19 ")), "{text}");

    let out = fracplane(&["build", "gpd:3", "--format", "svg"]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("<svg"));
}

#[test]
fn bounds() {
    assert_eq!(rat(&json(&["bound", "moser"])["value"]), (7, 2));
    assert_eq!(rat(&json(&["bound", "golomb"])["value"]), (10, 3));
    let fu = json(&["bound", "fisher-ullman", "--orbits", "geometric"]);
    assert_eq!(rat(&fu["value"]), (32, 9));
    assert_eq!(rat(&fu["fixed_weights"]["bound"]), (32, 9));
}

#[test]
fn verify_runs() {
    let v = json(&["verify", "gpd:3", "--exhaustive"]);
    assert_eq!(v["passed"], true);
    assert!(v["finite_bound"].is_object());
    assert_eq!(rat(&v["asymptotic_bound"]), (76, 21));

    let s = json(&["verify", "gd:4", "--simple", "--samples", "200", "--seed", "3"]);
    assert_eq!(rat(&s["bound"]), (7, 2));
    assert_eq!(s["outcome"]["violations"].as_array().unwrap().len(), 0);

    let t = json(&["verify", "core:5", "--samples", "50", "--seed", "1"]);
    assert_eq!(t["passed"], true);
}

#[test]
fn deterministic_across_jobs() {
    let args = ["verify", "gpd:6", "--samples", "100", "--seed", "7"];
    let a = fracplane(&[&args[..], &["--jobs", "1"]].concat());
    let b = fracplane(&[&args[..], &["--jobs", "2"]].concat());
    let c = fracplane(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| fracplane(args).status.code();
    assert_eq!(code(&["build", "nonsense"]), Some(1));
    assert_eq!(code(&["verify", "gpd:8", "--samples", "10"]), Some(1));
    assert_eq!(code(&["verify", "moser", "--exhaustive"]), Some(1));
    assert_eq!(code(&["verify", "gpd:9", "--exhaustive"]), Some(1));
    assert_eq!(code(&["bound", "gpd:2"]), Some(1));
    assert_eq!(code(&["bound", "golomb", "--cap", "2"]), Some(2));
    assert_eq!(code(&["--help"]), Some(0));
}

#[test]
fn other_commands() {
    let b = json(&["blocks"]);
    assert_eq!(b["passed"], true);
    assert_eq!(b["templates"].as_array().unwrap().len(), 2);

    let t = json(&["tile", "core:4", "--seed", "2", "--format", "json"]);
    assert!(!t["tiles"].as_array().unwrap().is_empty());
    let out = fracplane(&["tile", "gpd:5", "--seed", "2"]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().contains("<polygon"));

    let out = fracplane(&["export-lp", "golomb", "--orbits", "geometric"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("Maximize") && text.contains("Subject To"), "{text}");
}

#[test]
fn out_dir_from_env() {
    let dir = std::env::temp_dir().join(format!("fracplane-cli-{}", std::process::id()));
    let out = Command::new(env!("CARGO_BIN_EXE_fracplane"))
        .args(["bound", "moser"])
        .env("FRACPLANE_OUT_DIR", &dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let written: Value = serde_json::from_slice(&std::fs::read(dir.join("bound-moser.json")).unwrap()).unwrap();
    assert_eq!(rat(&written["value"]), (7, 2));
    std::fs::remove_dir_all(dir).unwrap();
}
