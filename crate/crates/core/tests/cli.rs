use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn hydra(args: &[&str], cache: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hydra")).args(args).env("HYDRA_CACHE_DIR", cache).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn without_timing(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timing");
    v
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| hydra(args, dir.path()).status.code().unwrap();
    assert_eq!(code(&["-m", "H3", "validate"]), 0);
    assert_eq!(code(&["-m", "H3", "census"]), 2, "missing -N");
    assert_eq!(code(&["-m", "nope", "validate"]), 2);
    assert_eq!(code(&["-m", "H3", "residue", "--set", "ap:x", "--x", "0"]), 2);
    assert_eq!(code(&["-m", "H3", "kernel", "--denom-bound", "9", "--off-rho", "--conductor-cap", "2"]), 4);

    let cfg = dir.path().join("rho4.json");
    std::fs::write(
        &cfg,
        r#"{"rho": 4, "branches": [{"a":1,"b":0,"d":4},{"a":1,"b":3,"d":4},{"a":1,"b":6,"d":4},{"a":1,"b":9,"d":4}]}"#,
    )
    .unwrap();
    assert_eq!(code(&["-m", cfg.to_str().unwrap(), "kernel", "--denom-bound", "3"]), 3);
}

#[test]
fn report_shape_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["-m", "H3", "walk", "--tau", "1/5", "--steps", "3"];
    let a = json(&hydra(&args, dir.path()));
    let b = json(&hydra(&args, dir.path()));
    assert_eq!(without_timing(a.clone()), without_timing(b));
    assert_eq!(a["tool_version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(a["map_digest"].as_str().unwrap().len(), 64);
    assert_eq!(a["command"]["name"], "walk");
    assert_eq!(a["results"]["steps"][0]["chosen"], "1/15");
    assert!(a["timing"]["elapsed_ms"].is_number());
}

#[test]
fn validate_reports_regulated_branch() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&hydra(&["-m", "T+1", "validate"], dir.path()));
    assert_eq!(v["results"]["surjective"], true);
    assert_eq!(v["results"]["regulated_indices"], serde_json::json!([2]));
}

#[test]
fn csv_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = hydra(&["-m", "H3", "--format", "csv", "density", "--set", "ap:3,0", "-N", "1000"], dir.path());
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,count,ratio"));
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 3, "{line}");
        let ratio: f64 = cols[2].parse().unwrap();
        assert!((ratio - 1.0 / 3.0).abs() < 0.1, "{line}");
    }
}

#[test]
fn census_cache_hit_is_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["-m", "H3", "census", "-N", "2000"];
    let first = json(&hydra(&args, dir.path()));
    let second = json(&hydra(&args, dir.path()));
    assert_eq!(first["timing"]["census_cache"], "miss");
    assert_eq!(second["timing"]["census_cache"], "hit");
    assert_eq!(
        serde_json::to_string(&without_timing(first)).unwrap(),
        serde_json::to_string(&without_timing(second)).unwrap()
    );
    assert!(std::fs::read_dir(dir.path()).unwrap().next().is_some());

    let fresh = tempfile::tempdir().unwrap();
    let mut no_cache = args.to_vec();
    no_cache.push("--no-cache");
    hydra(&no_cache, fresh.path());
    assert!(std::fs::read_dir(fresh.path()).map_or(true, |mut d| d.next().is_none()));
}

#[test]
fn seeded_check_passes() {
    let dir = tempfile::tempdir().unwrap();
    let ok = hydra(&["-m", "H3", "check", "--suite", "padic", "--seed", "3"], dir.path());
    assert_eq!(ok.status.code(), Some(0));
    let v = json(&ok);
    assert_eq!(v["results"]["passed"], true);
    assert_eq!(v["results"]["checks"][0]["cases"], 2000);
}
