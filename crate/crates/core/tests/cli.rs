use std::fs;
use std::process::{Command, Output};

use mvgallery::cli::Violation;
use mvgallery::Error;
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mvgallery"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn stderr_json(out: &Output) -> Value {
    serde_json::from_slice(out.stderr.trim_ascii_end()).unwrap()
}

#[test]
fn crystal_writes_json_and_dot() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "crystal",
        "A2",
        "1,1",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let json: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("crystal.json")).unwrap())
            .unwrap();
    assert_eq!(json["nodes"].as_array().unwrap().len(), 8);
    assert_eq!(json["seed"], 0);
    let dot = fs::read_to_string(dir.path().join("crystal.dot")).unwrap();
    assert_eq!(dot.lines().filter(|l| l.contains("[label=\"(")).count(), 8);
    assert!(dot.starts_with("// A2:1,1 seed 0"));
}

#[test]
fn flags_and_positionals_agree() {
    let a = run(&["crystal", "A2", "1,1"]);
    let b = run(&["crystal", "--type", "A2", "--lambda", "1,1"]);
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["crystal", "A2", "--lambda", "1,1"]);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn a1_segment_at_weight_zero() {
    let json = stdout_json(&run(&["polytopes", "A1", "1", "--nu", "0"]));
    let polys = json["polytopes"].as_array().unwrap();
    assert_eq!(polys.len(), 1);
    let vertices = polys[0]["vertices"].as_array().unwrap();
    assert_eq!(vertices.len(), 2);
    assert_eq!(polys[0]["facets"].as_array().unwrap().len(), 2);
}

#[test]
fn a2_weight_zero_has_two_polytopes() {
    let json = stdout_json(&run(&["polytopes", "A2", "1,1", "--nu", "0,0"]));
    assert_eq!(json["polytopes"].as_array().unwrap().len(), 2);
}

#[test]
fn rank_three_polytopes_export_off() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "polytopes",
        "A3",
        "1,1,1",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let off = fs::read_to_string(dir.path().join("polytope_0.off")).unwrap();
    assert!(off.starts_with("OFF\n# A3:1,1,1 seed 0\n"));
}

#[test]
fn retraction_report_passes() {
    let json = stdout_json(&run(&["verify-retraction", "A2", "1,1", "--seed", "7"]));
    assert_eq!(json["seed"], 7);
    let records = json["records"].as_array().unwrap();
    assert_eq!(records.len(), 48);
    assert!(records.iter().all(|r| r["status"] == "pass"));
}

#[test]
fn retraction_in_one_direction() {
    let json = stdout_json(&run(&[
        "verify-retraction",
        "A2",
        "1,1",
        "--direction",
        "1,2",
        "--trials",
        "2",
    ]));
    let records = json["records"].as_array().unwrap();
    assert_eq!(records.len(), 8);
    assert!(records.iter().all(|r| r["w"] == serde_json::json!([1, 2])));
}

#[test]
fn sections_and_oracles_pass() {
    for args in [
        ["verify-sections", "B2", "1,1"],
        ["verify-sections", "G2", "1,2"],
        ["oracle-check", "A2", "1,1"],
        ["oracle-check", "C2", "1,1"],
    ] {
        let json = stdout_json(&run(&args));
        assert_eq!(json["failures"], 0, "{args:?}");
    }
}

#[test]
fn artifacts_are_byte_identical() {
    for args in [
        vec!["crystal", "B2", "1,1"],
        vec!["polytopes", "A2", "1,1"],
        vec!["verify-retraction", "A2", "1,1", "--seed", "3"],
        vec!["oracle-check", "A2", "1,1", "--seed", "3"],
    ] {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        for d in [&a, &b] {
            let mut full = args.clone();
            full.extend(["--out", d.path().to_str().unwrap()]);
            assert!(run(&full).status.success());
        }
        let mut names: Vec<_> = fs::read_dir(a.path())
            .unwrap()
            .map(|e| e.unwrap().file_name())
            .collect();
        names.sort();
        assert!(!names.is_empty());
        for n in names {
            assert_eq!(
                fs::read(a.path().join(&n)).unwrap(),
                fs::read(b.path().join(&n)).unwrap(),
                "{n:?}"
            );
        }
    }
}

#[test]
fn config_errors_exit_2_with_record() {
    for args in [
        vec!["crystal", "A2", "-1,1"],
        vec!["crystal", "A2", "1/2,1"],
        vec!["crystal", "A2", "1"],
        vec!["crystal", "E9", "1"],
        vec!["crystal", "A2", "1,x"],
        vec!["crystal", "A2", "1,1", "--direction", "3"],
        vec!["crystal", "A2", "1,1", "--lambda", "1,0"],
        vec!["verify-retraction", "B2", "1,1"],
        vec!["polytopes", "A2", "1,1", "--nu", "1/3,1/3"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let v = stderr_json(&out);
        assert_eq!(v["exit_code"], 2);
        assert!(v["message"].is_string());
    }
    assert_eq!(run(&["crystal"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate", "A1", "1"]).status.code(), Some(2));
}

#[test]
fn violation_codes() {
    let v = Violation::from_error(&Error::PrecisionExhausted(64));
    assert_eq!((v.kind.as_str(), v.exit_code), ("precision-exhausted", 4));
    let v = Violation::from_error(&Error::Invariant("x".into()));
    assert_eq!((v.kind.as_str(), v.exit_code), ("invariant", 3));
    let v = Violation::from_error(&Error::ResampleCap(5));
    assert_eq!(v.exit_code, 3);
}
