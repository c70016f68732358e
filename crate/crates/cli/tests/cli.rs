use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

use ramify::numono::{track_monodromy, TrackingConfig};
use ramify::{BranchedCover, FiberAnalysis, PlanePolynomial};

const BIN: &str = env!("CARGO_BIN_EXE_ramify");

const TREFOIL: &str = r#"{"degree":3,"base_genus":0,"handles":[],"branch_cycles":["(1 2)","(2 3)","(1 3 2)"]}"#;
const MORSE_S3: &str =
    r#"{"degree":3,"base_genus":0,"handles":[],"branch_cycles":["(1 2)","(1 2)","(2 3)","(2 3)"]}"#;
const D4: &str = r#"{"degree":4,"base_genus":0,"handles":[],"branch_cycles":["(1 2 3 4)","(1 3)","(1 4)(2 3)"]}"#;

fn ramify(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> (i32, Value) {
    let out = Command::new(BIN).arg("--json").args(args).output().unwrap();
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "{e}: stdout {:?} stderr {:?}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    });
    (out.status.code().unwrap(), v)
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn analyze_trefoil() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "trefoil.cover", TREFOIL);
    let (code, v) = json(&["analyze", &path]);
    assert_eq!(code, 0);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["cover"]["degree"], 3);
    assert_eq!(v["cover"]["total_space_genus"], 0);
    assert_eq!(v["fiber"]["genuinely_ramified"], true);
    assert_eq!(v["fiber"]["orbitals"].as_array().unwrap().len(), 2);
    assert_eq!(v["fiber"]["galois_closure_order"], 6);
    assert_eq!(v["fiber"]["transitivity"], "two_transitive");
}

#[test]
fn certify_morse_and_refuse_d4() {
    let (code, v) = json(&["certify-sd", MORSE_S3]);
    assert_eq!(code, 0);
    assert_eq!(v["outcome"]["status"], "certified");
    assert_eq!(v["outcome"]["group_order"], 6);

    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "d4.cover", D4);
    let out = ramify(&["certify-sd", &path]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stdout).contains("not Morse"));
}

#[test]
fn exit_codes() {
    assert_eq!(ramify(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(ramify(&["analyze"]).status.code(), Some(64));
    assert_eq!(ramify(&["analyze", "/nonexistent/x.cover"]).status.code(), Some(64));
    assert_eq!(ramify(&["analyze", "{\"degree\": 2}"]).status.code(), Some(65));
    let bad = r#"{"degree":3,"base_genus":0,"handles":[],"branch_cycles":["(1 2)","(2 3)"]}"#;
    let (code, v) = json(&["validate", bad]);
    assert_eq!(code, 65);
    assert_eq!(v["report"]["valid"], false);
    assert_eq!(ramify(&["curve", "--poly", "y^2 +* x"]).status.code(), Some(65));
    assert_eq!(ramify(&["curve", "--poly", "y^3 + x^3 - 1"]).status.code(), Some(65));
    assert_eq!(ramify(&["gen", "--samples", "3"]).status.code(), Some(64));
    assert_eq!(ramify(&["gen", "--degree", "6"]).status.code(), Some(64));
    assert_eq!(ramify(&["--help"]).status.code(), Some(0));
}

#[test]
fn unknown_fields_rejected() {
    let extra = r#"{"degree":2,"base_genus":0,"handles":[],"branch_cycles":["(1 2)","(1 2)"],"colour":1}"#;
    assert_eq!(ramify(&["validate", extra]).status.code(), Some(65));
}

#[test]
fn fiber_graph_dot() {
    let dir = tempfile::tempdir().unwrap();
    let dot = dir.path().join("g.dot");
    let out = ramify(&["fiber-graph", D4, "--dot", dot.to_str().unwrap()]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&dot).unwrap();
    assert!(text.starts_with("graph G {"));
    assert_eq!(text.matches(" -- ").count(), 3);

    let out = ramify(&["fiber-graph", TREFOIL]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("\"O0:diag\" -- \"O1:(1,2)\""));
}

#[test]
fn derived_of_trefoil() {
    let (code, v) = json(&["derived", TREFOIL]);
    assert_eq!(code, 0);
    assert_eq!(v["derived"]["degree"], 2);
    assert_eq!(v["genus_over_y"], 0);
    assert_eq!(v["genus_over_x"], 0);
    let branched = v["derived"]["local_inertia"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|l| l["element"] != "id")
        .count();
    assert_eq!(branched, 2);
}

#[test]
fn gen_output_feeds_analyze() {
    let dir = tempfile::tempdir().unwrap();
    let out = ramify(&[
        "gen", "--degree", "3-4", "--genus", "0-1", "--branch-points", "2-4", "--samples", "12", "--seed", "3",
        "--out", dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut files: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    assert_eq!(files.len(), 12);
    for f in files {
        let text = std::fs::read_to_string(&f).unwrap();
        let cover = BranchedCover::from_json(&text).unwrap();
        let (code, v) = json(&["analyze", f.to_str().unwrap()]);
        assert_eq!(code, 0);
        let fa = FiberAnalysis::new(&cover).unwrap();
        assert_eq!(v["fiber"], serde_json::to_value(fa.report().unwrap()).unwrap());
    }
}

#[test]
fn gen_lines_are_cover_files() {
    let out = ramify(&["gen", "--degree", "3", "--branch-points", "2", "--dedup"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1);
    assert!(BranchedCover::from_json(lines[0]).is_ok());
}

#[test]
fn curve_cover_matches_in_process() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("curve.cover");
    let (code, v) = json(&["curve", "--poly", "y^3 - 3*y + x", "--cover-out", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["monodromy"]["infinity_cycle"].as_str().unwrap().len(), "(1 2 3)".len());
    let p = PlanePolynomial::parse("y^3 - 3*y + x").unwrap();
    let direct = track_monodromy(&p, &TrackingConfig::default()).unwrap();
    let written = BranchedCover::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(written, direct.cover);

    let (_, a) = json(&["analyze", path.to_str().unwrap()]);
    let fa = FiberAnalysis::new(&direct.cover).unwrap();
    assert_eq!(a["fiber"], serde_json::to_value(fa.report().unwrap()).unwrap());
}

#[test]
fn enum_verify_small_corpus() {
    let (code, v) = json(&["enum-verify", "--degree", "2-3", "--genus", "1", "--branch-points", "0-2", "--jobs", "2"]);
    assert_eq!(code, 0);
    assert!(v["report"]["not_genuinely_ramified"].as_u64().unwrap() > 0);
    assert_eq!(v["report"]["violations"].as_array().unwrap().len(), 0);
    assert!(v.get("runtime_seconds").is_none());
    let (_, t) = json(&["--timing", "enum-verify", "--degree", "2"]);
    assert!(t["runtime_seconds"].as_f64().is_some());
}

#[test]
fn infeasible_random_parameters() {
    let out = ramify(&["gen", "--degree", "4", "--branch-points", "5", "--morse", "--samples", "1", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(65));
    assert!(String::from_utf8_lossy(&out.stderr).contains("parity"));
}

#[test]
fn log_level_from_environment() {
    let out = Command::new(BIN)
        .env("RAMIFY_LOG", "info")
        .args(["enum-verify", "--degree", "2"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("verifying"));
}
