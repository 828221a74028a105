use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use keyedge::data::records::read_jsonl;
use keyedge::pipeline::{ArdeReport, SolveRecord};

fn keyedge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_keyedge"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn fixture(sub: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(sub)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn synth_then_solve_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let scene = dir.path().join("scene.jsonl");
    let solved = dir.path().join("solved.jsonl");
    let out = keyedge(&["synth", "--seed", "7", "--count", "50", "--out", s(&scene)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = keyedge(&["solve", "--input", s(&scene), "--out", s(&solved)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let records: Vec<SolveRecord> = read_jsonl(fs::read(&solved).unwrap().as_slice()).unwrap();
    assert_eq!(records.len(), 50);
    for r in records {
        let fused = r.fused.expect("solved");
        let truth = r.truth_depth.unwrap();
        assert!((fused.d_fusion - truth).abs() / truth <= 1e-9);
        assert_eq!(fused.theta_method, "weighted_circular_mean");
    }
}

#[test]
fn synth_csv_and_seed_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let out = keyedge(&[
            "synth", "--seed", "1", "--count", "20", "--noise", "gaussian", "--noise-px", "0.5",
            "--format", "csv", "--out", s(path),
        ]);
        assert!(out.status.success());
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    assert_eq!(text.lines().count(), 21);
}

#[test]
fn eval_arde_on_fixture() {
    let out = keyedge(&[
        "eval-arde",
        "--detections",
        s(&fixture("arde/detections.jsonl")),
        "--ground-truth",
        s(&fixture("arde/ground_truth.jsonl")),
        "--bins-deg=-30,-10,10,30",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: ArdeReport = serde_json::from_slice(&out.stdout).unwrap();
    let expected = (13.0 * 0.1 + 27.0 * (0.25 / 3.0)) / 40.0;
    assert!((report.arde - expected).abs() < 1e-12);
    assert_eq!(report.bins.len(), 3);
    assert!(report.bins.iter().all(|b| b.gt_count == 1));
}

#[test]
fn labelgen_on_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("gt.jsonl");
    let out = keyedge(&[
        "labelgen",
        "--labels",
        s(&fixture("kitti/label_2")),
        "--calib",
        s(&fixture("kitti/calib")),
        "--skip-hard",
        "--out",
        s(&out_path),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(fs::read_to_string(&out_path).unwrap().lines().count(), 7);
}

#[test]
fn sensitivity_is_byte_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, threads: &str| {
        let path = dir.path().join(name);
        let out = keyedge(&[
            "--threads", threads, "sensitivity", "--seed", "42", "--trials", "200", "--noise-px",
            "0,0.5", "--out", s(&path),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        fs::read(path).unwrap()
    };
    assert_eq!(run("one.csv", "1"), run("four.csv", "4"));
}

#[test]
fn exit_codes() {
    assert_eq!(keyedge(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(keyedge(&["solve"]).status.code(), Some(2));
    let missing = keyedge(&["solve", "--input", "/nonexistent/in.jsonl", "--out", "/tmp/x.jsonl"]);
    assert_eq!(missing.status.code(), Some(4));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.jsonl");
    fs::write(&bad, "{not json}\n").unwrap();
    let out = keyedge(&["solve", "--input", s(&bad), "--out", s(&dir.path().join("o.jsonl"))]);
    assert_eq!(out.status.code(), Some(3));

    let out = keyedge(&[
        "synth", "--seed", "1", "--depth-range", "10,5", "--out", s(&dir.path().join("s.jsonl")),
    ]);
    assert_eq!(out.status.code(), Some(2));
}
