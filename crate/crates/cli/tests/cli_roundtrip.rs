// Drives the installed binary end to end: sample a model, analyze it,
// score the run, and check the failure exit codes.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cyclescope"))
}

fn run_ok(cmd: &mut Command) -> Output {
    let out = cmd.output().expect("spawn cyclescope");
    assert!(
        out.status.success(),
        "command failed\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr),
    );
    out
}

fn read_json(path: &Path) -> Value {
    let text = fs::read_to_string(path)
        .unwrap_or_else(|e| panic!("read {}: {e}", path.display()));
    serde_json::from_str(&text)
        .unwrap_or_else(|e| panic!("parse {}: {e}", path.display()))
}

fn generate_pure(dir: &Path) -> (std::path::PathBuf, std::path::PathBuf) {
    let prefix = dir.join("g");
    run_ok(bin().args([
        "generate",
        "pure3cyclic:15:0.8",
        prefix.to_str().unwrap(),
        "--seed",
        "3",
    ]));
    (
        prefix.with_extension("edges.tsv"),
        prefix.with_extension("truth.json"),
    )
}

fn analyze_pure(dir: &Path, edges: &Path, out_name: &str) -> std::path::PathBuf {
    let prefix = dir.join(out_name);
    run_ok(bin().args([
        "analyze",
        edges.to_str().unwrap(),
        "--target",
        "1/3",
        "--side",
        "both",
        "--out",
        prefix.to_str().unwrap(),
    ]));
    prefix
}

#[test]
fn generate_analyze_metrics_roundtrip() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();

    let (edges, truth) = generate_pure(dir);
    assert!(edges.is_file() && truth.is_file());
    let truth_doc = read_json(&truth);
    assert_eq!(truth_doc["schema"], "cyclescope.truth.v1");

    let prefix = analyze_pure(dir, &edges, "run");
    let run_doc = read_json(&prefix.with_extension("run.json"));
    assert_eq!(run_doc["schema"], "cyclescope.run.v1");
    assert_eq!(run_doc["component"]["vertices"], 45);
    assert_eq!(run_doc["component"]["map_file"], "run.sccmap.json");
    assert!(prefix.with_extension("sccmap.json").is_file());

    let target = &run_doc["targets"][0];
    assert_eq!(target["target"], "1/3");
    assert_eq!(target["k"], 3);
    // Pure model: the eigenvalue sits on the root of unity itself.
    assert!(target["epsilon"].as_f64().unwrap() < 1e-8);
    assert!(target["residual"]["right"].as_f64().unwrap() <= 1e-10);
    assert!(target["residual"]["left"].as_f64().unwrap() <= 1e-10);
    assert_eq!(target["cluster"]["group_count"], 3);
    assert_eq!(target["files"]["right_csv"], "run.1-3.right.csv");
    assert_eq!(target["files"]["left_csv"], "run.1-3.left.csv");

    for side in ["right", "left"] {
        let csv = fs::read_to_string(dir.join(format!("run.1-3.{side}.csv"))).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "vertex,x,y,magnitude,angle,group");
        assert_eq!(lines.count(), 45);
    }

    let metrics_path = dir.join("m.json");
    run_ok(bin().args([
        "metrics",
        "--truth",
        truth.to_str().unwrap(),
        "--run",
        prefix.with_extension("run.json").to_str().unwrap(),
        "--out",
        metrics_path.to_str().unwrap(),
    ]));
    let metrics_doc = read_json(&metrics_path);
    assert_eq!(metrics_doc["schema"], "cyclescope.metrics.v1");
    let entry = &metrics_doc["entries"][0];
    assert_eq!(entry["target"], "1/3");
    assert_eq!(entry["adjusted_rand_index"], 1.0);
    assert_eq!(entry["coverage"], 1.0);
    assert_eq!(entry["false_positives"], 0);
}

#[test]
fn analyze_rerun_is_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let (edges, _) = generate_pure(dir);

    let a = analyze_pure(dir, &edges, "a");
    let b = analyze_pure(dir, &edges, "b");

    for side in ["right", "left"] {
        let fa = fs::read(dir.join(format!("a.1-3.{side}.csv"))).unwrap();
        let fb = fs::read(dir.join(format!("b.1-3.{side}.csv"))).unwrap();
        assert_eq!(fa, fb, "{side} coordinates differ between reruns");
    }
    let da = read_json(&a.with_extension("run.json"));
    let db = read_json(&b.with_extension("run.json"));
    assert_eq!(da["targets"][0]["lambda"], db["targets"][0]["lambda"]);
    assert_eq!(da["targets"][0]["cluster"], db["targets"][0]["cluster"]);
}

#[test]
fn bounds_and_svd_commands_run() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let (edges, truth) = generate_pure(dir);

    let bounds_path = dir.join("bounds.json");
    run_ok(bin().args([
        "bounds",
        edges.to_str().unwrap(),
        "--truth",
        truth.to_str().unwrap(),
        "--out",
        bounds_path.to_str().unwrap(),
    ]));
    let bounds_doc = read_json(&bounds_path);
    assert_eq!(bounds_doc["schema"], "cyclescope.bounds.v1");

    let svd_prefix = dir.join("s");
    run_ok(bin().args([
        "svd",
        edges.to_str().unwrap(),
        "--rank",
        "8",
        "--out",
        svd_prefix.to_str().unwrap(),
    ]));
    let svd_doc = read_json(&svd_prefix.with_extension("svd.json"));
    assert_eq!(svd_doc["schema"], "cyclescope.embedding.v1");
    assert!(svd_prefix.with_extension("svd.csv").is_file());
    assert!(svd_prefix.with_extension("singular_values.csv").is_file());
}

#[test]
fn unknown_spec_is_an_input_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["generate", "nosuchmodel", tmp.path().join("x").to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn missing_graph_is_an_input_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["analyze", tmp.path().join("absent.tsv").to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn ambiguous_target_is_a_convergence_error() {
    let tmp = tempfile::tempdir().unwrap();
    let edges = tmp.path().join("tri.edges.tsv");
    fs::write(&edges, "0\t1\n1\t2\n2\t0\n").unwrap();
    // The triangle spectrum {1, w, conj(w)} is equidistant from -1, so
    // a 1/2 target cannot pick a side.
    let out = bin()
        .args([
            "analyze",
            edges.to_str().unwrap(),
            "--target",
            "1/2",
            "--out",
            tmp.path().join("t").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
