use std::path::Path;
use std::process::{Command, Output};

use lanetopo::scene_io::{perturb_scene, read_scenes, write_predictions};
use serde_json::Value;

fn lanetopo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lanetopo"))
        .args(args)
        .output()
        .unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = lanetopo(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_owned()
}

fn table_value(table: &str, label: &str) -> f64 {
    let line = table.lines().find(|l| l.starts_with(label)).unwrap();
    line[label.len()..].trim().parse().unwrap()
}

#[test]
fn roundtrip_without_uturns_is_perfect() {
    let table = ok(&["roundtrip", "--seed", "7", "--n-uturn", "0"]);
    assert_eq!(table_value(&table, "DET_l (Frechet)"), 100.0);
    assert_eq!(table_value(&table, "OLS"), 100.0);
}

#[test]
fn json_output_matches_table() {
    let table = ok(&["roundtrip", "--seed", "3"]);
    let json: Value = serde_json::from_str(&ok(&["roundtrip", "--seed", "3", "--format", "json"])).unwrap();
    let obj = json.as_object().unwrap();
    let labels = [
        ("det_l_frechet", "DET_l (Frechet)"),
        ("det_l_chamfer", "DET_l (Chamfer)"),
        ("det_t", "DET_t"),
        ("top_ll", "TOP_ll"),
        ("top_lt", "TOP_lt"),
        ("f1", "F1"),
        ("ols", "OLS"),
    ];
    assert_eq!(obj.len(), labels.len());
    for (key, label) in labels {
        let v = obj[key].as_f64().unwrap();
        assert!((0.0..=1.0).contains(&v));
        assert!((100.0 * v - table_value(&table, label)).abs() <= 0.05, "{key}");
    }
}

#[test]
fn file_pipeline_with_masks() {
    let dir = tempfile::tempdir().unwrap();
    let (gt, masks, lines) = (
        path(dir.path(), "gt.ndjson"),
        path(dir.path(), "masks.ndjson"),
        path(dir.path(), "lines.ndjson"),
    );
    ok(&[
        "synth",
        "--seed",
        "5",
        "--frames",
        "3",
        "--n-uturn",
        "0",
        "--out",
        &gt,
    ]);
    ok(&["rasterize", "--scene", &gt, "--out", &masks]);
    ok(&["decode", "--masks", &masks, "--out", &lines]);
    for pred in [&masks, &lines] {
        let table = ok(&["eval", "--pred", pred, "--gt", &gt]);
        assert_eq!(table_value(&table, "DET_l (Frechet)"), 100.0);
        assert_eq!(table_value(&table, "TOP_ll"), 100.0);
    }
}

#[test]
fn rle_sidecar_carries_masks_only() {
    let dir = tempfile::tempdir().unwrap();
    let (gt, masks) = (path(dir.path(), "gt.json"), path(dir.path(), "masks.rle"));
    ok(&["synth", "--seed", "2", "--n-uturn", "0", "--out", &gt]);
    ok(&["rasterize", "--scene", &gt, "--out", &masks]);
    let table = ok(&["eval", "--pred", &masks, "--gt", &gt]);
    assert_eq!(table_value(&table, "DET_l (Frechet)"), 100.0);
    assert_eq!(table_value(&table, "DET_t"), 0.0);
}

#[test]
fn identical_prediction_scores_full_ols() {
    let dir = tempfile::tempdir().unwrap();
    let (gt, pred) = (path(dir.path(), "gt.ndjson"), path(dir.path(), "pred.ndjson"));
    ok(&["synth", "--seed", "9", "--frames", "2", "--out", &gt]);
    let preds: Vec<_> = read_scenes(&gt)
        .unwrap()
        .iter()
        .map(|s| perturb_scene(s, 0.0, 0.0, 0).unwrap())
        .collect();
    write_predictions(&pred, &preds).unwrap();
    let json: Value =
        serde_json::from_str(&ok(&["eval", "--pred", &pred, "--gt", &gt, "--format", "json"])).unwrap();
    for v in json.as_object().unwrap().values() {
        assert_eq!(v.as_f64().unwrap(), 1.0);
    }
}

#[test]
fn policies_parse_case_insensitively() {
    for p in ["MASK", "Bezier", "fusion", "Directional-Fusion"] {
        ok(&["roundtrip", "--seed", "1", "--policy", p]);
    }
    assert_eq!(
        lanetopo(&["roundtrip", "--policy", "nearest"]).status.code(),
        Some(2)
    );
}

#[test]
fn missing_input_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let missing = path(dir.path(), "nope.json");
    let out = lanetopo(&["eval", "--pred", &missing, "--gt", &missing]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nope.json"));
}

#[test]
fn malformed_scene_reports_location() {
    let dir = tempfile::tempdir().unwrap();
    let gt = path(dir.path(), "gt.json");
    std::fs::write(&gt, "{\n  \"frame_id\": \"f\",\n  \"centerlines\": [\n").unwrap();
    let out = lanetopo(&["rasterize", "--scene", &gt, "--out", &path(dir.path(), "m.json")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(lanetopo(&["roundtrip", "--bogus"]).status.code(), Some(2));
    assert_eq!(lanetopo(&[]).status.code(), Some(2));
}

#[test]
fn invalid_synth_config_is_rejected() {
    let out = lanetopo(&["roundtrip", "--split-probability", "1.5"]);
    assert_eq!(out.status.code(), Some(1));
}
