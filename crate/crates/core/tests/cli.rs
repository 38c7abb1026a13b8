use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hgw::generators::{path, to_edge_list};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn hgw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hgw"))
        .args(args)
        .output()
        .expect("failed to run hgw")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn leader_of_triangle_is_first_label_and_reports_ties() {
    let o = hgw(&["leader", arg(&data("k3.tsv"))]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "v0");
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("v1") && err.contains("v2"), "tie set missing: {err}");
}

#[test]
fn leader_of_star_is_hub() {
    let o = hgw(&["leader", arg(&data("s4.tsv"))]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "v0");
}

#[test]
fn centrality_json_for_single_edge() {
    let o = hgw(&["centrality", arg(&data("edge.tsv")), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let vertices = v["vertices"].as_array().unwrap();
    assert_eq!(vertices.len(), 2);
    for row in vertices {
        assert!((row["mdt"].as_f64().unwrap() - 0.0625).abs() < 1e-12);
        assert!((row["ic"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    }
    assert_eq!(v["leader"], "a");
    assert_eq!(v["tie_set"], serde_json::json!(["a", "b"]));
}

#[test]
fn centrality_csv_has_header_and_one_row_per_vertex() {
    let o = hgw(&["centrality", arg(&data("p3.tsv")), "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[0], "label,mdt,ic,rank");
    assert_eq!(lines.len(), 4);
    assert!(lines.iter().any(|l| l.starts_with("v1,") && l.ends_with(",1")));
}

#[test]
fn localize_complete_graph_passes() {
    for target in ["heat", "wavelet"] {
        let o = hgw(&["localize", arg(&data("k5.tsv")), "--target", target]);
        assert_eq!(o.status.code(), Some(0), "{target}");
        let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
        assert_eq!(v["violations"], 0);
        assert_eq!(v["intrinsic"], true);
        assert!(v["max_ratio"].as_f64().unwrap() <= 1.0);
    }
}

#[test]
fn localize_long_path_decays_without_violations() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("p40.tsv");
    std::fs::write(&file, to_edge_list(&path(40))).unwrap();
    let samples = dir.path().join("samples.csv");
    let o = hgw(&["localize", arg(&file), "--samples", arg(&samples)]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["violations"], 0);
    let csv = std::fs::read_to_string(&samples).unwrap();
    assert!(csv.starts_with("t,x,y,r,actual,bound,ratio"));
    // Bound at the earliest time for the two path ends is tiny.
    let far: f64 = csv
        .lines()
        .skip(1)
        .find(|l| l.split(',').nth(1) == Some("v0") && l.split(',').nth(2) == Some("v39"))
        .and_then(|l| l.split(',').nth(5))
        .unwrap()
        .parse()
        .unwrap();
    assert!(far < 1e-10, "bound {far}");
}

#[test]
fn paper_metric_on_random_graph_is_flagged() {
    let o = hgw(&["info", arg(&data("random-seed-42.tsv")), "--metric", "paper"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["metric"]["intrinsic"], false);
    assert!(!v["metric"]["violating"].as_array().unwrap().is_empty());
}

#[test]
fn output_is_deterministic() {
    let run = || {
        stdout(&hgw(&[
            "localize",
            arg(&data("random-seed-42.tsv")),
            "--target",
            "wavelet",
            "--seed",
            "7",
        ]))
    };
    assert_eq!(run(), run());
    let spectrum = || stdout(&hgw(&["spectrum", arg(&data("random-seed-42.tsv"))]));
    assert_eq!(spectrum(), spectrum());
}

#[test]
fn spectrum_csv_is_sorted_with_zero_first() {
    let o = hgw(&["spectrum", arg(&data("k5.tsv"))]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k,lambda"));
    let values: Vec<f64> = lines.map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(values.len(), 5);
    assert!(values[0].abs() < 1e-12);
    for v in &values[1..] {
        assert!((v - 5.0).abs() < 1e-12);
    }
}

#[test]
fn matrix_market_input_matches_edge_list() {
    let dir = tempfile::tempdir().unwrap();
    let mtx = dir.path().join("k3.mtx");
    std::fs::write(
        &mtx,
        "%%MatrixMarket matrix coordinate real symmetric\n3 3 3\n2 1 1.0\n3 1 1.0\n3 2 1.0\n",
    )
    .unwrap();
    let a = hgw(&["spectrum", arg(&mtx)]);
    let b = hgw(&["spectrum", arg(&data("k3.tsv"))]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("frame.json");
    let o = hgw(&["frame", arg(&data("k5.tsv")), "--output", arg(&out)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["scales"].as_array().unwrap().len(), 1);
}

#[test]
fn verify_passes_on_bundled_random_graph() {
    let o = hgw(&["verify", arg(&data("random-seed-42.tsv"))]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn exit_codes() {
    assert_eq!(hgw(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(hgw(&["leader"]).status.code(), Some(2));
    assert_eq!(
        hgw(&["frame", arg(&data("k5.tsv")), "--format", "csv"]).status.code(),
        Some(2)
    );
    assert_eq!(hgw(&["leader", "/nonexistent/graph.tsv"]).status.code(), Some(3));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.tsv");
    std::fs::write(&bad, "a b -1\n").unwrap();
    assert_eq!(hgw(&["leader", arg(&bad)]).status.code(), Some(3));
    let split = dir.path().join("split.tsv");
    std::fs::write(&split, "a b 1\nc d 1\n").unwrap();
    assert_eq!(hgw(&["centrality", arg(&split)]).status.code(), Some(3));
    let wavelet = hgw(&["wavelet", arg(&data("k3.tsv")), "--scale", "1", "--vertex", "zz"]);
    assert_eq!(wavelet.status.code(), Some(3));
}

#[test]
fn paper_metric_violations_exit_with_one() {
    let o = hgw(&[
        "localize",
        arg(&data("random-seed-42.tsv")),
        "--metric",
        "paper",
        "--target",
        "wavelet",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let violations = v["violations"].as_u64().unwrap();
    assert_eq!(o.status.code(), Some(if violations > 0 { 1 } else { 0 }));
    assert!(!v["warnings"].as_array().unwrap().is_empty());
}

#[test]
fn heat_and_transform_outputs() {
    let o = hgw(&["heat", arg(&data("edge.tsv")), "--t", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("x,y,value"));
    let diag: f64 = text
        .lines()
        .nth(1)
        .unwrap()
        .rsplit(',')
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert!((diag - (1.0 + (-2.0f64).exp()) / 2.0).abs() < 1e-15);

    let dir = tempfile::tempdir().unwrap();
    let signal = dir.path().join("signal.txt");
    std::fs::write(&signal, "v0 1\nv1 -1\nv2 0\n").unwrap();
    let o = hgw(&["transform", arg(&data("k3.tsv")), "--signal", arg(&signal)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().next(), Some("scale,vertex,value"));
}
