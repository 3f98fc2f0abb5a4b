use std::fs::{self, File};
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;
use tensorfree::combmap::parse_maps;
use tensorfree::tensoreval::{naive_eval, write_tensor, DenseTensor};

fn tensorfree(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tensorfree")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("report is json")
}

fn write_tensor_file(path: &Path, t: &DenseTensor) {
    write_tensor(File::create(path).unwrap(), t).unwrap();
}

#[test]
fn census_row() {
    let o = tensorfree(&["census", "--p", "2", "--k", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "p,k,enumerated,fuss_catalan\n2,3,5,5\n");
}

#[test]
fn eval_matches_naive_summation() {
    let dir = TempDir::new().unwrap();
    let map = dir.path().join("melon3.map");
    fs::write(&map, "MAPv1 | pi: (1 2 3)(4 5 6) | alpha: (1 4)(2 6)(3 5) | colors: t t\n").unwrap();
    let tensor = dir.path().join("t3.bin");
    let t = DenseTensor::from_fn(3, 2, |i| (i[0] + 2 * i[1] + 3 * i[2]) as f64 - 2.5).unwrap();
    write_tensor_file(&tensor, &t);
    let o = tensorfree(&[
        "eval", "--map", map.to_str().unwrap(), "--tensor", tensor.to_str().unwrap(), "--n-dim", "2", "--check",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report = json(&o);
    let cm = &parse_maps(&fs::read_to_string(&map).unwrap()).unwrap()[0];
    let oracle = naive_eval(cm.map(), &[t.data(), t.data()], 2).unwrap()[0];
    let value = report["rows"][0]["value"].as_f64().unwrap();
    assert!((value - oracle).abs() <= 1e-12 * oracle.abs().max(1.0), "{value} vs {oracle}");
    assert_eq!(report["status"], "pass");
}

#[test]
fn eval_rejects_a_dimension_mismatch() {
    let dir = TempDir::new().unwrap();
    let map = dir.path().join("m.map");
    fs::write(&map, "MAPv1 | pi: (1 2)(3 4) | alpha: (1 3)(2 4) | colors: a a\n").unwrap();
    let tensor = dir.path().join("a.bin");
    write_tensor_file(&tensor, &DenseTensor::identity_matrix(3));
    let o = tensorfree(&["eval", "--map", map.to_str().unwrap(), "--tensor", tensor.to_str().unwrap(), "--n-dim", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("dimension"));
}

#[test]
fn enumerated_maps_feed_eval() {
    let dir = TempDir::new().unwrap();
    let maps = dir.path().join("w2.map");
    let o = tensorfree(&[
        "enumerate-maps", "--colors", "a:2", "--max-vertices", "3", "--max-edges", "6", "--maps-out",
        maps.to_str().unwrap(), "--format", "csv",
    ]);
    assert_eq!(o.status.code(), Some(0));
    // 1, 2 and 2 connected maps with one, two and three vertices.
    assert_eq!(stdout(&o).lines().count(), 1 + 5);
    let tensor = dir.path().join("id.bin");
    write_tensor_file(&tensor, &DenseTensor::identity_matrix(4));
    let o = tensorfree(&["eval", "--map", maps.to_str().unwrap(), "--tensor", &format!("a={}", tensor.display())]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    // Every connected map of the normalized identity is 1.
    for row in json(&o)["rows"].as_array().unwrap() {
        assert!((row["value"].as_f64().unwrap() - 1.0).abs() < 1e-12, "{row}");
    }
}

#[test]
fn haar_schwinger_dyson_passes() {
    let o = tensorfree(&["sd-check", "--kind", "haar", "--n-dim", "16", "--samples", "100000", "--no-timestamp"]);
    assert_eq!(o.status.code(), Some(0));
    let report = json(&o);
    for row in report["rows"].as_array().unwrap() {
        assert!(row["ratio"].as_f64().unwrap() <= 4.0, "{row}");
    }
}

#[test]
fn tolerance_failure_exits_two() {
    let o = tensorfree(&[
        "freeness-check", "--pairing", "rotated", "--n-grid", "4,8", "--samples", "500", "--tolerance", "0.01",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(json(&o)["status"], "fail");
}

#[test]
fn usage_and_io_errors_exit_one() {
    for args in [
        vec!["census", "--p", "2"],
        vec!["frobnicate"],
        vec!["sample-moments", "--n-grid", "8,8"],
        vec!["sample-moments", "--samples", "0"],
        vec!["limit", "--map", "/nonexistent/maps.map"],
    ] {
        let o = tensorfree(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
    }
    assert_eq!(tensorfree(&["--help"]).status.code(), Some(0));
}

#[test]
fn reports_are_reproducible_across_worker_counts() {
    let run = |workers: &str| {
        let o = tensorfree(&[
            "sample-moments", "--p", "3", "--n-grid", "3,5", "--samples", "500", "--seed", "9", "--no-timestamp",
            "--workers", workers,
        ]);
        assert_eq!(o.status.code(), Some(0));
        o.stdout
    };
    assert_eq!(run("1"), run("3"));
    let o = tensorfree(&["sample-moments", "--p", "3", "--n-dim", "3", "--samples", "10"]);
    assert!(json(&o)["timestamp"].is_u64());
}

#[test]
fn config_file_and_output_path() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# census sweep\ncommand = census\np = 3\nk = 1\nk_max = 3\nformat = json\n").unwrap();
    let out = dir.path().join("report.json");
    let o = tensorfree(&[
        "--config", cfg.to_str().unwrap(), "--k-max", "2", "--no-timestamp", "--output", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());
    let report: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["config"]["p"], 3);
    assert_eq!(report["config"]["k_max"], 2);
    let rows: Vec<(u64, u64)> = report["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| (r["enumerated"].as_u64().unwrap(), r["fuss_catalan"].as_u64().unwrap()))
        .collect();
    assert_eq!(rows, vec![(1, 1), (3, 3)]);
}

#[test]
fn json_reports_reparse_identically() {
    let o = tensorfree(&["cumulants", "--colors", "w:2", "--max-vertices", "2", "--max-edges", "4", "--no-timestamp"]);
    let text = stdout(&o);
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(serde_json::to_string_pretty(&v).unwrap() + "\n", text);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r["cumulant"] == r["moment"]));
}

#[test]
fn limit_of_the_melon() {
    let o = tensorfree(&["limit", "--p", "3", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).ends_with(",1/2,0.5\n"));
    let o = tensorfree(&["limit", "--p", "3", "--profile", "factorial", "--format", "csv"]);
    assert!(stdout(&o).ends_with(",1,1.0\n"));
}
