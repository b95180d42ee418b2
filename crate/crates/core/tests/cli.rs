//! End-to-end runs of the `gnmd` binary.

use std::path::Path;
use std::process::{Command, Output};

fn gnmd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gnmd"))
        .args(args)
        .env("GNMD_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn threshold_table() {
    let text = stdout(&gnmd(&["threshold", "--dmax", "5"]));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "d\tmu_star\tapproximation");
    assert!(lines[1].starts_with("2\tinf"));
    assert!(lines[2].starts_with("3\t1.24264069"));
    assert!(lines[3].starts_with("4\t1.05782"));
    assert_eq!(lines.len(), 5);
}

#[test]
fn predict_json() {
    let text = stdout(&gnmd(&["predict", "--d", "4", "--mu", "1.5", "--json"]));
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(value["phase"], "Supercritical");
    let theta = value["theta"].as_f64().unwrap();
    let expected = gnmd::predict(4, 1.5).unwrap().theta.unwrap();
    assert_eq!(theta, expected);

    let plain = stdout(&gnmd(&["predict", "--d", "4", "--mu", "0.9"]));
    assert!(plain.contains("phase\tsubcritical"));
    assert!(plain.contains("theta\t-"));
}

#[test]
fn sample_then_components() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.txt");
    stdout(&gnmd(&["sample", "--n", "2000", "--m", "1500", "--d", "4", "--seed", "9", "--out", path_str(&graph)]));

    let text = std::fs::read_to_string(&graph).unwrap();
    assert_eq!(text.lines().next(), Some("2000 1500 4"));
    assert_eq!(text.lines().count(), 1501);

    let again = dir.path().join("h.txt");
    stdout(&gnmd(&["sample", "--n", "2000", "--m", "1500", "--d", "4", "--seed", "9", "--out", path_str(&again)]));
    assert_eq!(std::fs::read(&graph).unwrap(), std::fs::read(&again).unwrap());

    let report = stdout(&gnmd(&["components", "--in", path_str(&graph), "--json"]));
    let value: serde_json::Value = serde_json::from_str(&report).unwrap();
    assert_eq!(value["n"], 2000);
    assert_eq!(value["m"], 1500);
    let sizes: Vec<u64> = value["sizes"].as_array().unwrap().iter().map(|s| s.as_u64().unwrap()).collect();
    assert_eq!(sizes.iter().sum::<u64>(), 2000);
    assert!(sizes.windows(2).all(|w| w[0] >= w[1]));
}

#[test]
fn errors_exit_nonzero_with_json_line() {
    let out = gnmd(&["sample", "--n", "3", "--m", "10", "--d", "2"]);
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    let value: serde_json::Value = serde_json::from_str(err.trim()).unwrap();
    assert_eq!(value["error"], "infeasible");

    let out = gnmd(&["predict", "--d", "1", "--mu", "0.5"]);
    assert!(!out.status.success());
    let value: serde_json::Value = serde_json::from_str(String::from_utf8(out.stderr).unwrap().trim()).unwrap();
    assert_eq!(value["error"], "domain");

    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.txt");
    let out = gnmd(&["components", "--in", path_str(&missing)]);
    assert!(!out.status.success());
    let value: serde_json::Value = serde_json::from_str(String::from_utf8(out.stderr).unwrap().trim()).unwrap();
    assert_eq!(value["error"], "io");
}

#[test]
fn oracle_small_ensemble() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("all.txt");
    let text = stdout(&gnmd(&[
        "oracle", "--n", "4", "--m", "3", "--d", "2", "--trials", "16000", "--seed", "3", "--dump", path_str(&dump),
    ]));
    assert!(text.contains("count\t16"));
    let dumped = std::fs::read_to_string(&dump).unwrap();
    assert_eq!(dumped.split("\n\n").count(), 16);
}

#[test]
fn sweep_and_duel_write_csv() {
    let dir = tempfile::tempdir().unwrap();
    let sweep = dir.path().join("sweep.csv");
    stdout(&gnmd(&[
        "sweep", "--d", "4", "--mu-from", "0.8", "--mu-to", "1.6", "--steps", "3", "--n", "2000", "--trials", "3",
        "--seed", "5", "--out", path_str(&sweep),
    ]));
    let text = std::fs::read_to_string(&sweep).unwrap();
    assert_eq!(text.lines().next(), Some(gnmd::experiments::SWEEP_CSV_HEADER));
    assert_eq!(text.lines().count(), 4);

    let duel = dir.path().join("duel.csv");
    stdout(&gnmd(&[
        "duel", "--d", "4", "--mu-from", "1.0", "--mu-to", "1.4", "--steps", "2", "--n", "2000", "--trials", "2",
        "--seed", "5", "--out", path_str(&duel),
    ]));
    let text = std::fs::read_to_string(&duel).unwrap();
    assert_eq!(text.lines().next(), Some(gnmd::experiments::DUEL_CSV_HEADER));
    assert_eq!(text.lines().count(), 3);
}
