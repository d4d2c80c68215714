use std::path::Path;
use std::process::{Command, Output};

use crsnoma_cli::output::read_csv;

fn crsnoma(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crsnoma"))
        .args(args)
        .output()
        .expect("spawn crsnoma")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn unknown_config_key_exits_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.json", r#"{"omega_ps": 1.5}"#);
    let out = crsnoma(&["run", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("omega_ps"));
}

#[test]
fn invalid_scenario_exits_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.json", r#"{"omega_sr": -1.0}"#);
    let out = crsnoma(&["optimize", "--config", &cfg, "--q-db", "10"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn small_run_writes_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "run.json",
        r#"{"q_db_min": 0, "q_db_max": 10, "q_db_step": 5, "n_trials": 5000, "a2_mode": "FIXED"}"#,
    );
    let csv = dir.path().join("out.csv");
    let json = dir.path().join("out.json");
    let out = crsnoma(&[
        "run",
        "--config",
        &cfg,
        "--out",
        csv.to_str().unwrap(),
        "--json",
        json.to_str().unwrap(),
        "--seed",
        "5",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let rows = read_csv(std::fs::File::open(&csv).unwrap()).unwrap();
    assert!(!rows.is_empty());
    assert!(rows
        .iter()
        .all(|r| r.error.is_empty() && [0.0, 5.0, 10.0].contains(&r.q_db)));
    let doc: serde_json::Value = serde_json::from_slice(&std::fs::read(&json).unwrap()).unwrap();
    assert_eq!(doc["metadata"]["seed"], 5);
    assert_eq!(doc["metadata"]["spec_hash"].as_str().unwrap().len(), 64);
    assert_eq!(doc["rows"].as_array().unwrap().len(), rows.len());
}

#[test]
fn slope_reads_a_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "outage.json",
        r#"{"q_db_min": 40, "q_db_max": 60, "q_db_step": 4, "methods": ["CLOSED_FORM"], "schemes": ["NOMA"],
            "metrics": ["OUTAGE_S1", "OUTAGE_S2"], "a2_mode": "FIXED"}"#,
    );
    let csv = dir.path().join("outage.csv");
    let out = crsnoma(&["run", "--config", &cfg, "--out", csv.to_str().unwrap()]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let out = crsnoma(&["slope", "--in", csv.to_str().unwrap()]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let mut r = csv::Reader::from_reader(out.stdout.as_slice());
    let headers = r.headers().unwrap().clone();
    let slope_col = headers.iter().position(|h| h == "slope").unwrap();
    let records: Vec<_> = r.records().map(Result::unwrap).collect();
    assert_eq!(records.len(), 2);
    for rec in records {
        let slope: f64 = rec[slope_col].parse().unwrap();
        assert!((slope + 1.0).abs() < 0.1, "slope {slope}");
    }
}

#[test]
fn slope_without_enough_points_fails() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "low.json",
        r#"{"q_db_min": 0, "q_db_max": 10, "methods": ["CLOSED_FORM"], "metrics": ["OUTAGE_S1"], "a2_mode": "FIXED"}"#,
    );
    let csv = dir.path().join("low.csv");
    assert!(
        crsnoma(&["run", "--config", &cfg, "--out", csv.to_str().unwrap()])
            .status
            .success()
    );
    let out = crsnoma(&["slope", "--in", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn optimize_prints_best_split() {
    let out = crsnoma(&["optimize", "--q-db", "20", "--points", "8"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let a2 = v["a2_best"].as_f64().unwrap();
    assert!(a2 > 0.0 && a2 < 0.25);
    assert_eq!(v["curve"].as_array().unwrap().len(), 8);
}
