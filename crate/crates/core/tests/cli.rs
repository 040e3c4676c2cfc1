use std::fs;
use std::process::Command;

use cran_pool::harness::{read_records, CSV_HEADER};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cran-pool"))
}

const SMALL: &str = r#"
n_rus = 2
n_ues = 2
backhaul_capacity = 1e9
subset_size = 2
privacy_threshold = 6e8
schemes = ["optimized-pooling", "no-pooling"]
trials = 2
base_seed = 3
max_outer_iters = 5
"#;

#[test]
fn run_writes_the_csv_schema() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    fs::write(&cfg, format!("{SMALL}sweep_axis = \"snr_db\"\nsweep_values = [0, 10]\n")).unwrap();
    let out = dir.path().join("out.csv");
    let status = bin().args(["run", "--config"]).arg(&cfg).arg("--out").arg(&out).status().unwrap();
    assert!(status.success());
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().next().unwrap(), CSV_HEADER);
    let recs = read_records(text.as_bytes()).unwrap();
    assert_eq!(recs.len(), 2 * 2 * 2);
    assert!(recs.iter().all(|r| r.feasible));

    // same config and seed → identical bytes
    let again = dir.path().join("again.csv");
    assert!(bin().args(["run", "--config"]).arg(&cfg).arg("--out").arg(&again).status().unwrap().success());
    assert_eq!(fs::read(&out).unwrap(), fs::read(&again).unwrap());
}

#[test]
fn sweep_overrides_the_axis() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    fs::write(&cfg, SMALL).unwrap();
    let out = dir.path().join("sweep.csv");
    let status = bin()
        .args(["sweep", "--config"])
        .arg(&cfg)
        .args(["--axis", "backhaul_capacity", "--values", "1e7,1e10", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let recs = read_records(fs::read(&out).unwrap().as_slice()).unwrap();
    assert_eq!(recs.len(), 8);
    assert!(recs.iter().all(|r| r.sweep_axis.as_str() == "backhaul_capacity"));
}

#[test]
fn bad_config_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "n_routers = 3\n").unwrap();
    let out = bin().args(["run", "--config"]).arg(&cfg).args(["--out", "x.csv"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("n_routers"));
}

#[test]
fn validate_reports_each_check() {
    let out = bin().args(["validate", "--seed", "2"]).output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(out.status.success(), "{text}");
    for check in
        ["mi-det-ratio", "mi-sampling", "fp-tightness", "fp-direction", "monotonicity", "scheme-dominance", "privacy"]
    {
        assert!(text.contains(&format!("PASS {check}")), "{check} missing:\n{text}");
    }
    assert!(text.contains("mutation backhaul-sign-flip: detected"));
    assert!(text.contains("mutation shrinking-subsolver: detected"));
    assert!(text.contains("backhaul_slack[0]"));
}
