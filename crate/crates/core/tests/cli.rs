use std::process::{Command, Output};

use xlmimo_ee::experiment::{ResultRow, CSV_HEADER};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xlmimo-ee"))
        .args(args)
        .env("XLMIMO_EE_THREADS", "2")
        .output()
        .unwrap()
}

const SMALL: &[&str] = &["--scenario", "single", "--m", "64", "--k", "8", "--trials", "4", "--seed", "11"];

#[test]
fn csv_goes_to_stdout() {
    let out = run(&[SMALL, &["--selector", "hrnp", "--ms", "16"]].concat());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(CSV_HEADER));
    let rows: Vec<&str> = lines.collect();
    assert!(!rows.is_empty());
    let columns = CSV_HEADER.split(',').count();
    assert!(rows.iter().all(|r| r.split(',').count() == columns));
    assert!(rows.iter().all(|r| r.starts_with("single,8,")));
}

#[test]
fn json_file_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let args = [SMALL, &["--selector", "all", "--ms", "20", "--format", "json", "--out", path.to_str().unwrap()]].concat();
        let out = run(&args);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        assert!(out.stdout.is_empty());
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    let rows: Vec<ResultRow> = serde_json::from_str(&text).unwrap();
    for sel in ["hrnp", "ls", "ga", "pso"] {
        assert!(rows.iter().any(|r| r.selector == sel), "{sel}");
    }
}

#[test]
fn set_and_config_file_are_layered() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"scenario": "sweep_k", "m": 64, "grid": "4,8", "trials": 2, "precoder": "zf"}"#).unwrap();
    let out = run(&["--config", cfg.to_str().unwrap(), "--set", "grid=6", "--set", "seed=4"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let ks: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert!(!ks.is_empty() && ks.iter().all(|&k| k == "6"));
}

#[test]
fn configuration_errors_exit_with_one() {
    for args in [
        &["--scenario", "nope"][..],
        &["--set", "antennas=4"],
        &["--set", "tau=300"],
        &["--set", "missing_equals"],
        &["--format", "xml"],
        &["--bogus-flag"],
        &["--config", "/nonexistent/cfg.json"],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn runtime_errors_exit_with_two() {
    let out = run(&["--scenario", "single", "--k", "300", "--ms", "auto", "--selector", "hrnp", "--trials", "1"]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
}

#[test]
fn help_exits_cleanly() {
    let out = run(&["--help"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("--scenario"));
}
