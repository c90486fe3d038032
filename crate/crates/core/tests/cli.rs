//! Binary-level behaviour and golden outputs. Set `UPDATE_GOLDEN=1` to
//! rewrite the golden files after an intentional output change.

mod common;

use std::fs;

use bvprice::ticks::{synthesize, SynthConfig};
use common::{crate_dir, run_cli, GOLDEN_CASES};

const BIN: &str = env!("CARGO_BIN_EXE_bvprice");

fn updating() -> bool {
    std::env::var_os("UPDATE_GOLDEN").is_some()
}

fn golden_ticks() -> String {
    synthesize(&SynthConfig::new(2000, 0.05, 0.25), 7)
        .unwrap()
        .to_csv()
}

fn check_input(name: &str, expected: &str) {
    let path = crate_dir().join("tests/golden").join(name);
    if updating() {
        fs::write(&path, expected).unwrap();
    }
    assert_eq!(fs::read_to_string(&path).unwrap(), expected, "{name}");
}

#[test]
fn golden_inputs_are_reproducible() {
    check_input("three.csv", "timestamp,price\n0,1\n1000,3\n2000,2\n");
    check_input("ticks.csv", &golden_ticks());
}

#[test]
fn outputs_match_golden() {
    golden_inputs_are_reproducible();
    for (name, args) in GOLDEN_CASES {
        let out = run_cli(BIN, args);
        assert!(
            out.status.success(),
            "{name}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let path = crate_dir().join("tests/golden").join(name);
        if updating() {
            fs::write(&path, &out.stdout).unwrap();
        }
        let golden = fs::read(&path).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(golden == out.stdout, "{name} differs from golden");
    }
}

#[test]
fn three_tick_example() {
    let out = run_cli(BIN, &["analyze", "--input", "tests/golden/three.csv"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let var = &v["variation"];
    assert_eq!(var["V"], 3.0);
    assert_eq!(var["D"], 1.0);
    assert_eq!(var["sigma_plus"], 2.0);
    assert_eq!(var["sigma_minus"], 1.0);
}

#[test]
fn fattails_byte_identical() {
    let args = ["fattails", "--samples", "1000", "--seed", "1"];
    let a = run_cli(BIN, &args);
    let b = run_cli(BIN, &args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = run_cli(BIN, &["fattails", "--samples", "1000", "--seed", "2"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("dist.json");
    let out = run_cli(
        BIN,
        &[
            "dist",
            "--n",
            "50",
            "--alpha",
            "0.1",
            "--output",
            target.to_str().unwrap(),
        ],
    );
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    // identical apart from the echoed output path
    let golden = fs::read_to_string(crate_dir().join("tests/golden/dist_n50_a010.json")).unwrap();
    let mut expect: serde_json::Value = serde_json::from_str(&golden).unwrap();
    expect["config"]["output_path"] = target.to_str().unwrap().into();
    let got: serde_json::Value = serde_json::from_slice(&fs::read(&target).unwrap()).unwrap();
    assert_eq!(got, expect);
}

#[test]
fn csv_side_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("table.csv");
    let out = run_cli(
        BIN,
        &["dist", "--n", "20", "--csv-out", table.to_str().unwrap()],
    );
    assert!(out.status.success());
    let golden = fs::read(crate_dir().join("tests/golden/dist_n20.csv")).unwrap();
    assert_eq!(fs::read(&table).unwrap(), golden);
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| run_cli(BIN, args).status.code().unwrap();
    assert_eq!(code(&["--version"]), 0);
    assert_eq!(code(&["nope"]), 1);
    assert_eq!(code(&["analyze", "--input", "tests/golden/missing.csv"]), 1);
    assert_eq!(code(&["dist", "--n", "10", "--alpha", "1.5"]), 2);
    assert_eq!(code(&["simulate", "--n", "0"]), 2);
    assert_eq!(code(&["fattails", "--samples", "10"]), 2);

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "timestamp,price\n0,1\n1000,-2\n").unwrap();
    assert_eq!(code(&["analyze", "--input", bad.to_str().unwrap()]), 1);
    fs::write(&bad, "0,1\n1000,2,3\n").unwrap();
    assert_eq!(code(&["analyze", "--input", bad.to_str().unwrap()]), 1);
}

#[test]
fn stdin_input() {
    use std::io::Write;
    use std::process::{Command, Stdio};
    let mut child = Command::new(BIN)
        .arg("analyze")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"0,1\n1000,3\n2000,2\n")
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["variation"]["V"], 3.0);
}
