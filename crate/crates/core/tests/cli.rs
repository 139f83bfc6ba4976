use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_nested-vt");
const SMALL: &[&str] = &["--d-sec", "7", "--m", "2", "--ell", "2"];

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn with_spec<'a>(head: &[&'a str], tail: &[&'a str]) -> Vec<&'a str> {
    head.iter().chain(SMALL).chain(tail).copied().collect()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn encode_worked_example() {
    let out = run(&with_spec(&["encode"], &["--data", "10110011010100"]));
    assert!(out.status.success());
    assert_eq!(stdout(&out), "10110010001010101001100010010000\n");
}

#[test]
fn chop_then_decode_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let frag_path = dir.path().join("frags.txt");
    let out = run(&[
        "chop",
        "--data",
        "10110010001010101001100010010000",
        "--p",
        "0.1",
        "--seed",
        "4",
        "--out",
        frag_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = fs::read_to_string(&frag_path).unwrap();
    assert!(text.starts_with("# n=32 seed=4 p=0.1\n"));

    let out = run(&with_spec(&["decode", "--input", frag_path.to_str().unwrap()], &[]));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let record: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    for key in ["outcome", "iterations", "tau_final", "candidates_found", "data"] {
        assert!(record.get(key).is_some(), "missing {key}");
    }
    assert_ne!(record["outcome"], "timeout");
}

#[test]
fn decode_worked_fragment_sets() {
    let dir = tempfile::tempdir().unwrap();
    let three = write(dir.path(), "three", "# n=32 seed=0 p=0\n1011001000\n1010101001\n100010010000\n");
    let out = run(&with_spec(&["decode", "--input", &three], &[]));
    let record: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(record["outcome"], "unique");
    assert_eq!(record["data"], "10110011010100");

    let six = write(dir.path(), "six", "# n=32 seed=0 p=0\n1010\n1\n00010010000\n101100100010\n1\n100\n");
    let out = run(&with_spec(&["decode", "--input", &six], &[]));
    let record: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(record["outcome"], "ambiguous");
    assert_eq!(record["data"], "101100110EE10E");
    assert_eq!(record["candidates_found"], 2);

    let out = run(&with_spec(&["oracle", "--input", &six], &[]));
    assert_eq!(
        stdout(&out),
        "10110010001010011010100010010000\n10110010001010101001100010010000\n"
    );
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let six = write(dir.path(), "six", "# n=32 seed=0 p=0\n1010\n1\n00010010000\n101100100010\n1\n100\n");
    let out = run(&with_spec(&["decode", "--input", &six], &["--delta", "2"]));
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("\"timeout\""));

    assert_eq!(run(&["nonsense"]).status.code(), Some(1));
    assert_eq!(run(&["decode"]).status.code(), Some(1));
    assert_eq!(run(&["encode", "--d-sec", "0", "--data", "1"]).status.code(), Some(1));
    assert_eq!(run(&["decode", "--input", "/nonexistent/file"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
}

#[test]
fn rate_bounds_rows() {
    let out = run(&["rate-bounds", "--d-sec", "36", "--m", "2", "--ell", "1"]);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "# schema: nested-vt/rate-bounds v1");
    assert_eq!(lines[1], "d_sec,m,ell,n,log2_n,lower,rate,upper");
    assert_eq!(lines[2], "36,2,1,45,5.491853,0.780711,0.800000,0.800262");

    let sweep = stdout(&run(&["rate-bounds", "--sweep"]));
    assert!(sweep.lines().count() > 5);
}

#[test]
fn experiments_are_reproducible() {
    let args = ["experiment", "error-vs-alpha", "--d-sec", "7", "--ell", "2", "--alpha", "0,0.3", "--trials", "30"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert_eq!(text.lines().count(), 4);
    let zero_row = text.lines().nth(2).unwrap();
    assert!(zero_row.starts_with("0.000000,0.000000,30,30,"));
}

#[test]
fn experiment_config_file_and_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "cfg.json",
        r#"{"d_sec": 7, "ell": 2, "alphas": [0.3], "trials": 20, "delta": 50000}"#,
    );
    let out = run(&["experiment", "residues", "--config", &cfg, "--trials", "10"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().skip(2).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[0].starts_with("all_zero,10,"));
    assert!(rows[1].starts_with("fixed:1,10,"));
    assert!(rows[2].starts_with("distinct,10,"));

    let bad = write(dir.path(), "bad.json", r#"{"d_sec": 7, "bogus": 1}"#);
    assert_eq!(run(&["experiment", "residues", "--config", &bad]).status.code(), Some(1));
}

#[test]
fn complexity_experiment_reports_summary() {
    let out = run(&["experiment", "complexity", "--alpha", "0.25", "--trials", "40"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("# excluded="));
    assert!(text.lines().nth(1).unwrap().starts_with("trial_index,fragments,iterations,brute_force,ratio"));
}

#[test]
fn plot_svg() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("rates.csv");
    let svg = dir.path().join("rates.svg");
    assert!(run(&["rate-bounds", "--sweep", "--out", csv.to_str().unwrap()]).status.success());
    let out = run(&[
        "plot",
        "--input",
        csv.to_str().unwrap(),
        "--x",
        "log2_n",
        "--y",
        "lower,rate,upper",
        "--out",
        svg.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = fs::read_to_string(&svg).unwrap();
    assert_eq!(text.matches("<polyline").count(), 3);

    let out = run(&["plot", "--input", csv.to_str().unwrap(), "--x", "log2_n", "--y", "missing"]);
    assert_eq!(out.status.code(), Some(1));

    let empty = write(dir.path(), "empty.csv", "");
    let out = run(&["plot", "--input", &empty, "--x", "a", "--y", "b"]);
    assert!(out.status.success());
}
