use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn fpreg(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fpreg")).args(args).current_dir(dir).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json report")
}

fn write_line(dir: &Path) {
    std::fs::write(dir.join("line.json"), r#"{"p": 3, "n": 2, "members": [0, 1, 2]}"#).unwrap();
}

#[test]
fn regularize_line_example() {
    let dir = tempfile::tempdir().unwrap();
    write_line(dir.path());
    let args = ["regularize", "--p", "3", "--n", "2", "--set", "line.json", "--eps", "0.5", "--alpha", "1.0"];
    let v = stdout_json(&fpreg(&args, dir.path()));
    let report = &v["result"]["report"];
    assert_eq!(report["energy_trace"], serde_json::json!([1.0, 3.0]));
    assert_eq!(report["iterations"], 1);
    assert_eq!(v["result"]["reverified"], true);
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));

    let rows = fpreg(&[&args[..], &["--format", "rows"]].concat(), dir.path());
    assert_eq!(String::from_utf8(rows.stdout).unwrap(), "step,size,index,energy,irregular_mass\n0,9,1,1.0,9\n1,3,3,3.0,0\n");
}

#[test]
fn tower_overflow_marker() {
    let dir = tempfile::tempdir().unwrap();
    let v = stdout_json(&fpreg(&["tower", "--p", "3", "--t", "3"], dir.path()));
    assert_eq!(v["result"]["value"], "overflow");
    let v = stdout_json(&fpreg(&["tower", "--p", "3", "--t", "2"], dir.path()));
    assert_eq!(v["result"]["value"]["exact"], 46656);
    assert!(!fpreg(&["tower", "--p", "3", "--t", "0"], dir.path()).status.success());
}

#[test]
fn fourier_check_example() {
    let dir = tempfile::tempdir().unwrap();
    let v = stdout_json(&fpreg(&["fourier-check", "--p", "3", "--n", "4", "--trials", "100", "--seed", "7"], dir.path()));
    let max = &v["result"]["max"];
    for key in ["parseval", "plancherel", "inversion", "convolution"] {
        assert!(max[key].as_f64().unwrap() <= 1e-9);
    }
}

#[test]
fn reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let runs: Vec<Vec<&str>> = vec![
        vec!["density-test", "--p", "3", "--n", "4", "--sample", "40", "--sample-seed", "3", "--alpha", "0.5", "--trials", "20", "--seed", "9"],
        vec!["klr11", "--p", "3", "--n", "4", "--graph", "petal", "--sample", "10", "--sample-seed", "1", "--h-dim", "3", "--v2", "27", "--t1", "3", "--t2", "3", "--trials", "100", "--seed", "5"],
        vec!["tail-bound", "--p", "3", "--n", "5", "--q", "0.1", "--lambda", "5", "--trials", "200", "--seed", "2"],
        vec!["flower-find", "--p", "3", "--n", "4", "--sample", "40", "--sample-seed", "2", "--eps", "0.3", "--alpha", "0.5"],
        vec!["density-failure", "--p", "3", "--n", "4", "--r", "18", "--alpha", "0.5", "--outer", "5", "--inner", "5", "--seed", "1"],
    ];
    for args in runs {
        let a = fpreg(&[&args[..], &["--out", "a.json"]].concat(), dir.path());
        let b = fpreg(&[&args[..], &["--out", "b.json", "--threads", "4"]].concat(), dir.path());
        assert!(a.status.success() && b.status.success(), "{args:?}: {}", String::from_utf8_lossy(&a.stderr));
        let (x, y) = (std::fs::read(dir.path().join("a.json")).unwrap(), std::fs::read(dir.path().join("b.json")).unwrap());
        assert_eq!(x, y, "{args:?}");
    }
}

#[test]
fn seed_is_mandatory_for_randomized_commands() {
    let dir = tempfile::tempdir().unwrap();
    let out = fpreg(&["density-test", "--p", "3", "--n", "2", "--full", "--alpha", "1", "--trials", "2"], dir.path());
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("--seed"));
}

#[test]
fn oversized_space_states_the_cap() {
    let dir = tempfile::tempdir().unwrap();
    let out = fpreg(&["roth-count", "--p", "3", "--n", "13", "--full"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("n <= 12"));
    let out = fpreg(&["capset", "--p", "3", "--n", "4"], dir.path());
    assert!(String::from_utf8_lossy(&out.stderr).contains("N <= 27"));
}

#[test]
fn config_files_and_batches() {
    let dir = tempfile::tempdir().unwrap();
    write_line(dir.path());
    std::fs::write(
        dir.path().join("reg.toml"),
        "out = \"reg.json\"\n\n[experiment]\ncommand = \"regularize\"\np = 3\nn = 2\neps = 0.5\nalpha = 1\n\n[experiment.input]\nset = \"line.json\"\n",
    )
    .unwrap();
    std::fs::write(
        dir.path().join("count.toml"),
        "format = \"rows\"\nout = \"count.csv\"\n\n[experiment]\ncommand = \"roth-count\"\np = 3\nn = 2\n\n[experiment.input]\nmembers = [0, 1, 2]\n",
    )
    .unwrap();
    std::fs::write(dir.path().join("batch.toml"), "configs = [\"reg.toml\", \"count.toml\"]\n").unwrap();
    let out = fpreg(&["batch", "--manifest", "batch.toml"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let reg: Value = serde_json::from_slice(&std::fs::read(dir.path().join("reg.json")).unwrap()).unwrap();
    assert_eq!(reg["result"]["report"]["energy_trace"], serde_json::json!([1.0, 3.0]));
    let csv = std::fs::read_to_string(dir.path().join("count.csv")).unwrap();
    assert_eq!(csv, "size,total,nontrivial,fourier\n3,9,6,9\n");
    assert_eq!(std::fs::read_to_string(dir.path().join("line.json")).unwrap(), r#"{"p": 3, "n": 2, "members": [0, 1, 2]}"#);
}

#[test]
fn config_errors_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.toml"), "[experiment]\ncommand = \"tower\"\np = 3\nt = 2\nbogus = 1\n").unwrap();
    let out = fpreg(&["run", "--config", "bad.toml"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line"), "{err}");
    assert!(err.contains("bogus"), "{err}");
}

#[test]
fn output_may_not_overwrite_input() {
    let dir = tempfile::tempdir().unwrap();
    write_line(dir.path());
    let out = fpreg(&["roth-count", "--p", "3", "--n", "2", "--set", "line.json", "--out", "line.json"], dir.path());
    assert!(!out.status.success());
    assert_eq!(std::fs::read_to_string(dir.path().join("line.json")).unwrap(), r#"{"p": 3, "n": 2, "members": [0, 1, 2]}"#);
}
