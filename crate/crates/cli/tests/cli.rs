//! End-to-end tests of the `bellkit` binary: subcommand output, pipes
//! between `simulate` and `analyze`, determinism, and exit codes.

use std::io::Write;
use std::process::{Command, Output, Stdio};

fn bellkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bellkit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = bellkit(args);
    assert!(out.status.success(), "{args:?} failed: {out:?}");
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn predict_prints_the_quantum_maximum() {
    let out = stdout(&["predict"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["i_a"].as_f64().unwrap(), 1.08866211);
    // Reals are rounded to 9 significant digits on output.
    let p22 = v["behavior"]["p"][0][0][2][2].as_f64().unwrap();
    assert!((p22 - 1.0 / 18.0).abs() < 1e-9);

    let noisy = stdout(&["predict", "--visibility", "0.98"]);
    let v: serde_json::Value = serde_json::from_str(&noisy).unwrap();
    assert!((v["i_a"].as_f64().unwrap() - 0.98 * 1.08866211).abs() < 1e-7);
}

#[test]
fn bound_prints_exact_rationals() {
    let out = stdout(&["bound"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["binary_max"], "1/1");
    assert_eq!(v["nonsignaling_max"], "4/3");
    assert_eq!(v["coefficients_in_unit_range"], true);
}

#[test]
fn optimize_reaches_the_quantum_maximum_deterministically() {
    let args = ["optimize", "--seed", "0", "--restarts", "5"];
    let a = stdout(&args);
    let b = stdout(&args);
    assert_eq!(a, b, "identical argv and seed must give identical bytes");
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert!(v["value"].as_f64().unwrap() >= 1.0886);
}

#[test]
fn simulate_analyze_pipe_round_trip() {
    let sim = stdout(&["simulate", "--seed", "1", "--runs", "2000"]);
    assert_eq!(sim.lines().count(), 2000);
    let again = stdout(&["simulate", "--seed", "1", "--runs", "2000"]);
    assert_eq!(sim, again);

    let mut child = Command::new(env!("CARGO_BIN_EXE_bellkit"))
        .args(["analyze", "--mle-fit"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .as_mut()
        .unwrap()
        .write_all(sim.as_bytes())
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["schema"], "1");
    let ia = v["ia_mean"].as_f64().unwrap();
    assert!((1.0..1.13).contains(&ia), "ia {ia}");
    assert!(v["conditions"][2]["standard_deviations"].as_f64().unwrap() > 4.0);
    assert!(v["mle"]["converged"].as_bool().unwrap());
}

#[test]
fn analyze_table_output_has_report_columns() {
    let sim = stdout(&["simulate", "--seed", "2"]);
    let dir = std::env::temp_dir().join("bellkit-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("runs.jsonl");
    std::fs::write(&path, &sim).unwrap();
    let table = stdout(&["analyze", "--input", path.to_str().unwrap(), "--table"]);
    assert!(table.contains("Full data set"));
    assert!(table.contains("Coin tosses"));
    assert!(table.contains("(iii) binarity"));
    let reduced = stdout(&[
        "analyze",
        "--input",
        path.to_str().unwrap(),
        "--table",
        "--reduced",
    ]);
    assert!(reduced.contains("Reduced data set"));
}

#[test]
fn exit_codes_distinguish_usage_and_data_errors() {
    let usage = bellkit(&["frobnicate"]);
    assert_eq!(usage.status.code(), Some(1));
    let usage = bellkit(&["simulate", "--no-such-flag"]);
    assert_eq!(usage.status.code(), Some(1));

    let mut child = Command::new(env!("CARGO_BIN_EXE_bellkit"))
        .args(["analyze"])
        .stdin(Stdio::piped())
        .stderr(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .as_mut()
        .unwrap()
        .write_all(b"{\"run\":0}\nnot json\n")
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 1"), "stderr: {err}");

    let missing = bellkit(&["analyze", "--input", "/no/such/file.jsonl"]);
    assert_eq!(missing.status.code(), Some(2));

    let bad_config = bellkit(&["simulate", "--visibility", "1.5"]);
    assert_eq!(bad_config.status.code(), Some(2));
}

#[test]
fn help_exits_zero() {
    let help = bellkit(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
}
