//! End-to-end runs of the `saw` binary: exit codes, JSON shape, numeric
//! spot checks, determinism of stdout, CSV side outputs, and the walk-cap
//! environment override.

// Reference constants are written with 17 significant digits on purpose.
#![allow(clippy::excessive_precision)]

use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn saw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_saw"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

fn field(v: &Value, key: &str) -> f64 {
    v[key]
        .as_f64()
        .unwrap_or_else(|| panic!("missing float field {key} in {v}"))
}

fn tmp_path(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("saw_cli_{}_{name}", std::process::id()))
}

#[test]
fn weights_reports_the_reference_table() {
    let out = saw(&["weights", "--theta", "pi/3", "--format", "json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json_of(&out);
    assert!((field(&v, "u1") - 0.541_196_100_146_196_98).abs() < 1e-15);
    assert!((field(&v, "v") - 0.292_893_218_813_452_48).abs() < 1e-15);
    assert!(field(&v, "w2").abs() < 1e-12, "w2 vanishes at pi/3");
    assert!(field(&v, "sum_rule_residual") < 1e-12);
}

#[test]
fn stdout_is_byte_identical_across_runs() {
    let args = ["verify", "yb", "--grid", "4", "--random", "10"];
    let first = saw(&args);
    let second = saw(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn yb_verification_honors_the_tolerance_flag() {
    let out = saw(&["verify", "yb", "--grid", "6", "--random", "25", "--tol", "1e-11"]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert!(field(&v, "max_residual") <= 1e-11);
    assert_eq!(v["checks"].as_u64(), Some(61));

    let out = saw(&["verify", "yb", "--grid", "4", "--random", "0", "--tol", "1e-18"]);
    assert_eq!(out.status.code(), Some(1), "unreachable tolerance must fail");
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("max_residual"), "names the residual: {stderr}");
    // The report itself is still printed before the verdict.
    assert!(json_of(&out)["max_residual"].is_number());
}

#[test]
fn yc_prints_the_width_one_constant() {
    let out = saw(&["yc", "--angles", "pi/3", "--tol", "1e-9"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("3.414213562"), "y_c(1) = 2 + sqrt(2): {text}");
}

#[test]
fn rect_identity_verification_passes() {
    let out = saw(&[
        "verify",
        "rect-identity",
        "--angles",
        "pi/3,1.1",
        "--half-height",
        "2",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json_of(&out);
    assert!(field(&v, "residual") <= 1e-10);
    assert!(v["walks"].as_u64().unwrap() > 100);
}

#[test]
fn contour_relation_verification_passes_with_fugacity() {
    let out = saw(&[
        "verify",
        "cr",
        "--angles",
        "1.9,pi/3",
        "--half-height",
        "1",
        "--fugacity",
        "2",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json_of(&out);
    assert_eq!(v["skip_last_column"].as_bool(), Some(true));
    assert!(field(&v, "residual") <= 1e-10);
}

#[test]
fn fugacity_identity_verification_passes() {
    let out = saw(&[
        "verify",
        "fugacity-identity",
        "--angles",
        "1.9,pi/3",
        "--half-height",
        "1",
        "--fugacity",
        "2",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(field(&json_of(&out), "residual") <= 1e-9);
}

#[test]
fn strip_partition_reports_the_width_one_bridge_sum() {
    let out = saw(&["partition", "strip", "--theta", "pi/3"]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert!((field(&v, "b") - 0.828_427_124_746_190_1).abs() < 1e-9);
    assert_eq!(v["status"]["converged"].as_bool(), Some(true));
}

#[test]
fn rect_partition_reports_positive_sums_and_the_identity() {
    let rect = json_of(&saw(&[
        "partition", "rect", "--angles", "0.9,2.2", "--half-height", "2",
    ]));
    assert!(field(&rect, "identity_residual") <= 1e-10);
    assert!(field(&rect, "b") > 0.0);
}

#[test]
fn two_point_and_triangle_subcommands_run() {
    let out = saw(&[
        "two-point",
        "--theta",
        "pi/3",
        "--width",
        "2",
        "--half-height",
        "2",
        "--to",
        "1",
    ]);
    assert!(out.status.success());
    assert!(field(&json_of(&out), "value") > 0.0);

    let out = saw(&["triangle", "--level", "1"]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert!(field(&v, "residual") <= 1e-10);
    assert_eq!(v["side"].as_u64(), Some(3));
}

#[test]
fn csv_side_outputs_carry_header_rows() {
    let bridges_csv = tmp_path("bridges.csv");
    let out = saw(&[
        "bridges",
        "--t-max",
        "3",
        "--csv",
        bridges_csv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&bridges_csv).expect("csv written");
    assert!(text.starts_with("width,a,b,triangle_cap,cubic_partial\n"));
    assert_eq!(text.lines().count(), 4, "header plus one row per width");
    std::fs::remove_file(&bridges_csv).ok();

    let swap_csv = tmp_path("swap.csv");
    let out = saw(&[
        "swap-experiment",
        "--angles",
        "pi/3,pi/2",
        "--column",
        "0",
        "--heights",
        "1,2,4",
        "--csv",
        swap_csv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&swap_csv).expect("csv written");
    assert!(text.starts_with("height,original,swapped,gap\n"));
    std::fs::remove_file(&swap_csv).ok();
    let v = json_of(&out);
    assert_eq!(v["gaps"].as_array().map(Vec::len), Some(3));
}

#[test]
fn usage_errors_exit_with_code_two() {
    // No angle source given.
    let out = saw(&["verify", "cr"]);
    assert_eq!(out.status.code(), Some(2));
    // Unparsable angle token.
    let out = saw(&["weights", "--theta", "nope"]);
    assert_eq!(out.status.code(), Some(2));
    // Unknown flag (clap usage error).
    let out = saw(&["weights", "--theta", "pi/3", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
    // Conflicting angle sources (clap conflict).
    let out = saw(&["partition", "strip", "--angles", "pi/3", "--theta", "pi/3"]);
    assert_eq!(out.status.code(), Some(2));
    // Tilt outside the open interval (0, pi).
    let out = saw(&["weights", "--theta", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn walk_cap_environment_override_is_respected() {
    let out = Command::new(env!("CARGO_BIN_EXE_saw"))
        .args([
            "partition",
            "rect",
            "--theta",
            "1.2",
            "--width",
            "3",
            "--half-height",
            "3",
        ])
        .env("SAW_MAX_WALKS", "1000")
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("cap"), "mentions the cap: {stderr}");
}

#[test]
fn jobs_flag_is_accepted() {
    let out = saw(&["--jobs", "2", "verify", "yb", "--grid", "3", "--random", "5"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
