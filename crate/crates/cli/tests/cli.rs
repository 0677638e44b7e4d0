use std::process::{Command, Output};

use serde_json::Value;

fn incidence(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_incidence"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("valid JSON on stdout")
}

#[test]
fn moments_hand_case() {
    let out = incidence(&["moments", "--prime", "5", "--set", "list:0,1"]);
    assert!(out.status.success());
    let r = json(&out);
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["moments"]["s3"], "60");
    assert_eq!(r["moments"]["s4"], "108");
    assert_eq!(r["histogram"]["counts"]["2"], 6);
    assert_eq!(r["histogram"]["counts"]["1"], 12);
}

#[test]
fn moments_full_field() {
    let out = incidence(&["moments", "-p", "5", "--set", "list:0,1,2,3,4"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["moments"]["s3"], "3750");
}

#[test]
fn oversized_interval_is_a_usage_error() {
    let out = incidence(&["moments", "-p", "7", "--set", "interval:0:9"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("9"));
}

#[test]
fn bad_descriptor_names_token() {
    let out = incidence(&["moments", "-p", "7", "--set", "ap:1:x:3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("x"));
    let out = incidence(&["moments", "-p", "9", "--set", "list:1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_passes_and_runs_oracle() {
    let out = incidence(&["verify", "-p", "5", "--set", "list:0,1"]);
    assert_eq!(out.status.code(), Some(0));

    let out = incidence(&["verify", "-p", "31", "--set", "uniform:8:7"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["oracle"]["t_pass"], true);
    assert_eq!(r["oracle"]["t_brute"], r["moments"]["s3"]);
    assert_eq!(r["all_exact_checks_pass"], true);
}

#[test]
fn injected_fault_exits_with_check_failure() {
    let out = incidence(&["verify", "-p", "5", "--set", "list:0,1", "--inject-fault"]);
    assert_eq!(out.status.code(), Some(1));
    let out = incidence(&["sweep", "--primes", "11", "--set", "uniform:4", "--inject-fault"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn sweep_is_byte_identical() {
    let args = ["sweep", "--primes", "101,53", "--set", "bernoulli:0.3", "--trials", "3", "--seed", "9"];
    let a = incidence(&args);
    let b = incidence(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1 + 6 + 1);
    assert!(lines[1].starts_with("53,0,"));
    assert!(lines[7].starts_with("# summary rows=6 "));
}

#[test]
fn sweep_single_trial_thread_count_does_not_change_output() {
    let base = ["sweep", "--primes", "61,67", "--set", "uniform:9", "--trials", "2"];
    let one = incidence(&[&base[..], &["--threads", "1"]].concat());
    let two = incidence(&[&base[..], &["--threads", "2"]].concat());
    assert_eq!(one.stdout, two.stdout);
}

#[test]
fn writes_to_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("support.csv");
    let out = incidence(&[
        "support",
        "-p",
        "5",
        "--set",
        "list:0,1",
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(path).unwrap();
    assert!(text.starts_with("a1,a3,support_size,second_moment\n"));
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn histogram_csv() {
    let out = incidence(&["moments", "-p", "5", "--set", "list:0,1", "--format", "csv"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "k,lines\n1,12\n2,6\n");
}
