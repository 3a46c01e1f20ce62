//! End-to-end tests of the command-line binary.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_prime-running"))
}

fn run_ok(args: &[&str]) -> String {
    let out = bin().args(args).output().unwrap();
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn run_err(args: &[&str]) -> Output {
    let out = bin().args(args).output().unwrap();
    assert!(!out.status.success(), "{args:?} unexpectedly succeeded");
    out
}

#[test]
fn run_table_to_stdout() {
    let csv = run_ok(&["run", "--x", "100", "--d", "3", "--checkpoints", "10,100"]);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines, ["x,a0,a1,a2", "10,3,4,3", "100,3,50,47"]);
}

#[test]
fn run_accepts_scientific_notation_and_grid() {
    let csv = run_ok(&["run", "--x", "1e4", "--d", "4", "--grid", "5"]);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "x,a0,a1,a2,a3");
    assert!(lines.last().unwrap().starts_with("10000,"));
}

#[test]
fn pause_and_resume_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let ck = dir.path().join("scan.json");
    let out_a = dir.path().join("a.csv");
    let out_b = dir.path().join("b.csv");
    let base = [
        "run",
        "--x",
        "100000",
        "--d",
        "5",
        "--checkpoints",
        "1000,50000,100000",
    ];

    // one shot
    let mut args: Vec<&str> = base.to_vec();
    args.extend(["--out", out_a.to_str().unwrap()]);
    run_ok(&args);

    // paused run, then resume from the checkpoint file
    let mut args: Vec<&str> = base.to_vec();
    args.extend([
        "--checkpoint",
        ck.to_str().unwrap(),
        "--pause-at",
        "40000",
    ]);
    run_ok(&args);
    assert!(ck.exists());
    let mut args: Vec<&str> = base.to_vec();
    args.extend([
        "--checkpoint",
        ck.to_str().unwrap(),
        "--out",
        out_b.to_str().unwrap(),
    ]);
    run_ok(&args);

    assert_eq!(
        std::fs::read(&out_a).unwrap(),
        std::fs::read(&out_b).unwrap()
    );
}

#[test]
fn checkpoint_config_mismatch_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let ck = dir.path().join("scan.json");
    run_ok(&[
        "run",
        "--x",
        "1000",
        "--d",
        "3",
        "--checkpoints",
        "1000",
        "--checkpoint",
        ck.to_str().unwrap(),
        "--pause-at",
        "500",
    ]);
    let out = run_err(&[
        "run",
        "--x",
        "1000",
        "--d",
        "5",
        "--checkpoints",
        "1000",
        "--checkpoint",
        ck.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reversed_flag_changes_attribution() {
    let fwd = run_ok(&["run", "--x", "10", "--d", "3", "--checkpoints", "10"]);
    let rev = run_ok(&[
        "run",
        "--x",
        "10",
        "--d",
        "3",
        "--checkpoints",
        "10",
        "--reversed",
    ]);
    assert_eq!(fwd.lines().nth(1), Some("10,3,4,3"));
    assert_eq!(rev.lines().nth(1), Some("10,1,2,7"));
}

#[test]
fn bias_csv_against_known_rational() {
    let csv = run_ok(&["bias", "--d", "3", "--Q", "6", "--format", "csv"]);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "a,rational,decimal");
    assert_eq!(lines[1], "1,1/4,0.2500");
    assert_eq!(lines[2], "2,-1/4,-0.2500");
}

#[test]
fn bias_methods_agree_and_q_spec_grammar_works() {
    let a = run_ok(&["bias", "--d", "3", "--Q", "10#", "--method", "recursion"]);
    let b = run_ok(&["bias", "--d", "3", "--Q", "210", "--method", "brute"]);
    // same entries; only the Q description differs
    let strip = |s: &str| {
        s.lines()
            .filter(|l| !l.contains("Q_description"))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip(&a), strip(&b));
    assert!(a.contains("\"rational\": \"35/192\""));
}

#[test]
fn bias_brute_force_guard_exits_3() {
    let out = run_err(&["bias", "--d", "3", "--Q", "30#", "--method", "brute"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn walk_path_csv() {
    let csv = run_ok(&["walk", "--n", "10"]);
    let lines: Vec<&str> = csv.lines().collect();
    // primes 2(left), 3(up), 7(left, 7 = 2 mod 5); 5 = 0 mod 5 has no step
    assert_eq!(lines[0], "n,x,y");
    assert_eq!(lines[1], "1,0,0");
    assert_eq!(lines[2], "2,-1,0");
    assert_eq!(lines[3], "3,-1,1");
    assert_eq!(lines[10], "10,-2,1");
}

#[test]
fn walk_requires_map_for_other_moduli() {
    let out = run_err(&["walk", "--n", "10", "--d", "3"]);
    assert_eq!(out.status.code(), Some(2));
    run_ok(&["walk", "--n", "10", "--d", "3", "--map", "1:up,2:down"]);
}

#[test]
fn simulate_is_deterministic_for_a_seed() {
    let args = [
        "simulate", "--x", "1000", "--Q", "6", "--d", "3", "--a", "1", "--trials", "8",
        "--seed", "7",
    ];
    let a = run_ok(&args);
    let b = run_ok(&args);
    assert_eq!(a, b);
    assert!(a.contains("\"n_trials\": 8"));
    let out = run_err(&[
        "simulate", "--x", "1000", "--Q", "10", "--d", "3", "--a", "1",
    ]);
    assert_eq!(out.status.code(), Some(2), "d must divide Q");
}

#[test]
fn race_json() {
    let json = run_ok(&["race", "--x", "100", "--d", "3", "--a", "1", "--b", "2"]);
    let doc: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(doc["race"], serde_json::json!(50 - 47));
}

#[test]
fn output_files_are_written_atomically() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.csv");
    let bias = dir.path().join("b.csv");
    run_ok(&[
        "run",
        "--x",
        "1000",
        "--d",
        "3",
        "--checkpoints",
        "1000",
        "--out",
        out.to_str().unwrap(),
        "--bias-out",
        bias.to_str().unwrap(),
    ]);
    assert!(out.exists() && bias.exists());
    assert!(!Path::new(&out.with_extension("tmp-out")).exists());
    let bias_csv = std::fs::read_to_string(&bias).unwrap();
    assert!(bias_csv.starts_with("x,a1,a2\n"));
}
