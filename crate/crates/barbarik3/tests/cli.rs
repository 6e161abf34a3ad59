//! End-to-end tests of the command-line interface: subcommands, output
//! schemas, exit codes, and byte-level reproducibility.

use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_barbarik3"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("failed to launch the CLI")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout was not UTF-8")
}

const UNION_N4: &str = r#"{"family":"union_of_products","params":{"k":1},"seed":4}"#;

#[test]
fn budget_subcommand_emits_the_frozen_table() {
    let out = run(&["budget", "--n", "7", "--n", "24", "--n", "88", "--eta", "0.9", "--delta", "0.2"]);
    assert!(out.status.success());
    let rows: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0]["n"], 7);
    assert_eq!(rows[0]["samples"], 29_630);
    assert_eq!(rows[0]["rounded_to_thousand"], 30_000);
    assert_eq!(rows[1]["samples"], 63_210);
    assert_eq!(rows[1]["rounded_to_thousand"], 64_000);
    assert_eq!(rows[2]["samples"], 189_630);
    assert_eq!(rows[2]["rounded_to_thousand"], 190_000);
}

#[test]
fn gen_setting_a_writes_descriptor_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "gen-setting-a",
        "--n-list",
        "4,7,10",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let listed = stdout_of(&out);
    assert_eq!(listed.lines().count(), 3);

    let descriptor = dir.path().join("union_of_products_n7.json");
    assert!(descriptor.exists());
    let parsed: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&descriptor).unwrap()).unwrap();
    assert_eq!(parsed["family"], "union_of_products");
    assert_eq!(parsed["params"]["k"], 2);
    assert_eq!(parsed["seed"], 7);
}

#[test]
fn gen_setting_a_defaults_to_the_39_instance_sweep() {
    let out = run(&["gen-setting-a"]);
    assert!(out.status.success());
    let all: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    let all = all.as_array().unwrap();
    assert_eq!(all.len(), 39);
    assert_eq!(all[0]["params"]["k"], 1);
    assert_eq!(all[38]["params"]["k"], 39);
}

#[test]
fn gen_setting_a_rejects_bad_dimensions() {
    let out = run(&["gen-setting-a", "--n-list", "5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn test_subcommand_accepts_an_ideal_sampler() {
    let out = run(&["test", "--benchmark", UNION_N4, "--sampler", "ideal", "--seed", "5"]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(report["verdict"], "accept");
    assert_eq!(report["n"], 4);
    assert_eq!(report["seed"], 5);
    assert!(report["ledger"]["samp_q"].as_u64().unwrap() > 0);
}

#[test]
fn test_subcommand_reads_descriptors_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bench.json");
    std::fs::write(&path, UNION_N4).unwrap();
    let out = run(&[
        "test",
        "--benchmark",
        path.to_str().unwrap(),
        "--sampler",
        "mass-swap:0.95",
        "--seed",
        "1",
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "benchmark,n,verdict,phase,d_hat,samp_q,pcond_q,samp_p,dual_q,seed"
    );
    let row = lines.next().unwrap();
    assert!(row.starts_with("union_of_products_n4,4,reject,"), "row was: {row}");
}

#[test]
fn trials_csv_output_is_byte_deterministic() {
    let args = [
        "trials",
        "--count",
        "3",
        "--benchmark",
        UNION_N4,
        "--sampler",
        "mass-swap:0.95",
        "--seed",
        "11",
        "--format",
        "csv",
    ];
    let first = run(&args);
    let second = run(&args);
    assert!(first.status.success());
    assert_eq!(stdout_of(&first), stdout_of(&second));

    let text = stdout_of(&first);
    assert_eq!(text.lines().count(), 4, "header plus one row per trial");
    for row in text.lines().skip(1) {
        assert!(row.contains(",reject,"), "far sampler should be rejected: {row}");
    }
}

#[test]
fn check_subcommand_passes_and_prints_a_table() {
    let out = run(&["check"]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert_eq!(text.lines().count(), 4);
    for line in text.lines() {
        assert!(line.contains("PASS"), "suite line failed: {line}");
    }
}

#[test]
fn configuration_errors_exit_with_code_2() {
    // ε at the admissibility boundary.
    let out = run(&["test", "--benchmark", UNION_N4, "--epsilon", "0.2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());

    // Unknown fault model.
    let out = run(&["test", "--benchmark", UNION_N4, "--sampler", "bogus"]);
    assert_eq!(out.status.code(), Some(2));

    // Malformed inline descriptor.
    let out = run(&["test", "--benchmark", r#"{"family":"nope"}"#]);
    assert_eq!(out.status.code(), Some(2));

    // Bad pcond mode.
    let out = run(&["test", "--benchmark", UNION_N4, "--pcond-mode", "sideways"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn io_errors_exit_with_code_3() {
    let out = run(&["test", "--benchmark", "/nonexistent/path.json"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn rejection_pcond_mode_runs_end_to_end() {
    let out = run(&[
        "test",
        "--benchmark",
        UNION_N4,
        "--pcond-mode",
        "rejection:1000000",
        "--seed",
        "2",
    ]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(report["verdict"], "accept");
    assert!(report["ledger"]["pcond_rejection_attempts"].as_u64().unwrap() > 0);
}
