//! End-to-end checks of the command-line surface: subcommands, exit codes,
//! output determinism, and the documented file formats.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_metroscale"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn temp_path(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("metroscale-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("temp dir");
    dir.join(name)
}

#[test]
fn bounds_table_prints_the_reference_values() {
    let out = run(&["bounds", "--N", "100", "--nu", "1", "--gap", "1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("0.1"), "{text}");
    assert!(text.contains("0.01"), "{text}");
    assert!(text.contains("sequential"));
}

#[test]
fn bounds_rejects_nonpositive_input() {
    let out = run(&["bounds", "--N", "0", "--nu", "1", "--gap", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn single_run_is_deterministic() {
    let args = [
        "single", "--protocol", "ghz", "--N", "8", "--nu", "10000", "--phi", "0.09817", "--seed",
        "7",
    ];
    let first = run(&args);
    assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stderr));
    let second = run(&args);
    assert_eq!(first.stdout, second.stdout);
    let text = stdout(&first);
    assert!(text.contains("delta_phi_empirical"));
    assert!(text.contains("\"u_phi_applications\": 80000"));
}

#[test]
fn single_rejects_unknown_protocol() {
    let out = run(&["single", "--protocol", "warp", "--N", "4"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown strategy"));
}

#[test]
fn single_reports_numerical_failures_with_exit_2() {
    // stationary operating point under the at-true-value policy
    let out = run(&[
        "single",
        "--protocol",
        "ramsey",
        "--N",
        "4",
        "--nu",
        "100",
        "--phi",
        "0",
        "--seed",
        "1",
        "--policy",
        "at-true-value",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("degenerate"));
}

#[test]
fn sweep_with_missing_config_exits_1() {
    let out = run(&["sweep", "--config", "missing.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot read config"));
}

#[test]
fn sweep_emits_deterministic_csv() {
    let path_a = temp_path("sweep-a.csv");
    let path_b = temp_path("sweep-b.csv");
    for (path, n_workers) in [(&path_a, "1"), (&path_b, "3")] {
        let out = bin()
            .args([
                "sweep",
                "--strategies",
                "ramsey-cc,ghz-qc",
                "--N",
                "4,8,16",
                "--nu",
                "500",
                "--seed",
                "12",
                "--output",
                path.to_str().unwrap(),
            ])
            .env("METROSCALE_WORKERS", n_workers)
            .output()
            .expect("binary runs");
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let a = std::fs::read(&path_a).unwrap();
    let b = std::fs::read(&path_b).unwrap();
    assert_eq!(a, b, "csv must be identical regardless of worker count");
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.lines().next().unwrap(), "strategy,N,nu,delta_phi,bound,ratio");
    assert_eq!(text.lines().count(), 7);
}

#[test]
fn sweep_reads_config_file_and_flags_override() {
    let config_path = temp_path("sweep-config.json");
    std::fs::write(
        &config_path,
        r#"{
  "strategies": ["sequential"],
  "n_values": [4, 8, 16, 32],
  "nu": 400,
  "phi_true": null,
  "generator": { "preset": "qubit-z" },
  "seed": 3
}"#,
    )
    .unwrap();
    let out_path = temp_path("sweep-config-out.json");
    let out = run(&[
        "sweep",
        "--config",
        config_path.to_str().unwrap(),
        "--nu",
        "600",
        "--format",
        "json",
        "--output",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(report["config"]["nu"], 600, "flag must override file value");
    assert_eq!(report["config"]["strategies"][0], "sequential");
    assert_eq!(report["cells"].as_array().unwrap().len(), 4);
}

#[test]
fn digits_prints_the_probe_accounting() {
    let out = run(&[
        "digits",
        "--base",
        "10",
        "--digits",
        "3",
        "--nu",
        "400",
        "--fraction",
        "0.3789",
        "--seed",
        "7",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("probes per batch: 111 = (10^3 - 1)/(10 - 1)"), "{text}");

    let out = run(&[
        "digits", "--base", "2", "--digits", "6", "--nu", "400", "--fraction", "0.3789",
        "--seed", "3",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("probes per batch: 63 = (2^6 - 1)/(2 - 1)"), "{text}");
    assert!(text.contains("assembled fraction: 0.37"), "{text}");
}

#[test]
fn check_subcommand_is_green() {
    let out = run(&["check"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert_eq!(text.matches("PASS").count(), 8, "{text}");
    assert!(!text.contains("FAIL"));
}

#[test]
fn unknown_subcommand_exits_1() {
    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn help_exits_0() {
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("sweep"));
}
