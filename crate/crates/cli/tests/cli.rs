use std::path::Path;
use std::process::Command as Process;

use clap::Parser;
use gevrey_nets_cli::config::ExperimentConfig;
use gevrey_nets_cli::{execute, run_cli, Cli, Command};
use serde_json::Value;

fn run(dir: &Path, args: &[&str]) -> gevrey_nets_cli::Outcome {
    let out = dir.to_str().unwrap();
    let mut argv = vec!["gevrey-nets"];
    argv.extend_from_slice(args);
    argv.extend_from_slice(&["--out", out]);
    run_cli(&Cli::parse_from(argv))
}

fn report(dir: &Path) -> Value {
    serde_json::from_slice(&std::fs::read(dir.join("report.json")).unwrap()).unwrap()
}

#[test]
fn weights_check_reports_gevrey_constants() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(tmp.path(), &["weights-check"]);
    assert_eq!(o.code, 0, "{:?}", o.message);
    let r = report(tmp.path());
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["result"]["m1_ok"], true);
    assert_eq!(r["result"]["H"], 4.0);
    assert_eq!(r["result"]["functional_m2_ok"], true);
    assert!(tmp.path().join("weight.csv").exists());
}

#[test]
fn omega_weights_are_checked_too() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(tmp.path(), &["weights-check", "--weight", "omega:pow:0.5"]);
    assert_eq!(o.code, 0, "{:?}", o.message);
    assert_eq!(report(tmp.path())["result"]["kind"], "function");
}

#[test]
fn impossibility_demo_reports_minus_a_quarter() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(tmp.path(), &["impossibility-demo"]);
    assert_eq!(o.code, 0, "{:?}", o.message);
    let r = report(tmp.path());
    assert_eq!(r["result"]["verdict_label"], "non-negligible");
    for v in r["result"]["values_at_origin"].as_array().unwrap() {
        assert!((v.as_f64().unwrap() + 0.25).abs() <= 1e-3);
    }
}

#[test]
fn zero_table_embeds_to_a_negligible_net() {
    let tmp = tempfile::tempdir().unwrap();
    let table = tmp.path().join("zero.json");
    std::fs::write(&table, r#"{"xi": [-1, 1], "re": [0, 0], "im": [0, 0]}"#).unwrap();
    let dist = format!("table:{}", table.display());
    let out = tmp.path().join("run");
    let o = run(&out, &["embed", "--dist", &dist]);
    assert_eq!(o.code, 0, "{:?}", o.message);
    let r = report(&out);
    assert_eq!(r["result"]["all_zero"], true);
    assert_eq!(r["result"]["verdict"]["classification"], "negligible");
    let manifest = std::fs::read_to_string(out.join("MANIFEST.json")).unwrap();
    assert!(manifest.contains("zero.json"));
}

#[test]
fn wavefront_writes_a_cone_table() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(tmp.path(), &["wavefront", "--dist", "heaviside"]);
    assert_eq!(o.code, 0, "{:?}", o.message);
    let csv = std::fs::read_to_string(tmp.path().join("wf.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("center,cone,verdict,spread"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().any(|r| r.starts_with("0,0,singular")));
    assert!(rows.iter().any(|r| r.starts_with("2,1,regular")));
    assert_eq!(report(tmp.path())["result"]["matches_oracle"], true);
}

#[test]
fn declared_expectations_gate_the_exit_code() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig { out: tmp.path().to_path_buf(), ..Default::default() };
    cfg.expect.classification = Some(gevrey_nets::estimators::Classification::Negligible);
    let o = execute(Command::Classify, &cfg, None);
    assert_eq!(o.code, 1);
    assert_eq!(o.message.as_deref(), Some("mismatch checks=classification"));
    assert_eq!(report(tmp.path())["status"], "mismatch");

    cfg.expect.classification = Some(gevrey_nets::estimators::Classification::Moderate);
    assert_eq!(execute(Command::Classify, &cfg, None).code, 0);
}

#[test]
fn precondition_errors_exit_two_with_one_line() {
    let tmp = tempfile::tempdir().unwrap();
    let cases: &[&[&str]] = &[
        &["embed", "--dist", "nonsense"],
        &["bb-classify"],
        &["crosscheck", "--weight", "omega:pow:0.5"],
        &["classify", "--ladder", "0.125,0.5,20"],
        &["classify", "--weight", "gevrey:0.5"],
        &["classify", "--sigma", "0.9"],
    ];
    for args in cases {
        let o = run(tmp.path(), args);
        assert_eq!(o.code, 2, "{args:?}");
        let msg = o.message.unwrap();
        assert!(msg.starts_with("error kind=") && !msg.contains('\n'), "{msg}");
    }
    let o = run(tmp.path(), &["classify", "--ladder", "0.125,0.5,20"]);
    assert!(o.message.unwrap().starts_with("error kind=aliasing"));
}

#[test]
fn manifest_round_trips() {
    let tmp = tempfile::tempdir().unwrap();
    let first = tmp.path().join("first");
    let second = tmp.path().join("second");
    assert_eq!(run(&first, &["classify", "--dist", "pv_inverse", "--mode", "roumieu"]).code, 0);
    let manifest = first.join("MANIFEST.json");
    let o = run(&second, &["classify", "--config", manifest.to_str().unwrap()]);
    assert_eq!(o.code, 0, "{:?}", o.message);
    assert_eq!(std::fs::read(first.join("report.json")).unwrap(), std::fs::read(second.join("report.json")).unwrap());
    let loaded = ExperimentConfig::load(&manifest).unwrap();
    assert_eq!(loaded.dist, "pv_inverse");
}

#[test]
fn binary_runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let mut reports = Vec::new();
    for name in ["a", "b"] {
        let dir = tmp.path().join(name);
        let status = Process::new(env!("CARGO_BIN_EXE_gevrey-nets"))
            .args(["bb-classify", "--weight", "omega:log1p", "--out"])
            .arg(&dir)
            .status()
            .unwrap();
        assert!(status.success());
        reports.push(std::fs::read(dir.join("report.json")).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
}

#[test]
fn binary_prints_reason_on_stderr() {
    let tmp = tempfile::tempdir().unwrap();
    let out = Process::new(env!("CARGO_BIN_EXE_gevrey-nets"))
        .args(["embed", "--dist", "nonsense", "--out"])
        .arg(tmp.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.lines().count(), 1);
    assert!(err.starts_with("error kind=invalid_parameter"));
}
