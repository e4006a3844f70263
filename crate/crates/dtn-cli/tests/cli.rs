use dtn_cli::acceptance::{run_one, AcceptanceOptions, Status};
use dtn_cli::commands;
use dtn_cli::config::{Geometry, RunConfig, WindowSpec};
use std::process::Command;

fn dtn() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dtn"))
}

#[test]
fn config_round_trip_and_window_formats() {
    let c = RunConfig::from_json(r#"{"window":{"type":"intervals","items":[[-1,1],[2,3]]},"ells":[0.1]}"#).unwrap();
    assert_eq!(c.window, WindowSpec::Intervals { items: vec![[-1.0, 1.0], [2.0, 3.0]] });
    let c = RunConfig::from_json(r#"{"geometry":"layer","window":{"type":"disk","radius":1.0}}"#).unwrap();
    assert_eq!(c.geometry, Geometry::Layer);
    let text = serde_json::to_string(&RunConfig::default()).unwrap();
    assert_eq!(RunConfig::from_json(&text).unwrap(), RunConfig::default());
}

#[test]
fn invalid_configs_are_rejected() {
    for bad in [
        r#"{"alpha":-1}"#,
        r#"{"ells":[0.1,0]}"#,
        r#"{"deterministic":false}"#,
        r#"{"geometry":"layer"}"#,
        r#"{"window":{"type":"intervals","items":[[1,-1]]}}"#,
        r#"{"geometry":"coupled"}"#,
        r#"{"unknown":1}"#,
        r#"{"basis_degree":0}"#,
    ] {
        assert!(RunConfig::from_json(bad).is_err(), "{bad}");
    }
}

#[test]
fn empty_sweep_has_only_a_header() {
    let cfg = RunConfig { ells: vec![], ..RunConfig::default() };
    let (t, _) = commands::sweep(&cfg).unwrap();
    assert_eq!(t.to_string().unwrap().lines().count(), 1);
}

#[test]
fn sweep_output_is_deterministic_and_ordered() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"ells":[0.1,0.2,0.05],"basis_degree":12}"#).unwrap();
    let run = |threads: &str| {
        let o = dtn().args(["sweep", "--config"]).arg(&cfg).args(["--threads", threads]).output().unwrap();
        assert!(o.status.success());
        String::from_utf8(o.stdout).unwrap()
    };
    let a = run("1");
    let b = run("3");
    assert_eq!(a, b);
    let ells: Vec<f64> = a.lines().skip(1).map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(ells, vec![0.1, 0.2, 0.05]);
    assert!(a.lines().nth(1).unwrap().starts_with("1.0000000000000001e-1,"));
}

#[test]
fn coupled_sweep_reports_quarter_coefficient() {
    let cfg = RunConfig {
        geometry: Geometry::Coupled,
        alpha_plus: Some(std::f64::consts::PI),
        alpha_minus: Some(std::f64::consts::FRAC_PI_2),
        ells: vec![0.05],
        basis_degree: 16,
        ..RunConfig::default()
    };
    let t = commands::coupled(&cfg).unwrap().to_string().unwrap();
    let row: Vec<&str> = t.lines().nth(1).unwrap().split(',').collect();
    let pred: f64 = row[4].parse().unwrap();
    assert!((pred - 0.25).abs() < 1e-12);
}

#[test]
fn solver_errors_stay_in_their_row() {
    let cfg = RunConfig { ells: vec![0.1, 1e-200], basis_degree: 8, ..RunConfig::default() };
    let (t, _) = commands::sweep(&cfg).unwrap();
    assert_eq!(t.rows.len(), 2);
    let text = t.to_string().unwrap();
    assert!(text.lines().nth(1).unwrap().ends_with(",ok"));
    assert!(!text.lines().nth(2).unwrap().ends_with(",ok"));
}

#[test]
fn matrix_export_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"ells":[0.1],"basis_degree":6,"export_matrices":true}"#).unwrap();
    let o = dtn().args(["solve", "--config"]).arg(&cfg).arg("--out").arg(dir.path()).output().unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let m = std::fs::read_to_string(dir.path().join("qb_0.csv")).unwrap();
    assert_eq!(m.lines().count(), 6);
    assert!(dir.path().join("solve.csv").exists());
}

#[test]
fn constants_report_closed_forms() {
    let v = commands::constants(&RunConfig { basis_degree: 16, ..RunConfig::default() }).unwrap();
    let t0 = v["constants"]["tau0"].as_f64().unwrap();
    let t1 = v["constants"]["tau1"].as_f64().unwrap();
    assert!((t0 - std::f64::consts::FRAC_PI_2).abs() < 1e-12 && (t1 - 4.0 / 3.0).abs() < 1e-12);
    let cfg = RunConfig::from_json(r#"{"geometry":"layer","window":{"type":"disk","radius":1.0},"basis_degree":4}"#).unwrap();
    let v = commands::constants(&cfg).unwrap();
    assert!((v["tau0"].as_f64().unwrap() - 4.0 / 3.0).abs() < 1e-12);
    assert!(v["tau0_self_convergence"].as_f64().unwrap() <= 1e-6);
}

#[test]
fn tightened_tolerance_fails_cleanly() {
    let opts = AcceptanceOptions { tolerance_scale: 1e-30, ..AcceptanceOptions::default() };
    let c = run_one(2, &opts);
    assert_eq!(c.status, Status::Fail);
    assert!(c.line().contains("FAIL"));
}

#[test]
fn disabled_oracle_is_skipped() {
    let opts = AcceptanceOptions { oracle: false, ..AcceptanceOptions::default() };
    let c = run_one(7, &opts);
    assert_eq!(c.status, Status::Skipped);
    let cfg = RunConfig::from_json(r#"{"oracle":{"enabled":false}}"#).unwrap();
    assert!(commands::oracle(&cfg).is_err());
}

#[test]
fn missing_config_file_is_an_error() {
    let o = dtn().args(["sweep", "--config", "/nonexistent/c.json"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}
