use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn matdelay(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_matdelay")).args(args).output().expect("binary runs")
}

fn run_in(dir: &Path, sub: &str, config: &Path, extra: &[&str]) -> Output {
    let mut args = vec![sub, "--config", config.to_str().unwrap(), "--out", dir.to_str().unwrap()];
    args.extend_from_slice(extra);
    matdelay(&args)
}

fn last_row(csv: &str) -> Vec<f64> {
    csv.lines().last().unwrap().split(',').map(|v| v.parse().unwrap()).collect()
}

#[test]
fn simulate_below_threshold_settles_on_capacity() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), "simulate", &fixture("r_below_one.json"), &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    assert!(csv.starts_with("t,x,y,yj,tau,lag_s,correction\n"));
    let row = last_row(&csv);
    assert!((row[0] - 200.0).abs() < 1e-12);
    assert!((row[1] - 2.0).abs() < 1e-6);
    assert!(row[2] < 1e-6 && row[3] < 1e-6);
    let svg = fs::read_to_string(dir.path().join("trajectory.svg")).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 4);
}

#[test]
fn simulate_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        assert!(run_in(d.path(), "simulate", &fixture("r_above_one.json"), &["--horizon", "60"]).status.success());
    }
    let ca = fs::read(a.path().join("trajectory.csv")).unwrap();
    let cb = fs::read(b.path().join("trajectory.csv")).unwrap();
    assert_eq!(ca, cb);
    let row = last_row(&String::from_utf8(ca).unwrap());
    assert_eq!(row[0], 60.0);
}

#[test]
fn stability_of_predator_free_state_below_threshold() {
    let out = matdelay(&["stability", "--config", fixture("r_below_one.json").to_str().unwrap()]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["equilibrium"]["kind"], "predator_extinction");
    assert_eq!(v["verdict"], "locally_asymptotically_stable");
    assert!(v["rightmost"]["re"].as_f64().unwrap() < 0.0);
    for k in ["A", "B", "C", "D", "eta"] {
        assert!(v["coefficients"][k].is_number(), "{k}");
    }
}

#[test]
fn stability_reports_conditions_for_bd_coexistence() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), "stability", &fixture("bd_global.json"), &["--equilibrium", "coexistence"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("stability.json")).unwrap()).unwrap();
    assert_eq!(v["verdict"], "locally_asymptotically_stable");
    assert_eq!(v["conditions"]["thm7"], true);
    assert_eq!(v["conditions"]["thm8"], true);
    assert!(v["conditions"]["margins"]["k2_local"].as_f64().unwrap() > 0.0);
}

#[test]
fn equilibria_report_round_trips() {
    let out = matdelay(&["equilibria", "--config", fixture("bd_global.json").to_str().unwrap()]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let eqs = v["equilibria"].as_array().unwrap();
    assert_eq!(eqs.len(), 3);
    for e in eqs {
        let eq: matdelay_core::Equilibrium = serde_json::from_value(e.clone()).unwrap();
        assert!(eq.residual <= 1e-10);
    }
    assert!(v["R"].as_f64().unwrap() > 1.0);
}

#[test]
fn verify_passes_on_every_fixture() {
    for name in ["r_below_one.json", "r_above_one.json", "bd_global.json"] {
        let dir = tempfile::tempdir().unwrap();
        let out = run_in(dir.path(), "verify", &fixture(name), &[]);
        assert!(out.status.success(), "{name}: {}", String::from_utf8_lossy(&out.stdout));
        let xml = fs::read_to_string(dir.path().join("verify.xml")).unwrap();
        assert!(xml.contains(r#"failures="0""#), "{name}");
        let csv = fs::read_to_string(dir.path().join("verify.csv")).unwrap();
        assert!(csv.starts_with("check,metric,value,threshold,passed\n"));
        assert!(!csv.contains(",false\n"));
    }
}

#[test]
fn sweep_grid_is_complete_and_thread_independent() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert!(run_in(a.path(), "sweep", &fixture("bd_global.json"), &["--threads", "1"]).status.success());
    assert!(run_in(b.path(), "sweep", &fixture("bd_global.json"), &["--threads", "4"]).status.success());
    let ca = fs::read_to_string(a.path().join("sweep.csv")).unwrap();
    assert_eq!(ca, fs::read_to_string(b.path().join("sweep.csv")).unwrap());
    let mut lines = ca.lines();
    assert_eq!(lines.next().unwrap(), "k2,d,tau_m,tau_M,R,coexists,thm7_pass,thm8_pass,rightmost_re");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 4 * 3 * 2);
    // k2 = 10, d = 0.2, tau_m = 0.5 is the pinned scenario
    assert!(rows.iter().any(|r| r.starts_with("10.0,0.2,0.5,1.0,") && r.contains(",true,true,true,")));
}

#[test]
fn unknown_key_exits_2_with_path() {
    let dir = tempfile::tempdir().unwrap();
    let mut v: Value = serde_json::from_str(&fs::read_to_string(fixture("r_below_one.json")).unwrap()).unwrap();
    v["stepper"]["rtoll"] = 1e-6.into();
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, v.to_string()).unwrap();
    let out = matdelay(&["equilibria", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("stepper.rtoll"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(matdelay(&["simulate"]).status.code(), Some(2));
    assert_eq!(matdelay(&["equilibria", "--config", "/nonexistent.json"]).status.code(), Some(2));
    let out = matdelay(&["simulate", "--config", fixture("r_below_one.json").to_str().unwrap(), "--horizon", "-1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn numerical_failure_exits_3_and_keeps_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    let mut v: Value = serde_json::from_str(&fs::read_to_string(fixture("r_below_one.json")).unwrap()).unwrap();
    // prey growth far beyond what the step floor can resolve
    v["spec"]["params"]["r"] = 1e12.into();
    let cfg = dir.path().join("stiff.json");
    fs::write(&cfg, v.to_string()).unwrap();
    let out = run_in(dir.path(), "simulate", &cfg, &[]);
    assert_eq!(out.status.code(), Some(3));
    assert!(dir.path().join("trajectory.csv").exists());
}
