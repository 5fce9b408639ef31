use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const FIG1: &str = r#"{
    "omega_a": 1.0, "omega_b": 1.0, "g": 0.16, "drive_amplitude": 0.02,
    "drive_frequency": 0.84, "gamma_a": 0.05, "lamb_shift": 0.0, "n_thermal": 0.0,
    "t_final": 10.0, "dt": 0.05, "engine": "meanfield",
    "fock_cutoff_a": 6, "fock_cutoff_b": 6
}"#;

fn qbattery(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qbattery")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("run.json");
    std::fs::write(&path, body).unwrap();
    path
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn simulate_writes_meanfield_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), FIG1);
    let csv = dir.path().join("out.csv");
    let out = qbattery(&["simulate", "--config", cfg.to_str().unwrap(), "--out", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,re_a,im_a,re_b,im_b,w_a,w_b"));
    assert_eq!(lines.count(), 201);
    assert!(text.lines().skip(1).all(|l| !l.contains(['e', 'E'])), "decimal notation only");
}

#[test]
fn liouville_engine_adds_diagnostic_columns() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &FIG1.replace("\"t_final\": 10.0", "\"t_final\": 1.0"));
    let out = qbattery(&["simulate", "--config", cfg.to_str().unwrap(), "--engine", "liouville"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("t,re_a,im_a,re_b,im_b,w_a,w_b,trace_err,trunc_tail\n"));
    assert_eq!(text.lines().count(), 22);
}

#[test]
fn eigen_prints_supermodes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), FIG1);
    let out = qbattery(&["eigen", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!((v["lambda_plus"].as_f64().unwrap() - 1.16).abs() < 1e-12);
    assert!((v["lambda_minus"].as_f64().unwrap() - 0.84).abs() < 1e-12);
    assert!((v["sin_alpha"].as_f64().unwrap() + std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    for key in ["cos_alpha", "drive_plus", "drive_minus"] {
        assert!(v[key].is_number(), "{key}");
    }
}

#[test]
fn eigen_rejects_decoupled_system() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &FIG1.replace("\"g\": 0.16", "\"g\": 0.0"));
    let out = qbattery(&["eigen", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("decoupled"));
}

#[test]
fn oracle_check_reports_small_deviation() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &FIG1.replace("\"dt\": 0.05", "\"dt\": 0.01"));
    let out = qbattery(&["oracle-check", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(v["max_moment_deviation"].as_f64().unwrap() < 1e-6);
}

#[test]
fn sweep_both_branches_on_custom_grid() {
    let out = qbattery(&["sweep", "--preset", "fig1_weak_resonant", "--lamb-grid", "-0.1,0,0.1", "--dt", "0.05"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[0], "delta_l,branch,omega_f_used,w_a_final,w_b_final,w_a_peak,w_b_peak,t_settle");
    assert_eq!(lines.len(), 7);
    assert!(lines[1].starts_with("-0.100000000000,minus,"));
    assert!(lines[6].starts_with("0.100000000000,plus,"));
}

#[test]
fn sweep_is_reproducible_and_honours_branch() {
    let dir = tempfile::tempdir().unwrap();
    let paths = [dir.path().join("a.json"), dir.path().join("b.json")];
    for p in &paths {
        let out = qbattery(&[
            "sweep", "--preset", "fig2_strong_resonant", "--branch", "plus", "--fixed-drive",
            "--format", "json", "--out", p.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    let (a, b) = (std::fs::read(&paths[0]).unwrap(), std::fs::read(&paths[1]).unwrap());
    assert_eq!(a, b);
    let rows: serde_json::Value = serde_json::from_slice(&a).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|r| r["branch"] == "plus" && r["omega_f_used"] == rows[0]["omega_f_used"]));
}

#[test]
fn validation_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    for body in [
        FIG1.replace("\"gamma_a\": 0.05", "\"gamma_a\": -0.05"),
        FIG1.replace("\"n_thermal\"", "\"n_thermel\""),
        FIG1.replace("\"lamb_shift\": 0.0", "\"lamb_shift\": -1.2"),
        FIG1.replace("\"engine\": \"meanfield\"", "\"engine\": \"exact\""),
    ] {
        let cfg = write_config(dir.path(), &body);
        let out = qbattery(&["simulate", "--config", cfg.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(1), "{body}");
    }
    assert_eq!(qbattery(&["sweep", "--preset", "fig4"]).status.code(), Some(1));
    assert_eq!(qbattery(&["simulate", "--config", "/nonexistent/run.json"]).status.code(), Some(1));
    assert_eq!(qbattery(&["frobnicate"]).status.code(), Some(1));
}

#[test]
fn unstable_oracle_step_exits_with_two() {
    // a strong drive in a deep Fock space pushes RK4 past its stability limit
    let dir = tempfile::tempdir().unwrap();
    let body = FIG1
        .replace("\"drive_amplitude\": 0.02", "\"drive_amplitude\": 5.0")
        .replace("\"dt\": 0.05", "\"dt\": 0.08")
        .replace("\"fock_cutoff_a\": 6, \"fock_cutoff_b\": 6", "\"fock_cutoff_a\": 40, \"fock_cutoff_b\": 1");
    let cfg = write_config(dir.path(), &body);
    let out = qbattery(&["simulate", "--config", cfg.to_str().unwrap(), "--engine", "liouville"]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("increase cutoff or decrease dt"));
}
