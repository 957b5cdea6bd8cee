use std::path::Path;
use std::process::{Command, Output};

use nematic_core::diagnostics::DiagnosticsRecord;

fn nematic(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nematic"))
        .args(args)
        .current_dir(dir)
        .env("NEMATIC_OUTPUT_ROOT", dir)
        .output()
        .unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("config.json");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn records(path: &Path) -> Vec<DiagnosticsRecord> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

#[test]
fn rest_run_exits_cleanly_with_constant_energy() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"grid": {"n": 8}, "stepping": {"dt": 1e-3, "t_end": 0.01}}"#,
    );
    let out = nematic(dir.path(), &["run", "--config", &cfg]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let recs = records(&dir.path().join("diagnostics.jsonl"));
    assert_eq!(recs.len(), 11);
    for r in &recs {
        assert!((r.total_energy - recs[0].total_energy).abs() <= 1e-12);
        assert!(r.d_ok && r.theta_ok && r.div_ok);
    }
    assert!(dir
        .path()
        .join("snapshots")
        .join("snapshot_00000010.bin")
        .exists());
}

#[test]
fn bad_grid_exits_with_config_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"grid": {"n": 7}}"#);
    let out = nematic(dir.path(), &["validate-config", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("grid.n must be even and ≥ 8"));
    let out = nematic(dir.path(), &["run", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn validate_config_prints_the_filled_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "{}");
    let out = nematic(
        dir.path(),
        &[
            "validate-config",
            "--config",
            &cfg,
            "--override",
            "grid.n=12",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["grid"]["n"], 12);
}

#[test]
fn absurd_step_with_a_small_iteration_budget_is_a_picard_failure() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"initial_data": {"preset": "shear-twist"}, "stepping": {"dt": 10, "t_end": 10, "picard_max": 4}}"#,
    );
    let out = nematic(dir.path(), &["run", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(10));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["kind"], "picard_failure");
    assert_eq!(err["step"], 1);
    assert_eq!(err["residual_history"].as_array().unwrap().len(), 4);
}

#[test]
fn absurd_step_breaks_the_director_bound_before_the_iteration_diverges() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"initial_data": {"preset": "shear-twist"}, "stepping": {"dt": 10, "t_end": 300}}"#,
    );
    let out = nematic(dir.path(), &["run", "--config", &cfg]);
    assert_eq!(
        out.status.code(),
        Some(11),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    // the diagnostics stream stays parseable up to the failing step
    let recs = records(&dir.path().join("diagnostics.jsonl"));
    assert!(!recs.last().unwrap().d_ok);
}

#[test]
fn resumed_run_reproduces_the_diagnostics_bitwise() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"{"grid": {"n": 16}, "initial_data": {"preset": "random-smooth", "amplitude": 0.5},
        "stepping": {"dt": 1e-3, "t_end": 0.01}, "output": {"snapshot_every": 5}}"#;
    let cfg = write_config(dir.path(), text);
    assert_eq!(
        nematic(dir.path(), &["run", "--config", &cfg])
            .status
            .code(),
        Some(0)
    );
    let full = std::fs::read_to_string(dir.path().join("diagnostics.jsonl")).unwrap();

    let other = tempfile::tempdir().unwrap();
    let cfg2 = write_config(other.path(), text);
    let snap = dir.path().join("snapshots").join("snapshot_00000005.bin");
    let out = nematic(
        other.path(),
        &[
            "resume",
            "--config",
            &cfg2,
            "--snapshot",
            snap.to_str().unwrap(),
        ],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let resumed = std::fs::read_to_string(other.path().join("diagnostics.jsonl")).unwrap();
    let tail: Vec<&str> = full.lines().skip(6).collect();
    assert_eq!(resumed.lines().collect::<Vec<_>>(), tail);
    assert_eq!(
        std::fs::read(dir.path().join("snapshots/snapshot_00000010.bin")).unwrap(),
        std::fs::read(other.path().join("snapshots/snapshot_00000010.bin")).unwrap()
    );

    // resuming in place trims the stream and continues it
    let out = nematic(
        dir.path(),
        &[
            "resume",
            "--config",
            &cfg,
            "--snapshot",
            snap.to_str().unwrap(),
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        std::fs::read_to_string(dir.path().join("diagnostics.jsonl")).unwrap(),
        full
    );
}

#[test]
fn inspect_snapshot_reports_the_header() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"grid": {"n": 8}, "stepping": {"t_end": 0.001}}"#,
    );
    assert_eq!(
        nematic(dir.path(), &["run", "--config", &cfg])
            .status
            .code(),
        Some(0)
    );
    let snap = dir.path().join("snapshots/snapshot_00000001.bin");
    let out = nematic(dir.path(), &["inspect-snapshot", snap.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["header"]["n"], 8);
    assert_eq!(v["components"].as_array().unwrap().len(), 8);
    assert_eq!(v["components"][3]["min"], 1.0);
}

#[test]
fn refinement_experiment_runs_from_the_command_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"grid": {"n": 12}, "initial_data": {"preset": "random-smooth", "amplitude": 0.5}, "stepping": {"t_end": 0.002}}"#,
    );
    let out = nematic(
        dir.path(),
        &[
            "experiment",
            "refinement",
            "--config",
            &cfg,
            "--cutoffs",
            "2,3,5",
            "--report",
            "refine.json",
        ],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("refine.json")).unwrap())
            .unwrap();
    assert_eq!(v["differences"].as_array().unwrap().len(), 2);
}

#[test]
fn uniqueness_experiment_runs_from_the_command_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"grid": {"n": 8}, "initial_data": {"preset": "random-smooth", "amplitude": 0.5}, "stepping": {"t_end": 0.003}}"#,
    );
    let out = nematic(
        dir.path(),
        &[
            "experiment",
            "uniqueness",
            "--config",
            &cfg,
            "--delta",
            "1e-5",
        ],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["scaling_ok"], true);
}
