use std::ffi::{c_char, CStr, CString};
use std::ptr;

use nematic_ffi::*;

fn error_message() -> String {
    let mut buf = vec![0 as c_char; 512];
    let len = unsafe { nematic_last_error_message(buf.as_mut_ptr(), buf.len()) };
    let text = unsafe { CStr::from_ptr(buf.as_ptr()) }
        .to_str()
        .unwrap()
        .to_string();
    assert!(len >= text.len());
    text
}

fn create(json: &str) -> Result<*mut NematicSim, NematicStatus> {
    let json = CString::new(json).unwrap();
    let mut sim = ptr::null_mut();
    match unsafe { nematic_sim_new_from_config_json(json.as_ptr(), &mut sim) } {
        NematicStatus::Ok => Ok(sim),
        other => {
            assert!(sim.is_null());
            Err(other)
        }
    }
}

#[test]
fn rest_simulation_steps_and_reports() {
    let sim = create(r#"{"grid": {"n": 8}}"#).unwrap();
    unsafe {
        assert_eq!(nematic_sim_step(sim, 3), NematicStatus::Ok);
        let mut t = 0.0;
        assert_eq!(nematic_sim_time(sim, &mut t), NematicStatus::Ok);
        assert!((t - 3e-3).abs() < 1e-15);
        let mut n = 0usize;
        assert_eq!(nematic_sim_grid_n(sim, &mut n), NematicStatus::Ok);
        assert_eq!(n, 8);

        let mut json = ptr::null_mut();
        assert_eq!(
            nematic_sim_diagnostics_json(sim, &mut json),
            NematicStatus::Ok
        );
        let v: serde_json::Value =
            serde_json::from_str(CStr::from_ptr(json).to_str().unwrap()).unwrap();
        nematic_string_free(json);
        assert_eq!(v["step"], 3);
        assert_eq!(v["d_ok"], true);

        let mut theta = vec![0.0; 512];
        assert_eq!(
            nematic_sim_copy_field(sim, 3, theta.as_mut_ptr(), theta.len()),
            NematicStatus::Ok
        );
        assert!(theta.iter().all(|&x| x == 1.0));
        let mut small = vec![0.0; 10];
        assert_eq!(
            nematic_sim_copy_field(sim, 0, small.as_mut_ptr(), small.len()),
            NematicStatus::BufferTooSmall
        );
        assert_eq!(
            nematic_sim_copy_field(sim, 8, theta.as_mut_ptr(), theta.len()),
            NematicStatus::InvalidArgument
        );
        nematic_sim_free(sim);
    }
}

#[test]
fn bad_config_is_a_config_error_with_message() {
    assert_eq!(
        create(r#"{"grid": {"n": 7}}"#).unwrap_err(),
        NematicStatus::Config
    );
    assert!(error_message().contains("grid.n must be even and ≥ 8"));
    assert_eq!(create("not json").unwrap_err(), NematicStatus::Config);
}

#[test]
fn null_and_invalid_arguments_are_reported() {
    unsafe {
        let mut sim = ptr::null_mut();
        assert_eq!(
            nematic_sim_new_from_config_json(ptr::null(), &mut sim),
            NematicStatus::NullPointer
        );
        let bad = [0xffu8 as c_char, 0];
        assert_eq!(
            nematic_sim_new_from_config_json(bad.as_ptr(), &mut sim),
            NematicStatus::InvalidUtf8
        );
        assert_eq!(
            nematic_sim_step(ptr::null_mut(), 1),
            NematicStatus::NullPointer
        );
        let mut t = 0.0;
        assert_eq!(
            nematic_sim_time(ptr::null(), &mut t),
            NematicStatus::NullPointer
        );
        nematic_sim_free(ptr::null_mut());
        nematic_string_free(ptr::null_mut());
    }
}

#[test]
fn picard_failure_maps_to_its_code() {
    let sim = create(
        r#"{"initial_data": {"preset": "shear-twist"}, "stepping": {"dt": 10, "picard_max": 4}}"#,
    )
    .unwrap();
    unsafe {
        assert_eq!(nematic_sim_step(sim, 1), NematicStatus::PicardFailure);
        let msg: serde_json::Value = serde_json::from_str(&error_message()).unwrap();
        assert_eq!(msg["residual_history"].as_array().unwrap().len(), 4);
        let mut t = 1.0;
        nematic_sim_time(sim, &mut t);
        assert_eq!(t, 0.0);
        nematic_sim_free(sim);
    }
}

#[test]
fn snapshot_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.bin");
    let sim = create(r#"{"grid": {"n": 8}}"#).unwrap();
    let c = CString::new(path.to_str().unwrap()).unwrap();
    unsafe {
        assert_eq!(
            nematic_sim_write_snapshot(sim, c.as_ptr()),
            NematicStatus::Ok
        );
        nematic_sim_free(sim);
    }
    let bytes = std::fs::read(&path).unwrap();
    let header_end = bytes.iter().position(|&b| b == b'\n').unwrap();
    assert_eq!(bytes.len() - header_end - 1, 8 * 512 * 8);
}

#[test]
fn ginzburg_landau_matches_the_closed_form() {
    let d = [0.6, 0.8, 0.5];
    let (mut w, mut f) = (0.0, [0.0; 3]);
    unsafe {
        assert_eq!(
            nematic_ginzburg_landau(d.as_ptr(), &mut w, f.as_mut_ptr()),
            NematicStatus::Ok
        );
    }
    assert!((w - 0.0625).abs() < 1e-15);
    for i in 0..3 {
        assert!((f[i] - 0.25 * d[i]).abs() < 1e-15);
    }
}

#[test]
fn blowup_monitor_recovers_the_rate() {
    let (f0, c) = (2.0f64, 0.01);
    let times: Vec<f64> = (0..20).map(|i| i as f64 * 0.1).collect();
    let values: Vec<f64> = times
        .iter()
        .map(|t| (f0.powi(-3) - 3.0 * c * t).powf(-1.0 / 3.0))
        .collect();
    let (mut c_fit, mut t_star) = (0.0, 0.0);
    unsafe {
        let status = nematic_blowup_monitor(
            times.as_ptr(),
            values.as_ptr(),
            times.len(),
            &mut c_fit,
            &mut t_star,
        );
        assert_eq!(status, NematicStatus::Ok);
        assert_eq!(
            nematic_blowup_monitor(times.as_ptr(), values.as_ptr(), 3, &mut c_fit, &mut t_star),
            NematicStatus::InvalidArgument
        );
    }
    assert!((c_fit - c).abs() < 1e-3 * c);
}

#[test]
fn header_compiles_as_c() {
    let Ok(cc) = which_cc() else { return };
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        r#"#include "nematic.h"
int main(void) {
    NematicSim *sim = 0;
    NematicStatus s = nematic_sim_new_from_config_json("{}", &sim);
    double t; size_t n; char *json; char buf[8]; double d[3] = {1, 0, 0}, w, f[3], c, ts;
    s = nematic_sim_step(sim, 1);
    s = nematic_sim_time(sim, &t);
    s = nematic_sim_grid_n(sim, &n);
    s = nematic_sim_diagnostics_json(sim, &json);
    nematic_string_free(json);
    s = nematic_sim_write_snapshot(sim, "x.bin");
    s = nematic_sim_copy_field(sim, 0, &t, 1);
    s = nematic_ginzburg_landau(d, &w, f);
    s = nematic_blowup_monitor(d, d, 3, &c, &ts);
    nematic_last_error_message(buf, sizeof buf);
    nematic_sim_free(sim);
    return s == NEMATIC_STATUS_OK ? 0 : 1;
}
"#,
    )
    .unwrap();
    let include = concat!(env!("CARGO_MANIFEST_DIR"), "/include");
    let status = std::process::Command::new(cc)
        .args([
            "-std=c99",
            "-Wall",
            "-Werror",
            "-fsyntax-only",
            "-I",
            include,
        ])
        .arg(&src)
        .status()
        .unwrap();
    assert!(status.success());
}

fn which_cc() -> Result<&'static str, ()> {
    for cc in ["cc", "gcc", "clang"] {
        if std::process::Command::new(cc)
            .arg("--version")
            .output()
            .is_ok()
        {
            return Ok(cc);
        }
    }
    Err(())
}
