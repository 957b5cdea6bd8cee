//! C interface to the nematic solver.
//!
//! Every function returns a [`NematicStatus`]; on failure a description is
//! kept per thread and can be fetched with [`nematic_last_error_message`].
//! Simulations are opaque [`NematicSim`] handles released with
//! [`nematic_sim_free`]; strings handed out are released with
//! [`nematic_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use nematic_core::coefficients::ginzburg_landau;
use nematic_core::diagnostics::{blowup_monitor, DiagnosticsError};
use nematic_core::io::{parse_config, save_snapshot, RunError, Simulation};
use nematic_core::stepper::STATE_COMPONENTS;

/// Status codes. The failure codes of a run match the command-line exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NematicStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Config = 3,
    Io = 4,
    Panic = 5,
    BufferTooSmall = 6,
    InvalidArgument = 7,
    PicardFailure = 10,
    Principle = 11,
    NonFinite = 12,
}

/// Opaque simulation handle.
pub struct NematicSim {
    sim: Simulation,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn fail(status: NematicStatus, message: impl Into<String>) -> NematicStatus {
    set_error(message);
    status
}

fn run_error(e: RunError) -> NematicStatus {
    let status = match &e {
        RunError::Config(_) => NematicStatus::Config,
        RunError::Picard { .. } => NematicStatus::PicardFailure,
        RunError::Principle { .. } => NematicStatus::Principle,
        RunError::NonFinite { .. } => NematicStatus::NonFinite,
        _ => NematicStatus::Io,
    };
    fail(status, e.to_json().to_string())
}

fn guard(f: impl FnOnce() -> NematicStatus) -> NematicStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(NematicStatus::Panic, format!("panic: {msg}"))
        }
    }
}

unsafe fn text<'a>(ptr: *const c_char) -> Result<&'a str, NematicStatus> {
    if ptr.is_null() {
        return Err(fail(NematicStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| fail(NematicStatus::InvalidUtf8, "string is not UTF-8"))
}

unsafe fn handle<'a>(sim: *const NematicSim) -> Result<&'a NematicSim, NematicStatus> {
    sim.as_ref()
        .ok_or_else(|| fail(NematicStatus::NullPointer, "null simulation handle"))
}

macro_rules! tri {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(status) => return status,
        }
    };
}

/// Create a simulation from a JSON run configuration.
///
/// # Safety
/// `config_json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nematic_sim_new_from_config_json(
    config_json: *const c_char,
    out: *mut *mut NematicSim,
) -> NematicStatus {
    guard(|| {
        if out.is_null() {
            return fail(NematicStatus::NullPointer, "null output pointer");
        }
        *out = std::ptr::null_mut();
        let json = tri!(text(config_json));
        let config = match parse_config(json, &[]) {
            Ok(c) => c,
            Err(e) => return run_error(e.into()),
        };
        match Simulation::new(&config) {
            Ok(sim) => {
                *out = Box::into_raw(Box::new(NematicSim { sim }));
                NematicStatus::Ok
            }
            Err(e) => run_error(e),
        }
    })
}

/// Release a simulation. Null is ignored.
///
/// # Safety
/// `sim` must come from [`nematic_sim_new_from_config_json`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn nematic_sim_free(sim: *mut NematicSim) {
    if !sim.is_null() {
        let _ = catch_unwind(AssertUnwindSafe(|| drop(Box::from_raw(sim))));
    }
}

/// Advance `steps` time steps, stopping at the first failure. The handle
/// keeps the last committed state.
///
/// # Safety
/// `sim` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn nematic_sim_step(sim: *mut NematicSim, steps: u64) -> NematicStatus {
    guard(|| {
        let Some(s) = sim.as_mut() else {
            return fail(NematicStatus::NullPointer, "null simulation handle");
        };
        for _ in 0..steps {
            if let Err(e) = s
                .sim
                .advance()
                .map(|_| ())
                .and_then(|_| s.sim.check_principles())
            {
                return run_error(e);
            }
        }
        NematicStatus::Ok
    })
}

/// # Safety
/// `sim` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nematic_sim_time(sim: *const NematicSim, out: *mut f64) -> NematicStatus {
    guard(|| {
        let s = tri!(handle(sim));
        if out.is_null() {
            return fail(NematicStatus::NullPointer, "null output pointer");
        }
        *out = s.sim.state().t();
        NematicStatus::Ok
    })
}

/// Points per axis.
///
/// # Safety
/// `sim` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nematic_sim_grid_n(
    sim: *const NematicSim,
    out: *mut usize,
) -> NematicStatus {
    guard(|| {
        let s = tri!(handle(sim));
        if out.is_null() {
            return fail(NematicStatus::NullPointer, "null output pointer");
        }
        *out = s.sim.state().grid().n();
        NematicStatus::Ok
    })
}

/// Diagnostics record of the current step as a JSON string, to be released
/// with [`nematic_string_free`].
///
/// # Safety
/// `sim` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nematic_sim_diagnostics_json(
    sim: *const NematicSim,
    out: *mut *mut c_char,
) -> NematicStatus {
    guard(|| {
        let s = tri!(handle(sim));
        if out.is_null() {
            return fail(NematicStatus::NullPointer, "null output pointer");
        }
        let json = match serde_json::to_string(s.sim.record()) {
            Ok(j) => j,
            Err(e) => return fail(NematicStatus::Io, e.to_string()),
        };
        *out = CString::new(json).expect("JSON has no NUL").into_raw();
        NematicStatus::Ok
    })
}

/// Release a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn nematic_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Write the current state as a binary snapshot.
///
/// # Safety
/// `sim` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn nematic_sim_write_snapshot(
    sim: *const NematicSim,
    path: *const c_char,
) -> NematicStatus {
    guard(|| {
        let s = tri!(handle(sim));
        let path = tri!(text(path));
        match save_snapshot(s.sim.state(), Path::new(path)) {
            Ok(()) => NematicStatus::Ok,
            Err(e) => run_error(e),
        }
    })
}

/// Copy the nodal values of one component (`u1 u2 u3 theta d1 d2 d3 p`,
/// numbered from 0) into `buf`, which must hold `n^3` values.
///
/// # Safety
/// `sim` must be a live handle and `buf` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn nematic_sim_copy_field(
    sim: *const NematicSim,
    component: usize,
    buf: *mut f64,
    len: usize,
) -> NematicStatus {
    guard(|| {
        let s = tri!(handle(sim));
        if buf.is_null() {
            return fail(NematicStatus::NullPointer, "null buffer");
        }
        if component >= STATE_COMPONENTS.len() {
            return fail(
                NematicStatus::InvalidArgument,
                format!("component {component} out of range"),
            );
        }
        let values = s.sim.state().nodal(component);
        if len < values.len() {
            return fail(
                NematicStatus::BufferTooSmall,
                format!("need {} values, got {len}", values.len()),
            );
        }
        std::ptr::copy_nonoverlapping(values.as_ptr(), buf, values.len());
        NematicStatus::Ok
    })
}

/// Copy the last error message into `buf` (NUL-terminated, truncated to
/// fit). Returns the full message length in bytes without the NUL.
///
/// # Safety
/// `buf` must be valid for `len` writes, or null with `len = 0`.
#[no_mangle]
pub unsafe extern "C" fn nematic_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let bytes = e.as_ref().map_or(&b""[..], |c| c.as_bytes());
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Penalty `W(d) = (|d|^2 - 1)^2` and its half-gradient `(|d|^2 - 1) d`.
///
/// # Safety
/// `d` and `force` must point to three values, `energy` to one.
#[no_mangle]
pub unsafe extern "C" fn nematic_ginzburg_landau(
    d: *const f64,
    energy: *mut f64,
    force: *mut f64,
) -> NematicStatus {
    guard(|| {
        if d.is_null() || energy.is_null() || force.is_null() {
            return fail(NematicStatus::NullPointer, "null argument");
        }
        let v = [*d, *d.add(1), *d.add(2)];
        let gl = ginzburg_landau(v);
        *energy = gl.energy;
        std::ptr::copy_nonoverlapping(gl.force.as_ptr(), force, 3);
        NematicStatus::Ok
    })
}

/// Fit `dF/dt = C F^4` to a sampled series; `t_star` is infinite when no
/// growth is detected.
///
/// # Safety
/// `times` and `values` must hold `len` values; `c_fit` and `t_star` must be valid.
#[no_mangle]
pub unsafe extern "C" fn nematic_blowup_monitor(
    times: *const f64,
    values: *const f64,
    len: usize,
    c_fit: *mut f64,
    t_star: *mut f64,
) -> NematicStatus {
    guard(|| {
        if times.is_null() || values.is_null() || c_fit.is_null() || t_star.is_null() {
            return fail(NematicStatus::NullPointer, "null argument");
        }
        let (t, v) = (
            std::slice::from_raw_parts(times, len),
            std::slice::from_raw_parts(values, len),
        );
        match blowup_monitor(t, v) {
            Ok(est) => {
                *c_fit = est.c_fit;
                *t_star = est.t_star;
                NematicStatus::Ok
            }
            Err(e @ DiagnosticsError::TooFewSamples { .. })
            | Err(e @ DiagnosticsError::BadSeries(_)) => {
                fail(NematicStatus::InvalidArgument, e.to_string())
            }
            Err(e) => fail(NematicStatus::Io, e.to_string()),
        }
    })
}
