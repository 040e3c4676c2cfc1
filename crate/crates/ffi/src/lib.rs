//! C ABI for the `cran-pool` optimizer.
//!
//! Objects are opaque handles created by `*_new`/`*_from_*`/`*_generate`
//! functions and released with the matching `*_free`. Every fallible call
//! returns a [`CranPoolStatus`]; on failure a message is available from
//! [`cran_pool_last_error`] on the same thread until the next failing call.
//! Panics never cross the boundary: they are reported as
//! `CRAN_POOL_STATUS_PANIC`.
//!
//! The generated header is `include/cran_pool.h`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::fs::File;
use std::io::BufWriter;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use cran_pool::harness::{run_to_file, ExperimentConfig};
use cran_pool::metrics::{constraint_report, secrecy_sum_rate};
use cran_pool::model::Instance;
use cran_pool::optimizer::{optimize, OptimizerConfig, Outcome, Scheme};
use cran_pool::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CranPoolStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidConfig = 3,
    InvalidArgument = 4,
    Infeasible = 5,
    Numerical = 6,
    Io = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CranPoolScheme {
    OptimizedPooling = 0,
    NoPooling = 1,
    EqualThirds = 2,
    OrthogonalOptimized = 3,
}

fn scheme_from_raw(raw: u32) -> Result<Scheme, Failure> {
    Ok(match raw {
        x if x == CranPoolScheme::OptimizedPooling as u32 => Scheme::OptimizedPooling,
        x if x == CranPoolScheme::NoPooling as u32 => Scheme::NoPooling,
        x if x == CranPoolScheme::EqualThirds as u32 => Scheme::EqualThirds,
        x if x == CranPoolScheme::OrthogonalOptimized as u32 => Scheme::OrthogonalOptimized,
        _ => return Err(Failure(CranPoolStatus::InvalidArgument, format!("unknown scheme {raw}"))),
    })
}

/// Headline numbers of one optimization run.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CranPoolSummary {
    pub sum_rate_bps: f64,
    pub secrecy_sum_rate_bps: f64,
    pub w_p1_hz: f64,
    pub w_p2_hz: f64,
    pub w_s_hz: f64,
    /// Largest relative violation of any constraint.
    pub max_violation: f64,
    pub iterations: usize,
    /// 1 if the stopping rule fired before the iteration budget ran out.
    pub converged: i32,
}

/// Scenario plus optimizer settings parsed from a config file.
pub struct CranPoolScenario {
    config: ExperimentConfig,
}

/// One channel realization of a scenario.
pub struct CranPoolInstance {
    instance: Instance,
    optimizer: OptimizerConfig,
}

/// Outcome of one optimization run.
pub struct CranPoolResult {
    outcome: Outcome,
    summary: CranPoolSummary,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

struct Failure(CranPoolStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Config(_) | Error::InvalidScenario(_) => CranPoolStatus::InvalidConfig,
            Error::InvalidDesign(_) | Error::Dump(_) => CranPoolStatus::InvalidArgument,
            Error::InfeasibleScenario(_) => CranPoolStatus::Infeasible,
            Error::AnchorViolation { .. } | Error::Numerical(_) | Error::InsufficientSamples(_) => {
                CranPoolStatus::Numerical
            }
            Error::Io(_) | Error::Csv(_) => CranPoolStatus::Io,
        };
        Failure(status, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> CranPoolStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CranPoolStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            CranPoolStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(CranPoolStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|e| Failure(CranPoolStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write_out<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Message of the last failed call on this thread, or null if none failed.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cran_pool_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cran_pool_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses a TOML config (same keys as the `cran-pool` CLI) into a scenario.
///
/// # Safety
/// `config_toml` must be null or a NUL-terminated string; `out` must be null
/// or valid for writing a pointer.
#[no_mangle]
pub unsafe extern "C" fn cran_pool_scenario_from_config(
    config_toml: *const c_char,
    out: *mut *mut CranPoolScenario,
) -> CranPoolStatus {
    guard(|| {
        let text = str_arg(config_toml, "config_toml")?;
        let config = ExperimentConfig::parse(text)?;
        write_out(out, CranPoolScenario { config })
    })
}

/// # Safety
/// `scenario` must be null or a pointer returned by
/// `cran_pool_scenario_from_config` that was not freed yet.
#[no_mangle]
pub unsafe extern "C" fn cran_pool_scenario_free(scenario: *mut CranPoolScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Draws placement and channels for `seed`.
///
/// # Safety
/// `scenario` must be null or a live scenario handle; `out` must be null or
/// valid for writing a pointer.
#[no_mangle]
pub unsafe extern "C" fn cran_pool_instance_generate(
    scenario: *const CranPoolScenario,
    seed: u64,
    out: *mut *mut CranPoolInstance,
) -> CranPoolStatus {
    guard(|| {
        let sc = ref_arg(scenario, "scenario")?;
        let instance = Instance::generate(sc.config.scenario.clone(), seed)?;
        write_out(out, CranPoolInstance { instance, optimizer: sc.config.optimizer.clone() })
    })
}

/// # Safety
/// `instance` must be null or a live instance handle.
#[no_mangle]
pub unsafe extern "C" fn cran_pool_instance_free(instance: *mut CranPoolInstance) {
    if !instance.is_null() {
        drop(Box::from_raw(instance));
    }
}

/// Runs the optimizer on `instance`. `scheme` is one of the
/// `CRAN_POOL_SCHEME_*` values.
///
/// # Safety
/// `instance` must be null or a live instance handle; `out` must be null or
/// valid for writing a pointer.
#[no_mangle]
pub unsafe extern "C" fn cran_pool_optimize(
    instance: *const CranPoolInstance,
    scheme: u32,
    out: *mut *mut CranPoolResult,
) -> CranPoolStatus {
    guard(|| {
        let inst = ref_arg(instance, "instance")?;
        let config = OptimizerConfig { scheme: scheme_from_raw(scheme)?, ..inst.optimizer.clone() };
        let outcome = optimize(&inst.instance, &config)?;
        let d = &outcome.design;
        let sc = &inst.instance.scenario;
        let summary = CranPoolSummary {
            sum_rate_bps: d.sum_rate(),
            secrecy_sum_rate_bps: secrecy_sum_rate(d, sc),
            w_p1_hz: d.bands.w_private[0],
            w_p2_hz: d.bands.w_private[1],
            w_s_hz: d.bands.w_shared,
            max_violation: constraint_report(&inst.instance, d)?.max_relative_violation(sc),
            iterations: outcome.iterations,
            converged: outcome.converged as i32,
        };
        write_out(out, CranPoolResult { outcome, summary })
    })
}

/// Copies the headline numbers of `result` into `out`.
///
/// # Safety
/// `result` must be null or a live result handle; `out` must be null or
/// valid for writing a `CranPoolSummary`.
#[no_mangle]
pub unsafe extern "C" fn cran_pool_result_summary(
    result: *const CranPoolResult,
    out: *mut CranPoolSummary,
) -> CranPoolStatus {
    guard(|| {
        let r = ref_arg(result, "result")?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = r.summary;
        Ok(())
    })
}

/// Writes the per-iteration trace as CSV (`iter,sum_rate_bps,max_violation,ms`).
///
/// # Safety
/// `result` must be null or a live result handle; `path` must be null or a
/// NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn cran_pool_result_write_trace(
    result: *const CranPoolResult,
    path: *const c_char,
) -> CranPoolStatus {
    guard(|| {
        let r = ref_arg(result, "result")?;
        let path = str_arg(path, "path")?;
        let file = File::create(path).map_err(|e| Failure(CranPoolStatus::Io, format!("{path}: {e}")))?;
        r.outcome.trace.write_csv(BufWriter::new(file))?;
        Ok(())
    })
}

/// # Safety
/// `result` must be null or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn cran_pool_result_free(result: *mut CranPoolResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// Runs the whole experiment described by `config_toml` (which must set
/// `sweep_axis` and `sweep_values`) and writes the CSV to `out_path`.
///
/// # Safety
/// Both arguments must be null or NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn cran_pool_run_experiment(
    config_toml: *const c_char,
    out_path: *const c_char,
) -> CranPoolStatus {
    guard(|| {
        let text = str_arg(config_toml, "config_toml")?;
        let path = str_arg(out_path, "out_path")?;
        let spec = ExperimentConfig::parse(text)?.spec(None)?;
        run_to_file(&spec, Path::new(path))?;
        Ok(())
    })
}
