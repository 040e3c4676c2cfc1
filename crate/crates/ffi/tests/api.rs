use std::ffi::{CStr, CString};
use std::ptr;

use cran_pool_ffi::*;

const CONFIG: &str = "n_rus = 2\nn_ues = 2\nsubset_size = 2\nbackhaul_capacity = 1e9\nmax_outer_iters = 10\n";

fn last_error() -> String {
    let p = cran_pool_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn scenario(text: &str) -> *mut CranPoolScenario {
    let text = CString::new(text).unwrap();
    let mut sc = ptr::null_mut();
    assert_eq!(unsafe { cran_pool_scenario_from_config(text.as_ptr(), &mut sc) }, CranPoolStatus::Ok);
    sc
}

#[test]
fn optimize_through_handles() {
    let sc = scenario(CONFIG);
    let mut inst = ptr::null_mut();
    assert_eq!(unsafe { cran_pool_instance_generate(sc, 4, &mut inst) }, CranPoolStatus::Ok);
    let mut rates = Vec::new();
    for scheme in [CranPoolScheme::OptimizedPooling, CranPoolScheme::NoPooling] {
        let mut res = ptr::null_mut();
        assert_eq!(unsafe { cran_pool_optimize(inst, scheme as u32, &mut res) }, CranPoolStatus::Ok);
        let mut s = CranPoolSummary::default();
        assert_eq!(unsafe { cran_pool_result_summary(res, &mut s) }, CranPoolStatus::Ok);
        assert!(s.sum_rate_bps > 0.0 && s.max_violation <= 1e-6);
        assert!((s.w_p1_hz + s.w_p2_hz + s.w_s_hz - 1e8).abs() < 1.0);
        assert!(s.iterations >= 1 && s.iterations <= 10);
        rates.push(s.sum_rate_bps);

        let dir = tempfile::tempdir().unwrap();
        let path = CString::new(dir.path().join("trace.csv").to_str().unwrap()).unwrap();
        assert_eq!(unsafe { cran_pool_result_write_trace(res, path.as_ptr()) }, CranPoolStatus::Ok);
        let text = std::fs::read_to_string(dir.path().join("trace.csv")).unwrap();
        assert!(text.starts_with("iter,sum_rate_bps,max_violation,ms\n"));
        unsafe { cran_pool_result_free(res) };
    }
    assert!(rates[0] >= rates[1] * (1.0 - 1e-6));
    unsafe {
        cran_pool_instance_free(inst);
        cran_pool_scenario_free(sc);
    }
}

#[test]
fn errors_are_reported_with_messages() {
    let mut sc = ptr::null_mut();
    assert_eq!(unsafe { cran_pool_scenario_from_config(ptr::null(), &mut sc) }, CranPoolStatus::NullPointer);
    assert!(last_error().contains("config_toml"));

    let bad = CString::new("n_routers = 1").unwrap();
    assert_eq!(unsafe { cran_pool_scenario_from_config(bad.as_ptr(), &mut sc) }, CranPoolStatus::InvalidConfig);
    assert!(last_error().contains("n_routers"));
    assert!(sc.is_null());

    let invalid = [0xffu8, 0xfe, 0];
    assert_eq!(
        unsafe { cran_pool_scenario_from_config(invalid.as_ptr().cast(), &mut sc) },
        CranPoolStatus::InvalidUtf8
    );

    let sc = scenario(CONFIG);
    let mut inst = ptr::null_mut();
    assert_eq!(unsafe { cran_pool_instance_generate(sc, 1, &mut inst) }, CranPoolStatus::Ok);
    let mut res = ptr::null_mut();
    assert_eq!(unsafe { cran_pool_optimize(inst, 17, &mut res) }, CranPoolStatus::InvalidArgument);
    assert_eq!(unsafe { cran_pool_optimize(ptr::null(), 0, &mut res) }, CranPoolStatus::NullPointer);
    assert_eq!(unsafe { cran_pool_optimize(inst, 0, ptr::null_mut()) }, CranPoolStatus::NullPointer);
    assert_eq!(unsafe { cran_pool_result_summary(ptr::null(), ptr::null_mut()) }, CranPoolStatus::NullPointer);
    unsafe {
        cran_pool_instance_free(inst);
        cran_pool_scenario_free(sc);
        // null frees are no-ops
        cran_pool_instance_free(ptr::null_mut());
        cran_pool_scenario_free(ptr::null_mut());
        cran_pool_result_free(ptr::null_mut());
    }
}

#[test]
fn infeasible_scenario_status() {
    let sc = scenario("n_rus = 1\nn_ues = 1\nsubset_size = 1\nprivacy_threshold = 1e-300\ninit_max_halvings = 2\n");
    let mut inst = ptr::null_mut();
    assert_eq!(unsafe { cran_pool_instance_generate(sc, 1, &mut inst) }, CranPoolStatus::Ok);
    let mut res = ptr::null_mut();
    assert_eq!(
        unsafe { cran_pool_optimize(inst, CranPoolScheme::OptimizedPooling as u32, &mut res) },
        CranPoolStatus::Infeasible
    );
    assert!(last_error().contains("infeasible"));
    unsafe {
        cran_pool_instance_free(inst);
        cran_pool_scenario_free(sc);
    }
}

#[test]
fn run_experiment_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("exp.csv");
    let cfg = CString::new(format!("{CONFIG}trials = 2\nsweep_axis = \"snr_db\"\nsweep_values = [0, 10]\n")).unwrap();
    let path = CString::new(out.to_str().unwrap()).unwrap();
    assert_eq!(unsafe { cran_pool_run_experiment(cfg.as_ptr(), path.as_ptr()) }, CranPoolStatus::Ok);
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 1 + 2 * 2);

    let no_sweep = CString::new(CONFIG).unwrap();
    assert_eq!(unsafe { cran_pool_run_experiment(no_sweep.as_ptr(), path.as_ptr()) }, CranPoolStatus::InvalidConfig);
}

#[test]
fn version_is_a_c_string() {
    let v = unsafe { CStr::from_ptr(cran_pool_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
