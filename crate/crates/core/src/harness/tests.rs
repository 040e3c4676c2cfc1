use super::*;
use crate::model::Scenario;
use crate::optimizer::{OptimizerConfig, Scheme};

fn tiny_spec(axis: SweepAxis, values: Vec<f64>) -> ExperimentSpec {
    ExperimentSpec {
        scenario: Scenario::secrecy_tradeoff_defaults(0.0, 6e8),
        sweep_axis: axis,
        sweep_values: values,
        schemes: vec![Scheme::OptimizedPooling, Scheme::NoPooling],
        trials: 2,
        base_seed: 7,
        output: None,
        record_timing: false,
        optimizer: OptimizerConfig { max_outer_iters: 5, ..OptimizerConfig::default() },
    }
}

#[test]
fn config_defaults_are_the_backhaul_sweep() {
    let c = ExperimentConfig::parse("").unwrap();
    assert_eq!(c.scenario, Scenario::backhaul_sweep_defaults(1e9, 2));
    assert_eq!(c.trials, DEFAULT_TRIALS);
    assert_eq!(c.schemes, vec![Scheme::OptimizedPooling]);
    assert!(!c.record_timing);
    assert!(c.spec(None).is_err());
}

#[test]
fn config_accepts_scalars_and_per_tenant_arrays() {
    let text = r#"
        n_rus = [2, 3]
        n_ues = 2
        n_antennas = [[1, 2], [2, 2, 1]]
        fronthaul_capacity = [4e8, 6e8]
        backhaul_capacity = 1e9
        snr_db = 10
        subset_size = [1, 2]
        ru_placement = "grid"
        sweep_axis = "privacy_threshold"
        sweep_values = [1e8, 1e9]
        schemes = ["equal-thirds", "orthogonal-optimized"]
        trials = 3
        base_seed = 11
        max_outer_iters = 20
    "#;
    let c = ExperimentConfig::parse(text).unwrap();
    assert_eq!(c.scenario.n_rus, [2, 3]);
    assert_eq!(c.scenario.n_antennas, [vec![1, 2], vec![2, 2, 1]]);
    assert_eq!(c.scenario.fronthaul_capacity, [vec![4e8; 2], vec![6e8; 3]]);
    assert!((c.scenario.p_max - 10.0).abs() < 1e-12);
    assert_eq!(c.optimizer.max_outer_iters, 20);
    let spec = c.spec(None).unwrap();
    assert_eq!(spec.sweep_axis, SweepAxis::PrivacyThreshold);
    assert_eq!(spec.schemes, vec![Scheme::EqualThirds, Scheme::OrthogonalOptimized]);
}

#[test]
fn config_rejects_bad_input() {
    for text in [
        "unknown_key = 1",
        "p_max = 1\nsnr_db = 0",
        "n_rus = 2\nn_antennas = [[1], [1, 1]]",
        "schemes = [\"best\"]",
        "sweep_axis = \"n_rus\"",
        "rel_obj_tol = 0",
    ] {
        assert!(ExperimentConfig::parse(text).is_err(), "{text}");
    }
    let c = ExperimentConfig::parse("trials = 0\nsweep_axis = \"snr_db\"\nsweep_values = [0]").unwrap();
    assert!(c.spec(None).is_err());
    let c = ExperimentConfig::parse("sweep_axis = \"subset_size\"\nsweep_values = [5]").unwrap();
    assert!(c.spec(None).is_err());
}

#[test]
fn sweep_axis_names_round_trip() {
    for a in SweepAxis::ALL {
        assert_eq!(a.as_str().parse::<SweepAxis>().unwrap(), a);
    }
}

#[test]
fn records_come_in_trial_scheme_sweep_order() {
    let spec = tiny_spec(SweepAxis::SubsetSize, vec![0.0, 2.0]);
    let recs = run_experiment(&spec).unwrap();
    assert_eq!(recs.len(), 2 * 2 * 2);
    let keys: Vec<(usize, Scheme, f64)> = recs.iter().map(|r| (r.trial, r.scheme, r.sweep_value)).collect();
    let mut expected = Vec::new();
    for t in 0..2 {
        for s in [Scheme::OptimizedPooling, Scheme::NoPooling] {
            for v in [0.0, 2.0] {
                expected.push((t, s, v));
            }
        }
    }
    assert_eq!(keys, expected);
    assert!(recs.iter().all(|r| r.seed == 7 + r.trial as u64 && r.feasible && r.wall_ms == 0.0));
    for r in &recs {
        assert!((r.w_p1_hz + r.w_p2_hz + r.w_s_hz - 1e8).abs() < 1.0);
    }
}

#[test]
fn csv_is_deterministic_and_round_trips() {
    let spec = tiny_spec(SweepAxis::BackhaulCapacity, vec![1e8]);
    let mut a = Vec::new();
    let mut b = Vec::new();
    write_records(&mut a, &run_experiment(&spec).unwrap()).unwrap();
    write_records(&mut b, &run_experiment(&spec).unwrap()).unwrap();
    assert_eq!(a, b);
    let text = String::from_utf8(a.clone()).unwrap();
    assert_eq!(text.lines().next().unwrap(), CSV_HEADER);
    let back = read_records(a.as_slice()).unwrap();
    assert_eq!(back, run_experiment(&spec).unwrap());
}

#[test]
fn infeasible_trials_are_recorded() {
    let mut spec = tiny_spec(SweepAxis::PrivacyThreshold, vec![1e-300, 6e8]);
    spec.optimizer.init_max_halvings = 3;
    spec.schemes = vec![Scheme::OptimizedPooling];
    let recs = run_experiment(&spec).unwrap();
    assert_eq!(recs.len(), 4);
    assert!(recs.iter().filter(|r| r.sweep_value < 1.0).all(|r| !r.feasible && r.sum_rate_bps.is_nan()));
    assert!(recs.iter().filter(|r| r.sweep_value > 1.0).all(|r| r.feasible));
}

#[test]
fn unwritable_output_fails_before_running() {
    let spec = tiny_spec(SweepAxis::SnrDb, vec![0.0]);
    let err = run_to_file(&spec, std::path::Path::new("/nonexistent-dir/out.csv")).unwrap_err();
    assert!(err.to_string().contains("nonexistent-dir"));
}

#[test]
fn cases_fit_capacities_makes_designs_feasible() {
    for seed in 0..10 {
        let (inst, d) = cases::random_small_case(seed);
        let fitted = cases::fit_capacities(&inst, &d, 1.5).unwrap();
        let mut d = d;
        d.tighten_rates(&fitted).unwrap();
        assert!(crate::metrics::constraint_report(&fitted, &d).unwrap().is_feasible(&fitted.scenario, 0.0));
    }
}

#[test]
fn validate_passes_and_detects_mutations() {
    let report = validate(1).unwrap();
    let text = report.to_string();
    assert!(report.passed(), "{text}");
    assert!(report.mutations.iter().all(|m| m.detected()));
    assert!(text.contains("PASS fp-tightness"));
    assert!(text.contains("backhaul-sign-flip: detected"));
}
