//! Self-check suite behind the `validate` subcommand.
//!
//! Each check runs a small randomized version of one acceptance property.
//! Two mutation runs then confirm the suite can tell when something breaks:
//! a flipped sign in the backhaul surrogate must fail the tightness check,
//! and a block solver that shrinks its warm start must fail the monotonicity
//! check.

use std::fmt::{self, Write};

use crate::error::Result;
use crate::fp::{evaluate_surrogates, update_aux, ProductSign, SurrogateOptions};
use crate::metrics::oracle::{det_ratio_terms, sampled_terms};
use crate::metrics::{constraint_report, privacy_leakage, DesignPoint};
use crate::model::{Instance, Scenario};
use crate::optimizer::{optimize, optimize_with, OptimizerConfig, Outcome, Scheme};
use crate::subsolver::{ConvexSolver, ShrinkWarmStart};

use super::cases::{fit_capacities, perturb, random_small_case};

const CASES: u64 = 20;
const SAMPLES: usize = 200_000;

#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// A deliberately broken variant and whether its target check caught it.
#[derive(Clone, Debug, PartialEq)]
pub struct MutationOutcome {
    pub name: &'static str,
    pub check: CheckOutcome,
}

impl MutationOutcome {
    pub fn detected(&self) -> bool {
        !self.check.passed
    }
}

#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub seed: u64,
    pub checks: Vec<CheckOutcome>,
    pub mutations: Vec<MutationOutcome>,
    /// Constraint report of one optimized design, as text.
    pub sample_report: String,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed) && self.mutations.iter().all(|m| m.detected())
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "validate seed {}", self.seed)?;
        for c in &self.checks {
            writeln!(f, "{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail)?;
        }
        for m in &self.mutations {
            let status = if m.detected() { "PASS" } else { "FAIL" };
            let verdict = if m.detected() { "detected" } else { "NOT detected" };
            writeln!(f, "{status} mutation {}: {verdict} by {} ({})", m.name, m.check.name, m.check.detail)?;
        }
        writeln!(f, "constraint report of one optimized design:")?;
        f.write_str(&self.sample_report)?;
        writeln!(f, "{}", if self.passed() { "all checks passed" } else { "SOME CHECKS FAILED" })
    }
}

fn outcome(name: &'static str, failures: Vec<String>, total: usize, what: &str) -> CheckOutcome {
    let mut detail = format!("{}/{total} {what}", total - failures.len());
    if let Some(first) = failures.first() {
        let _ = write!(detail, "; first failure: {first}");
    }
    CheckOutcome { name, passed: failures.is_empty(), detail }
}

fn case(seed: u64, i: u64) -> Result<(Instance, DesignPoint)> {
    let (inst, d) = random_small_case(seed.wrapping_mul(1_000_003).wrapping_add(i));
    Ok((fit_capacities(&inst, &d, 2.0)?, d))
}

pub fn check_det_ratio(seed: u64) -> Result<CheckOutcome> {
    let mut failures = Vec::new();
    let mut total = 0;
    for i in 0..CASES {
        let (inst, d) = case(seed, i)?;
        for t in det_ratio_terms(&inst, &d)? {
            total += 1;
            if t.rel_error() > 1e-9 {
                failures.push(format!("case {i} {}: {} vs {}", t.label, t.analytic, t.oracle));
            }
        }
    }
    Ok(outcome("mi-det-ratio", failures, total, "quantities within 1e-9 relative"))
}

pub fn check_sampling(seed: u64) -> Result<CheckOutcome> {
    let mut failures = Vec::new();
    let mut total = 0;
    for i in 0..2 {
        let (inst, d) = case(seed, 100 + i)?;
        for t in sampled_terms(&inst, &d, SAMPLES, seed.wrapping_add(i))? {
            total += 1;
            if t.abs_error() > 0.05 {
                failures.push(format!("case {i} {}: {} vs sampled {}", t.label, t.analytic, t.oracle));
            }
        }
    }
    Ok(outcome("mi-sampling", failures, total, "quantities within 0.05 bits"))
}

pub fn check_tightness(seed: u64, opts: SurrogateOptions) -> Result<CheckOutcome> {
    let mut failures = Vec::new();
    let mut total = 0;
    for i in 0..CASES {
        let (inst, d) = case(seed, 200 + i)?;
        let aux = update_aux(&inst, &d)?;
        for t in evaluate_surrogates(&inst, &aux, &d, opts)? {
            total += 1;
            if t.relative_gap() > 1e-8 {
                failures.push(format!("case {i} {}: {} vs {}", t.label, t.surrogate, t.original));
            }
        }
    }
    Ok(outcome("fp-tightness", failures, total, "surrogates tight at the anchor"))
}

pub fn check_direction(seed: u64, opts: SurrogateOptions) -> Result<CheckOutcome> {
    let mut failures = Vec::new();
    let mut total = 0;
    for i in 0..CASES {
        let (inst, d) = case(seed, 300 + i)?;
        let aux = update_aux(&inst, &d)?;
        let p = perturb(&inst, &d, seed.wrapping_add(i));
        for t in evaluate_surrogates(&inst, &aux, &p, opts)? {
            total += 1;
            if !t.holds(1e-9) {
                failures.push(format!("case {i} {} ({:?}): {} vs {}", t.label, t.direction, t.surrogate, t.original));
            }
        }
    }
    Ok(outcome("fp-direction", failures, total, "surrogates on the safe side at perturbed designs"))
}

fn small_instances(seed: u64) -> Result<Vec<Instance>> {
    (0..3).map(|i| Instance::generate(Scenario::secrecy_tradeoff_defaults(0.0, 3e8), seed.wrapping_add(i))).collect()
}

pub fn check_monotone(seed: u64, solver: Option<&dyn ConvexSolver>) -> Result<CheckOutcome> {
    let config = OptimizerConfig::default();
    let mut failures = Vec::new();
    let instances = small_instances(seed)?;
    for (i, inst) in instances.iter().enumerate() {
        let out = match solver {
            Some(s) => optimize_with(inst, &config, s)?,
            None => optimize(inst, &config)?,
        };
        let tol = 10.0 * config.subsolver_tol * out.sum_rate().max(1.0);
        if !out.trace.is_monotone(tol) {
            let worst = out.trace.records.windows(2).map(|w| w[0].sum_rate_bps - w[1].sum_rate_bps).fold(0.0, f64::max);
            failures.push(format!("instance {i}: sum-rate drops by {worst:e} bits/s"));
        }
        if let Some(r) = out.trace.records.iter().find(|r| r.max_violation > 1e-6) {
            failures.push(format!("instance {i}: iterate {} violates by {:e}", r.iter, r.max_violation));
        }
    }
    Ok(outcome("monotonicity", failures, instances.len(), "traces non-decreasing and feasible"))
}

fn privacy_ok(inst: &Instance, out: &Outcome) -> Result<bool> {
    let sc = &inst.scenario;
    for ue in sc.ues() {
        if out.design.bands.w_shared * privacy_leakage(inst, &out.design, ue)? > sc.privacy_threshold * (1.0 + 1e-6) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Scheme dominance and privacy enforcement on the same runs; also returns
/// the constraint report of the first optimized design.
fn check_schemes(seed: u64) -> Result<(CheckOutcome, CheckOutcome, String)> {
    let mut dominance = Vec::new();
    let mut privacy = Vec::new();
    let mut report = String::new();
    let instances = small_instances(seed)?;
    for (i, inst) in instances.iter().enumerate() {
        let runs: Vec<Outcome> =
            Scheme::ALL.iter().map(|&s| optimize(inst, &OptimizerConfig::with_scheme(s))).collect::<Result<_>>()?;
        if i == 0 {
            report = constraint_report(inst, &runs[0].design)?.to_text();
        }
        let best = runs[0].sum_rate();
        for (s, run) in Scheme::ALL.iter().zip(&runs) {
            if run.sum_rate() > best * (1.0 + 1e-3) {
                dominance.push(format!("instance {i}: {s} {:e} > optimized {best:e}", run.sum_rate()));
            }
            if !privacy_ok(inst, run)? {
                privacy.push(format!("instance {i}: {s} leaks above the threshold"));
            }
        }
    }
    let n = instances.len();
    Ok((
        outcome("scheme-dominance", dominance, n, "instances with optimized pooling ahead of every baseline"),
        outcome("privacy", privacy, n * Scheme::ALL.len(), "designs within the leakage threshold"),
        report,
    ))
}

pub fn validate(seed: u64) -> Result<ValidationReport> {
    let default = SurrogateOptions::default();
    let (dominance, privacy, sample_report) = check_schemes(seed)?;
    let checks = vec![
        check_det_ratio(seed)?,
        check_sampling(seed)?,
        check_tightness(seed, default)?,
        check_direction(seed, default)?,
        check_monotone(seed, None)?,
        dominance,
        privacy,
    ];
    let flipped = SurrogateOptions { backhaul_product_sign: ProductSign::Plus };
    let mutations = vec![
        MutationOutcome { name: "backhaul-sign-flip", check: check_tightness(seed, flipped)? },
        MutationOutcome {
            name: "shrinking-subsolver",
            check: check_monotone(seed, Some(&ShrinkWarmStart { factor: 0.5 }))?,
        },
    ];
    Ok(ValidationReport { seed, checks, mutations, sample_report })
}
