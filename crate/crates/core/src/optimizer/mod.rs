//! The alternating outer loop and the baseline schemes.
//!
//! Each outer iteration visits the blocks bands → power → quantizers. Before
//! every block the auxiliary variables are refreshed at the current design,
//! the convex block subproblem is built and solved, and the result is kept if
//! it satisfies the original constraints. Because the surrogates are tight at
//! the anchor and the subsolver never returns a worse point, the sum-rate is
//! non-decreasing.

mod init;
mod trace;

pub use init::initialize;
pub use trace::{IterationRecord, IterationTrace};

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fp::{build_surrogates, update_aux, BandFreedom, Block, Freeze, LoweringOptions, MIN_BAND_HZ};
use crate::metrics::{constraint_report, DesignPoint};
use crate::model::Instance;
use crate::subsolver::{BarrierSolver, ConvexSolver};

/// Spectrum-sharing scheme.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// All three band widths, powers and quantizers optimized.
    OptimizedPooling,
    /// `W_P,1 = W_P,2 = W/2`, no shared band.
    NoPooling,
    /// `W_P,1 = W_P,2 = W_S = W/3`, powers and quantizers optimized.
    EqualThirds,
    /// No shared band, `W_P,1` and `W_P,2` optimized.
    OrthogonalOptimized,
}

impl Scheme {
    pub const ALL: [Scheme; 4] =
        [Scheme::OptimizedPooling, Scheme::NoPooling, Scheme::EqualThirds, Scheme::OrthogonalOptimized];

    pub fn as_str(&self) -> &'static str {
        match self {
            Scheme::OptimizedPooling => "optimized-pooling",
            Scheme::NoPooling => "no-pooling",
            Scheme::EqualThirds => "equal-thirds",
            Scheme::OrthogonalOptimized => "orthogonal-optimized",
        }
    }

    /// Whether the scheme uses a shared band at all.
    pub fn pools(&self) -> bool {
        matches!(self, Scheme::OptimizedPooling | Scheme::EqualThirds)
    }

    pub fn band_freedom(&self) -> BandFreedom {
        match self {
            Scheme::OptimizedPooling => BandFreedom::Full,
            Scheme::OrthogonalOptimized => BandFreedom::PrivateOnly,
            Scheme::NoPooling | Scheme::EqualThirds => BandFreedom::Fixed,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL.into_iter().find(|x| x.as_str() == s).ok_or_else(|| Error::Config(format!("unknown scheme `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerConfig {
    pub scheme: Scheme,
    pub max_outer_iters: usize,
    /// Stop once the sum-rate gained over the last three iterations is at
    /// most this fraction of the current sum-rate.
    pub rel_obj_tol: f64,
    /// Relative duality-gap target of each block solve.
    pub subsolver_tol: f64,
    pub max_newton_steps: usize,
    /// Relative slack given to active constraints so each warm start is
    /// strictly interior.
    pub relax: f64,
    /// Largest relative violation of the original constraints a block result
    /// may have and still be accepted.
    pub feasibility_tol: f64,
    /// Halvings tried for the initial power and quantizer scales.
    pub init_max_halvings: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            scheme: Scheme::OptimizedPooling,
            max_outer_iters: 100,
            rel_obj_tol: 1e-4,
            subsolver_tol: 1e-9,
            max_newton_steps: 500,
            relax: 1e-9,
            feasibility_tol: 1e-7,
            init_max_halvings: 60,
        }
    }
}

impl OptimizerConfig {
    pub fn with_scheme(scheme: Scheme) -> Self {
        Self { scheme, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [self.rel_obj_tol, self.subsolver_tol, self.relax, self.feasibility_tol];
        if positive.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(Error::Config("optimizer tolerances must be positive".into()));
        }
        if self.max_outer_iters == 0 || self.max_newton_steps == 0 {
            return Err(Error::Config("iteration budgets must be at least 1".into()));
        }
        Ok(())
    }

    pub fn solver(&self) -> BarrierSolver {
        BarrierSolver {
            gap_tol: self.subsolver_tol,
            max_newton_steps: self.max_newton_steps,
            ..BarrierSolver::default()
        }
    }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub design: DesignPoint,
    pub trace: IterationTrace,
    /// Outer iterations run.
    pub iterations: usize,
    pub converged: bool,
}

impl Outcome {
    pub fn sum_rate(&self) -> f64 {
        self.design.sum_rate()
    }
}

pub fn optimize(inst: &Instance, config: &OptimizerConfig) -> Result<Outcome> {
    optimize_with(inst, config, &config.solver())
}

/// [`optimize`] with a caller-supplied block solver.
pub fn optimize_with(inst: &Instance, config: &OptimizerConfig, solver: &dyn ConvexSolver) -> Result<Outcome> {
    config.validate()?;
    let sc = &inst.scenario;
    let scheme = config.scheme;
    let mut design = initialize(inst, scheme, config.init_max_halvings)?;
    let lowering = LoweringOptions { relax: config.relax };
    let freedom = scheme.band_freedom();
    let shared_off = !scheme.pools() || sc.privacy_threshold == 0.0;

    let mut trace = IterationTrace::default();
    let violation = |d: &DesignPoint| -> Result<f64> { Ok(constraint_report(inst, d)?.max_relative_violation(sc)) };
    trace.records.push(IterationRecord {
        iter: 0,
        sum_rate_bps: design.sum_rate(),
        max_violation: violation(&design)?,
        ms: 0.0,
    });

    let mut converged = false;
    let mut iterations = 0;
    for it in 1..=config.max_outer_iters {
        let start = Instant::now();
        for block in [Block::Bands, Block::Power, Block::Quantizer] {
            if block == Block::Bands && freedom == BandFreedom::Fixed {
                continue;
            }
            let freeze = Freeze { bands: freedom, shared: shared_off || design.bands.w_shared < MIN_BAND_HZ };
            let aux = update_aux(inst, &design)?;
            let sys = build_surrogates(inst, &design, &aux, block, freeze, lowering)?;
            if sys.problem.dim() == 0 {
                continue;
            }
            let sol = solver.solve(&sys.problem, &sys.warm_start)?;
            let mut candidate = sys.apply(inst, &design, &sol.x);
            if !candidate.is_finite() {
                continue;
            }
            candidate.tighten_rates(inst)?;
            if violation(&candidate)? <= config.feasibility_tol {
                design = candidate;
            }
        }
        iterations = it;
        trace.records.push(IterationRecord {
            iter: it,
            sum_rate_bps: design.sum_rate(),
            max_violation: violation(&design)?,
            ms: start.elapsed().as_secs_f64() * 1e3,
        });
        if it >= 3 {
            let now = trace.records[it].sum_rate_bps;
            let before = trace.records[it - 3].sum_rate_bps;
            if now - before <= config.rel_obj_tol * now.abs() {
                converged = true;
                break;
            }
        }
    }
    Ok(Outcome { design, trace, iterations, converged })
}
