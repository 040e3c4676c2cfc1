//! Per-block convex subproblems and the solver interface.
//!
//! A subproblem minimizes a convex cost over real variables subject to convex
//! inequality constraints `f_i(x) ≤ b_i`. Maximizing a concave objective is
//! expressed by minimizing its negation; [`ConvexSubproblem::objective`]
//! reports the maximized value.
//!
//! Every function is of the form `xᵀQx + bᵀx + c − Σ a_j √x_j` with `Q ⪰ 0`
//! and `a_j ≥ 0`, which covers the quadratic-transform and Fenchel surrogates
//! after complex variables have been split into real and imaginary parts.

mod barrier;
mod dump;

pub use barrier::BarrierSolver;
pub use dump::{read_subproblem, write_subproblem};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// A convex function `xᵀQx + bᵀx + c − Σ a_j √x_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexFn {
    /// Symmetric PSD `Q`; `None` for affine functions.
    pub quad: Option<DMatrix<f64>>,
    pub linear: DVector<f64>,
    pub constant: f64,
    /// `(j, a_j)` pairs, `a_j ≥ 0`; the domain requires `x_j ≥ 0`.
    pub sqrt: Vec<(usize, f64)>,
}

impl ConvexFn {
    pub fn zero(n: usize) -> Self {
        Self { quad: None, linear: DVector::zeros(n), constant: 0.0, sqrt: Vec::new() }
    }

    pub fn affine(linear: DVector<f64>, constant: f64) -> Self {
        Self { quad: None, linear, constant, sqrt: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.linear.len()
    }

    /// True when the function does not depend on `x`.
    pub fn is_constant(&self) -> bool {
        self.linear.iter().all(|&b| b == 0.0)
            && self.sqrt.iter().all(|&(_, a)| a == 0.0)
            && self.quad.as_ref().is_none_or(|q| q.iter().all(|&v| v == 0.0))
    }

    /// `self += s · other`. Square-root terms require `s ≥ 0`.
    pub fn add_scaled(&mut self, other: &ConvexFn, s: f64) {
        self.linear.axpy(s, &other.linear, 1.0);
        self.constant += s * other.constant;
        if let Some(oq) = &other.quad {
            match &mut self.quad {
                Some(q) => *q += oq * s,
                None => self.quad = Some(oq * s),
            }
        }
        self.sqrt.extend(other.sqrt.iter().map(|&(j, a)| (j, a * s)));
    }

    pub fn scaled(mut self, s: f64) -> Self {
        self.linear *= s;
        self.constant *= s;
        if let Some(q) = &mut self.quad {
            *q *= s;
        }
        for t in &mut self.sqrt {
            t.1 *= s;
        }
        self
    }

    /// Value at `x`; `+∞` outside the domain of the square-root terms.
    pub fn value(&self, x: &DVector<f64>) -> f64 {
        let mut v = self.constant + self.linear.dot(x);
        if let Some(q) = &self.quad {
            v += x.dot(&(q * x));
        }
        for &(j, a) in &self.sqrt {
            if x[j] < 0.0 {
                return f64::INFINITY;
            }
            v -= a * x[j].sqrt();
        }
        v
    }

    pub fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        let mut g = self.linear.clone();
        if let Some(q) = &self.quad {
            g.gemv(2.0, q, x, 1.0);
        }
        for &(j, a) in &self.sqrt {
            g[j] -= 0.5 * a / x[j].sqrt();
        }
        g
    }

    /// `h += s · ∇²f(x)`.
    pub fn add_hessian(&self, x: &DVector<f64>, s: f64, h: &mut DMatrix<f64>) {
        if let Some(q) = &self.quad {
            *h += q * (2.0 * s);
        }
        for &(j, a) in &self.sqrt {
            h[(j, j)] += s * 0.25 * a / x[j].powf(1.5);
        }
    }
}

/// `function(x) ≤ bound`, with a human-readable label and a category tag.
#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub label: String,
    pub tag: String,
    pub function: ConvexFn,
    pub bound: f64,
}

impl Constraint {
    /// `bound − f(x)`; negative when violated.
    pub fn slack(&self, x: &DVector<f64>) -> f64 {
        self.bound - self.function.value(x)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvexSubproblem {
    /// Variable names, one per coordinate of `x`.
    pub variables: Vec<String>,
    /// Convex cost to minimize.
    pub cost: ConvexFn,
    pub constraints: Vec<Constraint>,
}

impl ConvexSubproblem {
    pub fn new(variables: Vec<String>) -> Self {
        let n = variables.len();
        Self { variables, cost: ConvexFn::zero(n), constraints: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.variables.len()
    }

    /// The maximized objective, `−cost(x)`.
    pub fn objective(&self, x: &DVector<f64>) -> f64 {
        -self.cost.value(x)
    }

    /// Largest `f_i(x) − b_i` over the constraints (≤ 0 when feasible).
    pub fn max_violation(&self, x: &DVector<f64>) -> f64 {
        self.constraints.iter().map(|c| -c.slack(x)).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.dim();
        let fns = std::iter::once(&self.cost).chain(self.constraints.iter().map(|c| &c.function));
        for f in fns {
            let square = f.quad.as_ref().is_none_or(|q| q.nrows() == n && q.ncols() == n);
            if f.dim() != n || !square || f.sqrt.iter().any(|&(j, a)| j >= n || a < 0.0) {
                return Err(Error::Numerical("subproblem function does not match the variable manifest".into()));
            }
        }
        Ok(())
    }

    /// Fails with [`Error::AnchorViolation`] unless `x` is strictly feasible.
    pub fn check_interior(&self, x: &DVector<f64>) -> Result<()> {
        for c in &self.constraints {
            let s = c.slack(x);
            if !(s > 0.0) {
                return Err(Error::AnchorViolation { label: c.label.clone(), value: c.function.value(x) - c.bound });
            }
        }
        if !self.cost.value(x).is_finite() {
            return Err(Error::AnchorViolation { label: "cost".into(), value: self.cost.value(x) });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    MaxIterations,
    NumericalTrouble,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub x: DVector<f64>,
    pub objective: f64,
    pub status: SolveStatus,
    pub newton_steps: usize,
}

/// Anything that can solve a [`ConvexSubproblem`] from a strictly feasible
/// warm start.
pub trait ConvexSolver: Send + Sync {
    fn solve(&self, problem: &ConvexSubproblem, warm_start: &DVector<f64>) -> Result<Solution>;
}

/// Fault-injection stand-in that ignores the objective and returns the warm
/// start scaled by `factor`. Used by the self-check suite to confirm that a
/// regressing block solver is caught.
#[derive(Clone, Copy, Debug)]
pub struct ShrinkWarmStart {
    pub factor: f64,
}

impl ConvexSolver for ShrinkWarmStart {
    fn solve(&self, problem: &ConvexSubproblem, warm_start: &DVector<f64>) -> Result<Solution> {
        let x = warm_start * self.factor;
        Ok(Solution { objective: problem.objective(&x), x, status: SolveStatus::Optimal, newton_steps: 0 })
    }
}
