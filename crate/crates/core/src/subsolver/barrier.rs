use nalgebra::{DMatrix, DVector};

use super::{ConvexSolver, ConvexSubproblem, Solution, SolveStatus};
use crate::error::Result;

/// Log-barrier interior-point method with damped Newton centering.
#[derive(Clone, Debug)]
pub struct BarrierSolver {
    /// Target duality gap `m / t`, relative to `max(1, |cost|)`.
    pub gap_tol: f64,
    /// Barrier parameter growth per outer step.
    pub mu: f64,
    /// Budget of Newton steps across all centering rounds.
    pub max_newton_steps: usize,
}

impl Default for BarrierSolver {
    fn default() -> Self {
        Self { gap_tol: 1e-9, mu: 20.0, max_newton_steps: 500 }
    }
}

struct Barrier<'a> {
    p: &'a ConvexSubproblem,
    t: f64,
}

impl Barrier<'_> {
    /// `t·cost − Σ ln(b_i − f_i)`; `+∞` outside the strict interior.
    fn value(&self, x: &DVector<f64>) -> f64 {
        let mut v = self.t * self.p.cost.value(x);
        for c in &self.p.constraints {
            let s = c.slack(x);
            if !(s > 0.0) {
                return f64::INFINITY;
            }
            v -= s.ln();
        }
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    }

    fn newton_system(&self, x: &DVector<f64>) -> (DVector<f64>, DMatrix<f64>) {
        let n = x.len();
        let mut g = self.p.cost.gradient(x) * self.t;
        let mut h = DMatrix::zeros(n, n);
        self.p.cost.add_hessian(x, self.t, &mut h);
        for c in &self.p.constraints {
            let s = c.slack(x);
            let gi = c.function.gradient(x);
            g.axpy(1.0 / s, &gi, 1.0);
            c.function.add_hessian(x, 1.0 / s, &mut h);
            h.ger(1.0 / (s * s), &gi, &gi, 1.0);
        }
        (g, h)
    }
}

/// Solves `H d = −g`, adding a growing ridge if `H` is not numerically PD.
fn newton_direction(g: &DVector<f64>, h: &DMatrix<f64>) -> Option<DVector<f64>> {
    let scale = h.diagonal().iter().fold(0.0f64, |m, d| m.max(d.abs())).max(1e-300);
    let mut ridge = 0.0;
    for _ in 0..12 {
        let mut hr = h.clone();
        for i in 0..hr.nrows() {
            hr[(i, i)] += ridge;
        }
        if let Some(ch) = hr.cholesky() {
            let d = ch.solve(&(-g));
            if d.iter().all(|v| v.is_finite()) {
                return Some(d);
            }
        }
        ridge = if ridge == 0.0 { 1e-14 * scale } else { ridge * 100.0 };
    }
    None
}

impl BarrierSolver {
    fn run(&self, p: &ConvexSubproblem, x0: &DVector<f64>) -> (DVector<f64>, SolveStatus, usize) {
        let m = p.constraints.len() as f64;
        let mut x = x0.clone();
        let mut steps = 0;
        let mut t = 1.0;
        loop {
            let b = Barrier { p, t };
            // centering
            loop {
                if steps >= self.max_newton_steps {
                    return (x, SolveStatus::MaxIterations, steps);
                }
                let (g, h) = b.newton_system(&x);
                let Some(d) = newton_direction(&g, &h) else {
                    return (x, SolveStatus::NumericalTrouble, steps);
                };
                steps += 1;
                let decrement = -g.dot(&d);
                if !decrement.is_finite() {
                    return (x, SolveStatus::NumericalTrouble, steps);
                }
                if decrement <= 1e-10 {
                    break;
                }
                let phi = b.value(&x);
                let mut alpha = 1.0;
                let mut moved = false;
                while alpha > 1e-16 {
                    let cand = &x + &d * alpha;
                    let pc = b.value(&cand);
                    if pc.is_finite() && pc < phi && pc <= phi - 0.25 * alpha * decrement && cand != x {
                        x = cand;
                        moved = true;
                        break;
                    }
                    alpha *= 0.5;
                }
                // Roundoff in φ near the center stalls the line search.
                if !moved {
                    break;
                }
            }
            if m == 0.0 || m / t <= self.gap_tol * p.cost.value(&x).abs().max(1.0) {
                return (x, SolveStatus::Optimal, steps);
            }
            t *= self.mu;
        }
    }
}

impl ConvexSolver for BarrierSolver {
    fn solve(&self, problem: &ConvexSubproblem, warm_start: &DVector<f64>) -> Result<Solution> {
        problem.validate()?;
        problem.check_interior(warm_start)?;
        let (x, status, newton_steps) = self.run(problem, warm_start);
        let start = problem.objective(warm_start);
        let obj = problem.objective(&x);
        let feasible = problem.constraints.iter().all(|c| c.slack(&x) > 0.0);
        // Never hand back something worse than what we were given.
        if !feasible || !obj.is_finite() || obj < start {
            let status = if status == SolveStatus::Optimal && feasible && obj.is_finite() {
                SolveStatus::Optimal
            } else {
                SolveStatus::NumericalTrouble
            };
            return Ok(Solution { x: warm_start.clone(), objective: start, status, newton_steps });
        }
        Ok(Solution { x, objective: obj, status, newton_steps })
    }
}
