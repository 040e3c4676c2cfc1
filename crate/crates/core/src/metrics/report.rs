use std::fmt::Write as _;

use crate::error::Result;
use crate::model::{Band, Instance, PerBand, Scenario, N_OPERATORS};

use super::{DesignPoint, Evaluation};

/// Slack of every constraint of the joint problem at one design, in the
/// constraint's natural unit. Nonnegative slack means satisfied.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstraintReport {
    /// `W_{P,i} f_{i,k,P} − R_{i,k}^{(i)}` (bits/s).
    pub private_rate_slack: [Vec<f64>; N_OPERATORS],
    /// `W_S f_{i,k,S} − R_{i,k}^{(S)}` (bits/s).
    pub shared_rate_slack: [Vec<f64>; N_OPERATORS],
    /// `C_F − W_P g^{(i)} − W_S g^{(S)}` per RU (bits/s).
    pub fronthaul_slack: [Vec<f64>; N_OPERATORS],
    /// `C_B − W_S Σ_{r∈S_R} g^{(S)}` (bits/s).
    pub backhaul_slack: [f64; N_OPERATORS],
    /// `Γ − W_S β_{i,k}` (bits/s).
    pub privacy_slack: [Vec<f64>; N_OPERATORS],
    /// `P_max − v²` per UE and band.
    pub power_slack: [Vec<PerBand<f64>>; N_OPERATORS],
    /// `W − Σ W_P − W_S` (Hz).
    pub bandwidth_residual: f64,
}

/// Evaluates every constraint; infeasibility is reported, never raised.
pub fn constraint_report(inst: &Instance, design: &DesignPoint) -> Result<ConstraintReport> {
    let eval = Evaluation::compute(inst, design)?;
    Ok(report_from_evaluation(inst, design, &eval))
}

pub(crate) fn report_from_evaluation(inst: &Instance, design: &DesignPoint, eval: &Evaluation) -> ConstraintReport {
    let sc = &inst.scenario;
    let w = &design.bands;
    let mut rep = ConstraintReport {
        private_rate_slack: [Vec::new(), Vec::new()],
        shared_rate_slack: [Vec::new(), Vec::new()],
        fronthaul_slack: [Vec::new(), Vec::new()],
        backhaul_slack: [0.0; 2],
        privacy_slack: [Vec::new(), Vec::new()],
        power_slack: [Vec::new(), Vec::new()],
        bandwidth_residual: sc.total_bandwidth - w.sum(),
    };
    for op in 0..N_OPERATORS {
        for ue in sc.ues_of(op) {
            rep.private_rate_slack[op]
                .push(w.w_private[op] * eval.f(ue, Band::Private) - design.rate(ue, Band::Private));
            rep.shared_rate_slack[op].push(w.w_shared * eval.f(ue, Band::Shared) - design.rate(ue, Band::Shared));
            rep.privacy_slack[op].push(sc.privacy_threshold - w.w_shared * eval.beta(ue));
            let p = |b| sc.p_max - design.power(ue, b).powi(2);
            rep.power_slack[op].push(PerBand::new(p(Band::Private), p(Band::Shared)));
        }
        for ru in sc.rus_of(op) {
            let used = w.w_private[op] * eval.g(ru, Band::Private) + w.w_shared * eval.g(ru, Band::Shared);
            rep.fronthaul_slack[op].push(sc.fronthaul_capacity[op][ru.idx] - used);
        }
        let forwarded: f64 =
            inst.channels.subset(op).iter().map(|&r| eval.g(crate::model::RuId { op, idx: r }, Band::Shared)).sum();
        rep.backhaul_slack[op] = sc.backhaul_capacity[op] - w.w_shared * forwarded;
    }
    rep
}

impl ConstraintReport {
    /// Largest violation relative to the constraint's own scale (capacity,
    /// threshold, power limit or total bandwidth); zero when feasible.
    pub fn max_relative_violation(&self, scenario: &Scenario) -> f64 {
        let w = scenario.total_bandwidth;
        let gamma_scale = if scenario.privacy_threshold > 0.0 { scenario.privacy_threshold } else { w };
        let mut worst: f64 = 0.0;
        let mut see = |slack: f64, scale: f64| worst = worst.max(-slack / scale);
        for op in 0..N_OPERATORS {
            self.private_rate_slack[op].iter().for_each(|&s| see(s, w));
            self.shared_rate_slack[op].iter().for_each(|&s| see(s, w));
            for (r, &s) in self.fronthaul_slack[op].iter().enumerate() {
                see(s, scenario.fronthaul_capacity[op][r]);
            }
            see(self.backhaul_slack[op], scenario.backhaul_capacity[op]);
            self.privacy_slack[op].iter().for_each(|&s| see(s, gamma_scale));
            for p in &self.power_slack[op] {
                see(p.private, scenario.p_max);
                see(p.shared, scenario.p_max);
            }
        }
        see(-self.bandwidth_residual.abs(), w);
        worst
    }

    pub fn is_feasible(&self, scenario: &Scenario, rel_tol: f64) -> bool {
        self.max_relative_violation(scenario) <= rel_tol
    }

    /// Flat `key = value` block, one constraint per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut line = |k: String, v: f64| {
            let _ = writeln!(out, "{k} = {v:e}");
        };
        for op in 0..N_OPERATORS {
            for (k, s) in self.private_rate_slack[op].iter().enumerate() {
                line(format!("private_rate_slack[{op}][{k}]"), *s);
            }
            for (k, s) in self.shared_rate_slack[op].iter().enumerate() {
                line(format!("shared_rate_slack[{op}][{k}]"), *s);
            }
            for (r, s) in self.fronthaul_slack[op].iter().enumerate() {
                line(format!("fronthaul_slack[{op}][{r}]"), *s);
            }
            line(format!("backhaul_slack[{op}]"), self.backhaul_slack[op]);
            for (k, s) in self.privacy_slack[op].iter().enumerate() {
                line(format!("privacy_slack[{op}][{k}]"), *s);
            }
            for (k, s) in self.power_slack[op].iter().enumerate() {
                line(format!("power_slack[{op}][{k}][private]"), s.private);
                line(format!("power_slack[{op}][{k}][shared]"), s.shared);
            }
        }
        line("bandwidth_residual".into(), self.bandwidth_residual);
        out
    }
}

/// `Σ_{i,k} max{R_{i,k} − Γ, 0}` with `R_{i,k}` the UE's total rate.
pub fn secrecy_sum_rate(design: &DesignPoint, scenario: &Scenario) -> f64 {
    design.rates.iter().flatten().map(|r| (r.private + r.shared - scenario.privacy_threshold).max(0.0)).sum()
}
