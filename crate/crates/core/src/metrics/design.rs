use crate::error::{Error, Result};
use crate::linalg::{is_finite_mat, CMat, C64};
use crate::model::{Band, BandAllocation, Instance, PerBand, RuId, Scenario, UeId, N_OPERATORS};

use super::Evaluation;

/// The decision variables: band widths, per-UE power amplitudes, per-RU
/// quantizer matrices (quantization noise covariance fixed to `I`), and the
/// per-UE, per-subband rates in bits/s.
///
/// Power amplitudes are stored as nonnegative reals; every metric depends on
/// them only through `|v|`.
#[derive(Clone, Debug, PartialEq)]
pub struct DesignPoint {
    pub bands: BandAllocation,
    pub power: [Vec<PerBand<f64>>; N_OPERATORS],
    pub quantizer: [Vec<PerBand<CMat>>; N_OPERATORS],
    pub rates: [Vec<PerBand<f64>>; N_OPERATORS],
}

impl DesignPoint {
    /// Uniform design: every UE at amplitude `v` on both bands and every
    /// quantizer `μ I`. Rates start at zero.
    pub fn uniform(scenario: &Scenario, bands: BandAllocation, v: f64, mu: f64) -> Self {
        let power = [0, 1].map(|op| vec![PerBand::new(v, v); scenario.n_ues[op]]);
        let quantizer = [0, 1].map(|op| {
            scenario.n_antennas[op]
                .iter()
                .map(|&n| {
                    let l = CMat::identity(n, n) * C64::from(mu);
                    PerBand::new(l.clone(), l)
                })
                .collect()
        });
        let rates = [0, 1].map(|op| vec![PerBand::new(0.0, 0.0); scenario.n_ues[op]]);
        Self { bands, power, quantizer, rates }
    }

    pub fn power(&self, ue: UeId, band: Band) -> f64 {
        *self.power[ue.op][ue.idx].get(band)
    }

    pub fn set_power(&mut self, ue: UeId, band: Band, v: f64) {
        *self.power[ue.op][ue.idx].get_mut(band) = v;
    }

    pub fn quantizer(&self, ru: RuId, band: Band) -> &CMat {
        self.quantizer[ru.op][ru.idx].get(band)
    }

    pub fn quantizer_mut(&mut self, ru: RuId, band: Band) -> &mut CMat {
        self.quantizer[ru.op][ru.idx].get_mut(band)
    }

    pub fn rate(&self, ue: UeId, band: Band) -> f64 {
        *self.rates[ue.op][ue.idx].get(band)
    }

    pub fn sum_rate(&self) -> f64 {
        self.rates.iter().flatten().map(|r| r.private + r.shared).sum()
    }

    pub fn is_finite(&self) -> bool {
        let bands = [self.bands.w_private[0], self.bands.w_private[1], self.bands.w_shared];
        bands.iter().all(|w| w.is_finite())
            && self.power.iter().flatten().all(|p| p.private.is_finite() && p.shared.is_finite())
            && self.quantizer.iter().flatten().all(|q| is_finite_mat(&q.private) && is_finite_mat(&q.shared))
            && self.rates.iter().flatten().all(|r| r.private.is_finite() && r.shared.is_finite())
    }

    /// Sets every rate to its achievable bound `W·f`.
    pub fn set_rates_from(&mut self, eval: &Evaluation) {
        for op in 0..N_OPERATORS {
            for (k, r) in self.rates[op].iter_mut().enumerate() {
                let f = &eval.rate[op][k];
                r.private = self.bands.w_private[op] * f.private;
                r.shared = self.bands.w_shared * f.shared;
            }
        }
    }

    /// Re-evaluates the metrics and sets every rate to `W·f`.
    pub fn tighten_rates(&mut self, inst: &Instance) -> Result<Evaluation> {
        let eval = Evaluation::compute(inst, self)?;
        self.set_rates_from(&eval);
        Ok(eval)
    }

    /// Replaces every power amplitude by its magnitude.
    pub fn canonicalize_power(&mut self) {
        for p in self.power.iter_mut().flatten() {
            p.private = p.private.abs();
            p.shared = p.shared.abs();
        }
    }

    /// Dimension and sign checks against a scenario.
    pub fn validate(&self, scenario: &Scenario) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidDesign(m));
        for op in 0..N_OPERATORS {
            if self.power[op].len() != scenario.n_ues[op] || self.rates[op].len() != scenario.n_ues[op] {
                return bad(format!("operator {op}: power/rate vectors do not match n_ues"));
            }
            if self.quantizer[op].len() != scenario.n_rus[op] {
                return bad(format!("operator {op}: quantizer list does not match n_rus"));
            }
            for (r, q) in self.quantizer[op].iter().enumerate() {
                let n = scenario.n_antennas[op][r];
                for m in [&q.private, &q.shared] {
                    if m.nrows() != n || m.ncols() != n {
                        return bad(format!("RU ({op},{r}): quantizer must be {n}x{n}"));
                    }
                }
            }
        }
        if !self.is_finite() {
            return bad("non-finite entries".into());
        }
        if self.rates.iter().flatten().any(|r| r.private < 0.0 || r.shared < 0.0) {
            return bad("negative rate".into());
        }
        self.bands.validate(scenario.total_bandwidth)
    }
}
