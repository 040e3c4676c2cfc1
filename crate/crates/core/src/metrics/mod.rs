//! Analytic compression rates, achievable rates, privacy leakage and the
//! constraint residuals of the joint design problem.
//!
//! All per-Hz quantities are in bits/s/Hz; multiplying by a band width in Hz
//! gives bits/s.

mod design;
pub mod oracle;
mod report;

pub use design::DesignPoint;
pub use report::{constraint_report, secrecy_sum_rate, ConstraintReport};

use crate::error::{Error, Result};
use crate::linalg::{block_diag, cholesky, gram, identity, inv_quad, log2_det_hpd, outer, CMat, CVec};
use crate::model::{other, Band, Instance, PerBand, RuId, UeId, N_OPERATORS};

/// A quantized signal set some CP (or fronthaul link) observes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Observation {
    /// `ŷ_{i,r}^{(m)}`: one RU's quantized signal on one subband.
    Fronthaul { ru: RuId, band: Band },
    /// `ŷ_i^{(i)}`: CP `i`'s private-band signals from its own RUs.
    PrivateCp(usize),
    /// `ŷ_i^{(S)}`: CP `i`'s shared-band signals, own RUs followed by the
    /// other CP's forwarded subset.
    SharedCp(usize),
}

impl Observation {
    pub fn band(&self) -> Band {
        match self {
            Observation::Fronthaul { band, .. } => *band,
            Observation::PrivateCp(_) => Band::Private,
            Observation::SharedCp(_) => Band::Shared,
        }
    }

    /// RUs contributing to this observation, in stacking order.
    pub fn rus(&self, inst: &Instance) -> Vec<RuId> {
        match *self {
            Observation::Fronthaul { ru, .. } => vec![ru],
            Observation::PrivateCp(op) => inst.scenario.rus_of(op).collect(),
            Observation::SharedCp(op) => inst.channels.shared_stack_rus(op),
        }
    }

    /// UEs whose signals reach this observation on its subband.
    pub fn transmitters(&self, inst: &Instance) -> Vec<UeId> {
        match *self {
            Observation::Fronthaul { ru, band: Band::Private } => inst.scenario.ues_of(ru.op).collect(),
            Observation::PrivateCp(op) => inst.scenario.ues_of(op).collect(),
            Observation::Fronthaul { band: Band::Shared, .. } | Observation::SharedCp(_) => {
                inst.scenario.ues().collect()
            }
        }
    }

    /// Channel of `ue` into this observation's stacked antenna space.
    pub fn channel<'a>(&self, inst: &'a Instance, ue: UeId) -> &'a CVec {
        let ch = &inst.channels;
        match *self {
            Observation::Fronthaul { ru, .. } => ch.link(ue, ru),
            Observation::PrivateCp(_) => ch.stacked_private(ue),
            Observation::SharedCp(cp) if ue.op == cp => ch.stacked_shared_own(ue),
            Observation::SharedCp(_) => ch.stacked_shared_cross(ue),
        }
    }

    pub fn dim(&self, inst: &Instance) -> usize {
        self.rus(inst).iter().map(|&ru| inst.scenario.antennas(ru)).sum()
    }

    /// Block-diagonal quantizer `L̄_i`, `L̃_i` or a single `L_{i,r}`.
    pub fn quantizer(&self, inst: &Instance, design: &DesignPoint) -> CMat {
        let band = self.band();
        let blocks: Vec<&CMat> = self.rus(inst).into_iter().map(|ru| design.quantizer(ru, band)).collect();
        block_diag(&blocks)
    }
}

/// `Σ_u λ(L h_u v_u) + N₀ λ(L) + I` over the observation's transmitters,
/// optionally leaving one UE out.
pub fn observation_covariance(inst: &Instance, design: &DesignPoint, obs: Observation, exclude: Option<UeId>) -> CMat {
    let l = obs.quantizer(inst, design);
    let mut cov = gram(&l) * crate::linalg::C64::from(inst.noise()) + identity(l.nrows());
    for ue in obs.transmitters(inst) {
        if Some(ue) == exclude {
            continue;
        }
        let v = design.power(ue, obs.band());
        if v != 0.0 {
            cov += outer(&(&l * obs.channel(inst, ue) * crate::linalg::C64::from(v)));
        }
    }
    cov
}

/// Single-user-detection rate of `ue` from `obs`: `log2(1 + |v|² hᴴLᴴJ⁻¹Lh)`.
pub fn sud_rate(inst: &Instance, design: &DesignPoint, obs: Observation, ue: UeId) -> Result<f64> {
    let v = design.power(ue, obs.band());
    if v == 0.0 {
        return Ok(0.0);
    }
    let l = obs.quantizer(inst, design);
    let a = &l * obs.channel(inst, ue) * crate::linalg::C64::from(v);
    let j = observation_covariance(inst, design, obs, Some(ue));
    Ok((1.0 + inv_quad(&j, &a)?).log2())
}

fn check(design: &DesignPoint) -> Result<()> {
    if design.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidDesign("non-finite power or quantizer entries".into()))
    }
}

/// `g_{i,r}^{(m)}`: compression rate of RU `ru` on `band`.
pub fn quantization_rate(inst: &Instance, design: &DesignPoint, ru: RuId, band: Band) -> Result<f64> {
    check(design)?;
    let cov = observation_covariance(inst, design, Observation::Fronthaul { ru, band }, None);
    Ok(log2_det_hpd(&cov)?.max(0.0))
}

pub fn quantization_rate_private(inst: &Instance, design: &DesignPoint, ru: RuId) -> Result<f64> {
    quantization_rate(inst, design, ru, Band::Private)
}

pub fn quantization_rate_shared(inst: &Instance, design: &DesignPoint, ru: RuId) -> Result<f64> {
    quantization_rate(inst, design, ru, Band::Shared)
}

/// `f_{i,k,P}`.
pub fn rate_private(inst: &Instance, design: &DesignPoint, ue: UeId) -> Result<f64> {
    check(design)?;
    sud_rate(inst, design, Observation::PrivateCp(ue.op), ue)
}

/// `f_{i,k,S}`.
pub fn rate_shared(inst: &Instance, design: &DesignPoint, ue: UeId) -> Result<f64> {
    check(design)?;
    sud_rate(inst, design, Observation::SharedCp(ue.op), ue)
}

/// `β_{i,k,S}`: information about UE `ue`'s shared-band signal available to
/// the other CP, as the difference of two log-determinants over everything
/// that CP observes on the shared band.
pub fn privacy_leakage(inst: &Instance, design: &DesignPoint, ue: UeId) -> Result<f64> {
    check(design)?;
    if design.power(ue, Band::Shared) == 0.0 {
        return Ok(0.0);
    }
    let obs = Observation::SharedCp(other(ue.op));
    let full = cholesky(&observation_covariance(inst, design, obs, None))?;
    let without = cholesky(&observation_covariance(inst, design, obs, Some(ue)))?;
    let beta = crate::linalg::log2_det_from_cholesky(&full) - crate::linalg::log2_det_from_cholesky(&without);
    Ok(beta.max(0.0))
}

/// Every rate and leakage function evaluated at one design.
#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    /// `g[i][r]` per band.
    pub compression: [Vec<PerBand<f64>>; N_OPERATORS],
    /// `f[i][k]` per band.
    pub rate: [Vec<PerBand<f64>>; N_OPERATORS],
    /// `β[i][k]`.
    pub leakage: [Vec<f64>; N_OPERATORS],
}

impl Evaluation {
    pub fn compute(inst: &Instance, design: &DesignPoint) -> Result<Self> {
        check(design)?;
        let sc = &inst.scenario;
        let mut compression = [Vec::new(), Vec::new()];
        let mut rate = [Vec::new(), Vec::new()];
        let mut leakage = [Vec::new(), Vec::new()];
        for op in 0..N_OPERATORS {
            for ru in sc.rus_of(op) {
                compression[op].push(PerBand::new(
                    quantization_rate(inst, design, ru, Band::Private)?,
                    quantization_rate(inst, design, ru, Band::Shared)?,
                ));
            }
            for ue in sc.ues_of(op) {
                rate[op].push(PerBand::new(rate_private(inst, design, ue)?, rate_shared(inst, design, ue)?));
                leakage[op].push(privacy_leakage(inst, design, ue)?);
            }
        }
        Ok(Self { compression, rate, leakage })
    }

    pub fn g(&self, ru: RuId, band: Band) -> f64 {
        *self.compression[ru.op][ru.idx].get(band)
    }

    pub fn f(&self, ue: UeId, band: Band) -> f64 {
        *self.rate[ue.op][ue.idx].get(band)
    }

    pub fn beta(&self, ue: UeId) -> f64 {
        self.leakage[ue.op][ue.idx]
    }
}
