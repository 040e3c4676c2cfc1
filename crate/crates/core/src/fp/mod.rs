//! Fractional-programming machinery for the non-convex rate, fronthaul,
//! backhaul and privacy constraints.
//!
//! [`update_aux`] computes the auxiliary variables in closed form at a design
//! (the *anchor*). With those fixed, every non-convex constraint is replaced
//! by a stricter convex one that coincides with it at the anchor:
//!
//! * rates use the quadratic transform of the SINR (`κ`, `z`) and the
//!   product bound `R ≤ 2c√W − c²/α`;
//! * compression rates `log2 det Σ` are majorized through the Fenchel
//!   conjugate of `log det` (anchor `Σ`), and bandwidth products through
//!   `ρ̃ ≤ 2c̃√ρ − c̃²W`;
//! * the privacy leakage is a difference of log-determinants: the first is
//!   majorized as above (anchor `Σ̃`), the second minorized with the matrix
//!   quadratic transform (`K`, `Z`).
//!
//! [`evaluate_surrogates`] evaluates those surrogates literally, for
//! tightness and sandwich checks. [`build_surrogates`] assembles the convex
//! block subproblem handed to the subsolver.

mod expr;
mod lower;
mod surrogate;

pub use expr::AffineExpr;
pub use lower::{build_surrogates, BandFreedom, Block, Freeze, LoweringOptions, SurrogateSystem};
pub use surrogate::{
    evaluate_surrogates, fenchel_bound, matrix_transform_bound, quadratic_transform_bound, Direction, Origin,
    ProductSign, SurrogateOptions, SurrogateTerm,
};

use crate::error::Result;
use crate::linalg::{cholesky, identity, log2_det_hpd, CMat, CVec, C64};
use crate::metrics::{observation_covariance, DesignPoint, Evaluation, Observation};
use crate::model::{other, Band, BandAllocation, Instance, PerBand, UeId, N_OPERATORS};

/// Band widths below this many Hz are treated as closed: the band's
/// variables are frozen and its surrogates dropped.
pub const MIN_BAND_HZ: f64 = 1.0;

/// Auxiliary variables attached to one UE.
#[derive(Clone, Debug, PartialEq)]
pub struct UeAux {
    /// `κ`: SINR at the anchor, per band.
    pub kappa: PerBand<f64>,
    /// `z = (λ(a) + J)⁻¹ a` with `a = L h v`, per band.
    pub z: PerBand<CVec>,
    /// `c = α√W`, per band.
    pub c_rate: PerBand<f64>,
    /// `α = f` at the anchor, per band.
    pub alpha: PerBand<f64>,
    /// `ĉ = √Γ / W_S`.
    pub c_hat: f64,
    /// `β` at the anchor.
    pub beta_var: f64,
    /// `θ = log2 det(I + K)` at the anchor.
    pub theta: f64,
    /// `K = A Aᴴ`.
    pub k: CMat,
    /// `Z = (AᴴA + I)⁻¹ Aᴴ`.
    pub z_mat: CMat,
}

/// Auxiliary variables attached to one RU.
#[derive(Clone, Debug, PartialEq)]
pub struct RuAux {
    /// Fenchel anchor: the fronthaul signal covariance, per band.
    pub sigma: PerBand<CMat>,
    /// `ρ = W g`, per band.
    pub rho: PerBand<f64>,
    /// `ρ̃ = g`, per band.
    pub rho_tilde: PerBand<f64>,
    /// `c̃ = √ρ / W`, per band.
    pub c_tilde: PerBand<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AuxState {
    /// Band widths of the anchor design.
    pub bands: BandAllocation,
    pub ue: [Vec<UeAux>; N_OPERATORS],
    pub ru: [Vec<RuAux>; N_OPERATORS],
    /// `Σ̃` indexed by the observing CP: the full shared-band covariance of
    /// everything that CP sees.
    pub sigma_tilde: [CMat; N_OPERATORS],
}

impl AuxState {
    pub fn ue(&self, ue: UeId) -> &UeAux {
        &self.ue[ue.op][ue.idx]
    }

    pub fn ru(&self, ru: crate::model::RuId) -> &RuAux {
        &self.ru[ru.op][ru.idx]
    }

    /// Whether `band` of operator `op` was open at the anchor.
    pub fn band_open(&self, op: usize, band: Band) -> bool {
        self.bands.width(op, band) >= MIN_BAND_HZ
    }
}

/// UEs whose shared-band signals make up the columns of `A` for `ue`'s
/// privacy constraint: everything the other CP receives, minus `ue` itself.
pub fn privacy_columns(inst: &Instance, ue: UeId) -> Vec<UeId> {
    Observation::SharedCp(other(ue.op)).transmitters(inst).into_iter().filter(|&l| l != ue).collect()
}

/// `A = [L̃ c_l v_l  …  √N₀ L̃]` over [`privacy_columns`], so that `I + AAᴴ`
/// is the other CP's shared-band covariance without `ue`.
pub fn privacy_matrix(inst: &Instance, design: &DesignPoint, ue: UeId) -> CMat {
    let obs = Observation::SharedCp(other(ue.op));
    let l = obs.quantizer(inst, design);
    let n = l.nrows();
    let cols = privacy_columns(inst, ue);
    let mut a = CMat::zeros(n, cols.len() + n);
    for (j, &u) in cols.iter().enumerate() {
        let col = &l * obs.channel(inst, u) * C64::from(design.power(u, Band::Shared));
        a.set_column(j, &col);
    }
    a.columns_mut(cols.len(), n).copy_from(&(l * C64::from(inst.noise().sqrt())));
    a
}

fn qt_aux(inst: &Instance, design: &DesignPoint, obs: Observation, ue: UeId) -> Result<(f64, CVec)> {
    let v = design.power(ue, obs.band());
    let n = obs.dim(inst);
    if v == 0.0 || n == 0 {
        return Ok((0.0, CVec::zeros(n)));
    }
    let a = obs.quantizer(inst, design) * obs.channel(inst, ue) * C64::from(v);
    let omega = observation_covariance(inst, design, obs, None);
    let z = cholesky(&omega)?.solve(&a);
    let j = observation_covariance(inst, design, obs, Some(ue));
    let kappa = a.dotc(&cholesky(&j)?.solve(&a)).re.max(0.0);
    Ok((kappa, z))
}

/// Closed-form auxiliary variables that make every surrogate tight at
/// `design`.
pub fn update_aux(inst: &Instance, design: &DesignPoint) -> Result<AuxState> {
    let sc = &inst.scenario;
    let eval = Evaluation::compute(inst, design)?;
    let bands = design.bands;
    let gamma = sc.privacy_threshold;
    let w_s = bands.w_shared;

    let mut ue_aux: [Vec<UeAux>; N_OPERATORS] = [Vec::new(), Vec::new()];
    for ue in sc.ues() {
        let (kp, zp) = qt_aux(inst, design, Observation::PrivateCp(ue.op), ue)?;
        let (ks, zs) = qt_aux(inst, design, Observation::SharedCp(ue.op), ue)?;
        let alpha = PerBand::new(eval.f(ue, Band::Private), eval.f(ue, Band::Shared));
        let c_rate = PerBand::new(alpha.private * bands.width(ue.op, Band::Private).sqrt(), alpha.shared * w_s.sqrt());
        let a = privacy_matrix(inst, design, ue);
        let k = &a * a.adjoint();
        let q = a.ncols();
        let z_mat = if q == 0 {
            CMat::zeros(0, a.nrows())
        } else {
            cholesky(&(a.adjoint() * &a + identity(q)))?.solve(&a.adjoint())
        };
        let theta = log2_det_hpd(&(identity(k.nrows()) + &k))?;
        ue_aux[ue.op].push(UeAux {
            kappa: PerBand::new(kp, ks),
            z: PerBand::new(zp, zs),
            c_rate,
            alpha,
            c_hat: if w_s >= MIN_BAND_HZ { gamma.sqrt() / w_s } else { 0.0 },
            beta_var: eval.beta(ue),
            theta,
            k,
            z_mat,
        });
    }

    let mut ru_aux: [Vec<RuAux>; N_OPERATORS] = [Vec::new(), Vec::new()];
    for ru in sc.rus() {
        let sigma =
            Band::ALL.map(|band| observation_covariance(inst, design, Observation::Fronthaul { ru, band }, None));
        let g = PerBand::new(eval.g(ru, Band::Private), eval.g(ru, Band::Shared));
        let w = PerBand::new(bands.width(ru.op, Band::Private), w_s);
        let rho = PerBand::new(w.private * g.private, w.shared * g.shared);
        let ct = |rho: f64, w: f64| if w >= MIN_BAND_HZ { rho.sqrt() / w } else { 0.0 };
        let [sp, ss] = sigma;
        ru_aux[ru.op].push(RuAux {
            sigma: PerBand::new(sp, ss),
            rho,
            rho_tilde: g,
            c_tilde: PerBand::new(ct(rho.private, w.private), ct(rho.shared, w.shared)),
        });
    }

    let sigma_tilde = [0, 1].map(|cp| observation_covariance(inst, design, Observation::SharedCp(cp), None));
    Ok(AuxState { bands, ue: ue_aux, ru: ru_aux, sigma_tilde })
}

#[cfg(test)]
mod tests;
