//! Literal evaluation of the surrogate constraints at a design, with the
//! auxiliary variables held fixed.

use std::fmt;

use super::{privacy_matrix, AuxState, MIN_BAND_HZ};
use crate::error::Result;
use crate::linalg::{cholesky, identity, log2_det_hpd, trace_re, CMat, LN2};
use crate::metrics::{observation_covariance, DesignPoint, Evaluation, Observation};
use crate::model::{other, Band, Instance, RuId, UeId};

/// Which original constraint a surrogate stands in for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Origin {
    PrivateRate,
    SharedRate,
    Fronthaul,
    Backhaul,
    Privacy,
    Power,
    Bandwidth,
}

impl Origin {
    pub fn as_str(&self) -> &'static str {
        match self {
            Origin::PrivateRate => "private-rate",
            Origin::SharedRate => "shared-rate",
            Origin::Fronthaul => "fronthaul",
            Origin::Backhaul => "backhaul",
            Origin::Privacy => "privacy",
            Origin::Power => "power",
            Origin::Bandwidth => "bandwidth",
        }
    }

    pub(crate) fn rate(band: Band) -> Self {
        match band {
            Band::Private => Origin::PrivateRate,
            Band::Shared => Origin::SharedRate,
        }
    }
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `Minorant`: the surrogate never exceeds the original quantity (rate-type
/// bounds). `Majorant`: it never falls below it (usage-type bounds).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Minorant,
    Majorant,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SurrogateTerm {
    pub origin: Origin,
    pub label: String,
    pub direction: Direction,
    pub surrogate: f64,
    pub original: f64,
    /// Natural magnitude of the quantity (1 for bits/s/Hz, the total band
    /// width for bits/s), used as a floor when forming relative gaps.
    pub scale: f64,
}

impl SurrogateTerm {
    fn denominator(&self) -> f64 {
        self.original.abs().max(self.surrogate.abs()).max(1e-6 * self.scale)
    }

    pub fn relative_gap(&self) -> f64 {
        (self.surrogate - self.original).abs() / self.denominator()
    }

    /// Whether the bound points the right way, up to `rel_tol`.
    pub fn holds(&self, rel_tol: f64) -> bool {
        let slack = rel_tol * self.denominator();
        match self.direction {
            Direction::Minorant => self.surrogate <= self.original + slack,
            Direction::Majorant => self.surrogate >= self.original - slack,
        }
    }
}

/// Reading of the sign in the shared-band product bound `2c̃√ρ ∓ c̃²W_S`
/// behind the backhaul surrogate. Only `Minus` gives a valid bound; `Plus`
/// exists so the self-checks can demonstrate that they catch it.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ProductSign {
    #[default]
    Minus,
    Plus,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SurrogateOptions {
    pub backhaul_product_sign: ProductSign,
}

/// Quadratic-transform lower bound on `f` for fixed `(κ, z)`, in bits/s/Hz:
/// `[ln(1+κ) − κ + (1+κ)(2 Re(aᴴz) − zᴴΩz)] / ln 2` with `a = L h v` and
/// `Ω` the full covariance of the observation.
pub fn quadratic_transform_bound(inst: &Instance, design: &DesignPoint, aux: &AuxState, ue: UeId, band: Band) -> f64 {
    let obs = match band {
        Band::Private => Observation::PrivateCp(ue.op),
        Band::Shared => Observation::SharedCp(ue.op),
    };
    let ua = aux.ue(ue);
    let kappa = *ua.kappa.get(band);
    let z = ua.z.get(band);
    if z.is_empty() {
        return 0.0;
    }
    let a = obs.quantizer(inst, design) * obs.channel(inst, ue) * crate::linalg::C64::from(design.power(ue, band));
    let omega = observation_covariance(inst, design, obs, None);
    let quad = z.dotc(&(&omega * z)).re;
    ((1.0 + kappa).ln() - kappa + (1.0 + kappa) * (2.0 * a.dotc(z).re - quad)) / LN2
}

/// Fenchel upper bound `log2 det Σ + (tr(Σ⁻¹X) − n) / ln 2 ≥ log2 det X`.
pub fn fenchel_bound(sigma: &CMat, x: &CMat) -> Result<f64> {
    let n = sigma.nrows();
    if n == 0 {
        return Ok(0.0);
    }
    let ch = cholesky(sigma)?;
    let tr = trace_re(&ch.solve(x));
    Ok(crate::linalg::log2_det_from_cholesky(&ch) + (tr - n as f64) / LN2)
}

/// Matrix quadratic-transform lower bound on `log2 det(I + AAᴴ)`:
/// `[ln det(I+K) − tr K + 2 Re tr((I+K)AZ) − tr((I+K)Zᴴ(AᴴA+I)Z)] / ln 2`.
pub fn matrix_transform_bound(k: &CMat, z: &CMat, a: &CMat) -> Result<f64> {
    let n = k.nrows();
    if n == 0 {
        return Ok(0.0);
    }
    let ik = identity(n) + k;
    let lndet = log2_det_hpd(&ik)? * LN2;
    let az = a * z;
    let inner = z.adjoint() * (a.adjoint() * a + identity(a.ncols())) * z;
    Ok((lndet - trace_re(k) + 2.0 * trace_re(&(&ik * az)) - trace_re(&(&ik * inner))) / LN2)
}

/// Smallest `ρ` with `2c̃√ρ − s·c̃²W ≥ t`, i.e. the usage a product bound
/// charges for a per-Hz value `t` (`s = +1` for `Minus`, `−1` for `Plus`).
fn product_usage(t: f64, c: f64, w: f64, sign: ProductSign) -> f64 {
    let offset = match sign {
        ProductSign::Minus => c * c * w,
        ProductSign::Plus => -c * c * w,
    };
    if c == 0.0 {
        return if t + offset <= 0.0 { 0.0 } else { f64::INFINITY };
    }
    let root = ((t + offset) / (2.0 * c)).max(0.0);
    root * root
}

/// Every surrogate of the current aux state evaluated at `design`, next to
/// the original quantity it bounds. At the anchor design each pair agrees;
/// elsewhere each surrogate errs on the safe side given by its direction.
pub fn evaluate_surrogates(
    inst: &Instance,
    aux: &AuxState,
    design: &DesignPoint,
    opts: SurrogateOptions,
) -> Result<Vec<SurrogateTerm>> {
    let sc = &inst.scenario;
    let eval = Evaluation::compute(inst, design)?;
    let total = sc.total_bandwidth;
    let mut terms = Vec::new();
    let mut push = |origin, label: String, direction, surrogate, original, scale| {
        terms.push(SurrogateTerm { origin, label, direction, surrogate, original, scale })
    };

    for ue in sc.ues() {
        for band in Band::ALL {
            if !aux.band_open(ue.op, band) {
                continue;
            }
            let tag = band_name(band);
            let qt = quadratic_transform_bound(inst, design, aux, ue, band);
            let f = eval.f(ue, band);
            push(Origin::rate(band), format!("qt[{}][{}][{tag}]", ue.op, ue.idx), Direction::Minorant, qt, f, 1.0);
            let w = design.bands.width(ue.op, band);
            let c = *aux.ue(ue).c_rate.get(band);
            if qt > 0.0 && c > 0.0 {
                let bound = 2.0 * c * w.sqrt() - c * c / qt;
                push(
                    Origin::rate(band),
                    format!("rate[{}][{}][{tag}]", ue.op, ue.idx),
                    Direction::Minorant,
                    bound,
                    w * f,
                    total,
                );
            }
        }
    }

    let fen = |ru: RuId, band: Band| -> Result<f64> {
        let x = observation_covariance(inst, design, Observation::Fronthaul { ru, band }, None);
        fenchel_bound(aux.ru(ru).sigma.get(band), &x)
    };
    for ru in sc.rus() {
        let mut usage = 0.0;
        let mut original = 0.0;
        for band in Band::ALL {
            if !aux.band_open(ru.op, band) {
                continue;
            }
            let tag = band_name(band);
            let bound = fen(ru, band)?;
            let g = eval.g(ru, band);
            push(
                Origin::Fronthaul,
                format!("fenchel[{}][{}][{tag}]", ru.op, ru.idx),
                Direction::Majorant,
                bound,
                g,
                1.0,
            );
            let w = design.bands.width(ru.op, band);
            usage += product_usage(bound, *aux.ru(ru).c_tilde.get(band), w, ProductSign::Minus);
            original += w * g;
        }
        push(
            Origin::Fronthaul,
            format!("fronthaul[{}][{}]", ru.op, ru.idx),
            Direction::Majorant,
            usage,
            original,
            total,
        );
    }

    for op in 0..2 {
        let subset = inst.channels.subset(op);
        if subset.is_empty() || !aux.band_open(op, Band::Shared) {
            continue;
        }
        let w = design.bands.w_shared;
        let mut usage = 0.0;
        let mut original = 0.0;
        for &r in subset {
            let ru = RuId { op, idx: r };
            usage += product_usage(fen(ru, Band::Shared)?, aux.ru(ru).c_tilde.shared, w, opts.backhaul_product_sign);
            original += w * eval.g(ru, Band::Shared);
        }
        push(Origin::Backhaul, format!("backhaul[{op}]"), Direction::Majorant, usage, original, total);
    }

    let gamma = sc.privacy_threshold;
    for ue in sc.ues() {
        if !aux.band_open(ue.op, Band::Shared) {
            continue;
        }
        let cp = other(ue.op);
        let full = observation_covariance(inst, design, Observation::SharedCp(cp), None);
        let first = fenchel_bound(&aux.sigma_tilde[cp], &full)?;
        let ua = aux.ue(ue);
        let second = matrix_transform_bound(&ua.k, &ua.z_mat, &privacy_matrix(inst, design, ue))?;
        push(
            Origin::Privacy,
            format!("leakage[{}][{}]", ue.op, ue.idx),
            Direction::Majorant,
            first - second,
            eval.beta(ue),
            1.0,
        );
        let w = design.bands.w_shared;
        if w >= MIN_BAND_HZ {
            let cap = 2.0 * ua.c_hat * gamma.sqrt() - ua.c_hat * ua.c_hat * w;
            push(Origin::Privacy, format!("privacy[{}][{}]", ue.op, ue.idx), Direction::Minorant, cap, gamma / w, 1.0);
        }
    }
    Ok(terms)
}

pub(crate) fn band_name(band: Band) -> &'static str {
    match band {
        Band::Private => "private",
        Band::Shared => "shared",
    }
}
