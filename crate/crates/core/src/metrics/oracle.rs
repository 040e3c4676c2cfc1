//! Monte Carlo mutual-information oracle.
//!
//! Simulates the received and quantized signals sample by sample, forms
//! empirical covariances and evaluates the Gaussian mutual information
//! `log2 det C_yy − log2 det (C_yy − C_yx C_xx⁻¹ C_xy)`. It shares no code
//! with the analytic formulas and is meant for verification only.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{log2_det_hpd, CMat, C64};
use crate::model::{other, Band, Instance, RuId, UeId};

use super::{DesignPoint, Evaluation};

pub const MIN_SAMPLES: usize = 10_000;

/// Which subband to simulate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SimBand {
    Private(usize),
    Shared,
}

/// Empirical second moments of one simulated subband.
#[derive(Clone, Debug)]
pub struct BandSample {
    symbols: Vec<UeId>,
    rus: Vec<RuId>,
    yhat_offset: Vec<usize>,
    /// Covariance of `[s_1 … s_U, ŷ_1 … ŷ_R]`.
    joint: CMat,
    /// Covariance of `[y_r, ŷ_r]` for each RU.
    per_ru: Vec<CMat>,
}

/// Gaussian mutual information in bits between the coordinates `x` and `y`
/// of a (sample) covariance matrix.
pub fn gaussian_mi(cov: &CMat, x: &[usize], y: &[usize]) -> Result<f64> {
    let sub = |rows: &[usize], cols: &[usize]| CMat::from_fn(rows.len(), cols.len(), |a, b| cov[(rows[a], cols[b])]);
    let cyy = sub(y, y);
    let cxx = sub(x, x);
    let cyx = sub(y, x);
    let degenerate = |_| Error::InsufficientSamples("degenerate empirical covariance".into());
    let chx = crate::linalg::cholesky(&cxx).map_err(degenerate)?;
    let cond = &cyy - &cyx * chx.solve(&cyx.adjoint());
    let cond = crate::linalg::hermitian_part(&cond);
    Ok(log2_det_hpd(&cyy).map_err(degenerate)? - log2_det_hpd(&cond).map_err(degenerate)?)
}

fn cn<R: rand::Rng>(rng: &mut R, sd: f64) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(sd * re, sd * im)
}

/// Draws `samples` realizations of every UE symbol, noise and quantization
/// noise on `band` and accumulates the covariances needed for all mutual
/// informations on that band.
pub fn simulate_band(
    inst: &Instance,
    design: &DesignPoint,
    band: SimBand,
    samples: usize,
    seed: u64,
) -> Result<BandSample> {
    if samples < MIN_SAMPLES {
        return Err(Error::InsufficientSamples(format!("{samples} < {MIN_SAMPLES}")));
    }
    let sc = &inst.scenario;
    let (symbols, rus, m): (Vec<UeId>, Vec<RuId>, Band) = match band {
        SimBand::Private(op) => (sc.ues_of(op).collect(), sc.rus_of(op).collect(), Band::Private),
        SimBand::Shared => (sc.ues().collect(), sc.rus().collect(), Band::Shared),
    };
    let ns = symbols.len();
    // per RU: effective channel columns h_{u,r} v_u, quantizer, dims
    let gains: Vec<Vec<Vec<C64>>> = rus
        .iter()
        .map(|&ru| {
            symbols
                .iter()
                .map(|&ue| inst.channels.link(ue, ru).iter().map(|h| h * design.power(ue, m)).collect())
                .collect()
        })
        .collect();
    let dims: Vec<usize> = rus.iter().map(|&ru| sc.antennas(ru)).collect();
    let mut yhat_offset = Vec::with_capacity(rus.len());
    let mut off = ns;
    for &d in &dims {
        yhat_offset.push(off);
        off += d;
    }
    let dj = off;
    let noise_sd = (inst.noise() / 2.0).sqrt();
    let q_sd = (0.5f64).sqrt();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut joint = vec![C64::new(0.0, 0.0); dj * dj];
    let mut per_ru: Vec<Vec<C64>> = dims.iter().map(|d| vec![C64::new(0.0, 0.0); 4 * d * d]).collect();
    let mut xj = vec![C64::new(0.0, 0.0); dj];
    let mut y = vec![C64::new(0.0, 0.0); dims.iter().copied().max().unwrap_or(0)];
    let mut yy = vec![C64::new(0.0, 0.0); 2 * dims.iter().copied().max().unwrap_or(0)];

    for _ in 0..samples {
        for s in xj.iter_mut().take(ns) {
            *s = cn(&mut rng, q_sd);
        }
        for (ri, &ru) in rus.iter().enumerate() {
            let d = dims[ri];
            for a in 0..d {
                let mut acc = cn(&mut rng, noise_sd);
                for u in 0..ns {
                    acc += gains[ri][u][a] * xj[u];
                }
                y[a] = acc;
            }
            let l = design.quantizer(ru, m);
            let o = yhat_offset[ri];
            for a in 0..d {
                let mut acc = cn(&mut rng, q_sd);
                for b in 0..d {
                    acc += l[(a, b)] * y[b];
                }
                xj[o + a] = acc;
            }
            for a in 0..d {
                yy[a] = y[a];
                yy[d + a] = xj[o + a];
            }
            let blk = &mut per_ru[ri];
            let w = 2 * d;
            for a in 0..w {
                for b in a..w {
                    blk[a * w + b] += yy[a] * yy[b].conj();
                }
            }
        }
        for a in 0..dj {
            let xa = xj[a];
            let row = &mut joint[a * dj..(a + 1) * dj];
            for b in a..dj {
                row[b] += xa * xj[b].conj();
            }
        }
    }
    let finish = |acc: &[C64], n: usize| {
        let inv = 1.0 / samples as f64;
        CMat::from_fn(n, n, |a, b| if a <= b { acc[a * n + b] * inv } else { (acc[b * n + a] * inv).conj() })
    };
    Ok(BandSample {
        joint: finish(&joint, dj),
        per_ru: per_ru.iter().zip(&dims).map(|(acc, d)| finish(acc, 2 * d)).collect(),
        symbols,
        rus,
        yhat_offset,
    })
}

impl BandSample {
    fn ru_pos(&self, ru: RuId) -> Result<usize> {
        self.rus
            .iter()
            .position(|&r| r == ru)
            .ok_or_else(|| Error::InvalidDesign(format!("RU {ru:?} is not part of this band")))
    }

    /// Estimated `I(y_r; ŷ_r)`.
    pub fn compression_rate(&self, ru: RuId) -> Result<f64> {
        let cov = &self.per_ru[self.ru_pos(ru)?];
        let d = cov.nrows() / 2;
        let x: Vec<usize> = (0..d).collect();
        let y: Vec<usize> = (d..2 * d).collect();
        gaussian_mi(cov, &x, &y)
    }

    /// Estimated `I(s_ue; [ŷ_r]_{r ∈ rus})`.
    pub fn information(&self, ue: UeId, rus: &[RuId]) -> Result<f64> {
        let s = self
            .symbols
            .iter()
            .position(|&u| u == ue)
            .ok_or_else(|| Error::InvalidDesign(format!("UE {ue:?} does not transmit on this band")))?;
        let mut y = Vec::new();
        for &ru in rus {
            let pos = self.ru_pos(ru)?;
            let start = self.yhat_offset[pos];
            let end = self.yhat_offset.get(pos + 1).copied().unwrap_or(self.joint.nrows());
            y.extend(start..end);
        }
        gaussian_mi(&self.joint, &[s], &y)
    }
}

/// One analytic quantity next to its oracle estimate.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleTerm {
    pub label: String,
    pub analytic: f64,
    pub oracle: f64,
}

impl OracleTerm {
    pub fn abs_error(&self) -> f64 {
        (self.analytic - self.oracle).abs()
    }

    pub fn rel_error(&self) -> f64 {
        self.abs_error() / self.analytic.abs().max(self.oracle.abs()).max(1e-12)
    }
}

/// Covariance of the quantized observation of `rus` on `band` with the
/// signals of `ues` (minus `skip`), assembled link by link:
/// `L (Σ h hᴴ v² + N₀ I) Lᴴ + I`.
pub fn assembled_covariance(
    inst: &Instance,
    design: &DesignPoint,
    rus: &[RuId],
    band: Band,
    ues: &[UeId],
    skip: Option<UeId>,
) -> CMat {
    let dims: Vec<usize> = rus.iter().map(|&r| inst.scenario.antennas(r)).collect();
    let n: usize = dims.iter().sum();
    let mut l = CMat::zeros(n, n);
    let mut o = 0;
    for (&ru, &dim) in rus.iter().zip(&dims) {
        l.view_mut((o, o), (dim, dim)).copy_from(design.quantizer(ru, band));
        o += dim;
    }
    let mut rx = CMat::identity(n, n) * C64::from(inst.noise());
    for &ue in ues {
        if Some(ue) == skip {
            continue;
        }
        let mut h = CMat::zeros(n, 1);
        let mut o = 0;
        for (&ru, &dim) in rus.iter().zip(&dims) {
            h.view_mut((o, 0), (dim, 1)).copy_from(inst.channels.link(ue, ru));
            o += dim;
        }
        let v = design.power(ue, band);
        rx += &h * h.adjoint() * C64::from(v * v);
    }
    &l * rx * l.adjoint() + CMat::identity(n, n)
}

/// `log2 det` through the eigenvalues, avoiding the Cholesky path used by the
/// analytic formulas.
fn log2_det_eig(m: &CMat) -> f64 {
    m.clone().symmetric_eigenvalues().iter().map(|x| x.log2()).sum()
}

fn det_ratio(inst: &Instance, design: &DesignPoint, rus: &[RuId], band: Band, ues: &[UeId], ue: UeId) -> f64 {
    log2_det_eig(&assembled_covariance(inst, design, rus, band, ues, None))
        - log2_det_eig(&assembled_covariance(inst, design, rus, band, ues, Some(ue)))
}

/// Every compression rate, SUD rate and leakage of `design`, next to the same
/// quantity evaluated as a determinant ratio of covariances assembled from
/// the per-link channels.
pub fn det_ratio_terms(inst: &Instance, design: &DesignPoint) -> Result<Vec<OracleTerm>> {
    let sc = &inst.scenario;
    let eval = Evaluation::compute(inst, design)?;
    let all: Vec<UeId> = sc.ues().collect();
    let mut out = Vec::new();
    for ru in sc.rus() {
        let own: Vec<UeId> = sc.ues_of(ru.op).collect();
        let label = |b: &str| format!("g[{}][{}][{b}]", ru.op, ru.idx);
        let oracle = log2_det_eig(&assembled_covariance(inst, design, &[ru], Band::Private, &own, None));
        out.push(OracleTerm { label: label("private"), analytic: eval.g(ru, Band::Private), oracle });
        let oracle = log2_det_eig(&assembled_covariance(inst, design, &[ru], Band::Shared, &all, None));
        out.push(OracleTerm { label: label("shared"), analytic: eval.g(ru, Band::Shared), oracle });
    }
    for ue in sc.ues() {
        let own: Vec<UeId> = sc.ues_of(ue.op).collect();
        let label = |q: &str| format!("{q}[{}][{}]", ue.op, ue.idx);
        let prus: Vec<RuId> = sc.rus_of(ue.op).collect();
        out.push(OracleTerm {
            label: label("f_private"),
            analytic: eval.f(ue, Band::Private),
            oracle: det_ratio(inst, design, &prus, Band::Private, &own, ue),
        });
        out.push(OracleTerm {
            label: label("f_shared"),
            analytic: eval.f(ue, Band::Shared),
            oracle: det_ratio(inst, design, &inst.channels.shared_stack_rus(ue.op), Band::Shared, &all, ue),
        });
        out.push(OracleTerm {
            label: label("beta"),
            analytic: eval.beta(ue),
            oracle: det_ratio(inst, design, &inst.channels.shared_stack_rus(other(ue.op)), Band::Shared, &all, ue),
        });
    }
    Ok(out)
}

/// The quantities of [`det_ratio_terms`], estimated by simulating `samples`
/// channel uses of each subband.
pub fn sampled_terms(inst: &Instance, design: &DesignPoint, samples: usize, seed: u64) -> Result<Vec<OracleTerm>> {
    let sc = &inst.scenario;
    let eval = Evaluation::compute(inst, design)?;
    let private =
        [0, 1].map(|op| simulate_band(inst, design, SimBand::Private(op), samples, seed.wrapping_add(op as u64)));
    let [p0, p1] = private;
    let private = [p0?, p1?];
    let shared = simulate_band(inst, design, SimBand::Shared, samples, seed.wrapping_add(2))?;
    let mut out = Vec::new();
    for ru in sc.rus() {
        let label = |b: &str| format!("g[{}][{}][{b}]", ru.op, ru.idx);
        out.push(OracleTerm {
            label: label("private"),
            analytic: eval.g(ru, Band::Private),
            oracle: private[ru.op].compression_rate(ru)?,
        });
        out.push(OracleTerm {
            label: label("shared"),
            analytic: eval.g(ru, Band::Shared),
            oracle: shared.compression_rate(ru)?,
        });
    }
    for ue in sc.ues() {
        let label = |q: &str| format!("{q}[{}][{}]", ue.op, ue.idx);
        let prus: Vec<RuId> = sc.rus_of(ue.op).collect();
        out.push(OracleTerm {
            label: label("f_private"),
            analytic: eval.f(ue, Band::Private),
            oracle: private[ue.op].information(ue, &prus)?,
        });
        out.push(OracleTerm {
            label: label("f_shared"),
            analytic: eval.f(ue, Band::Shared),
            oracle: shared.information(ue, &inst.channels.shared_stack_rus(ue.op))?,
        });
        out.push(OracleTerm {
            label: label("beta"),
            analytic: eval.beta(ue),
            oracle: shared.information(ue, &inst.channels.shared_stack_rus(other(ue.op)))?,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Scenario;

    #[test]
    fn rejects_small_sample_counts() {
        let inst = Instance::generate(Scenario::symmetric(1, 1, 1, 1.0, 1.0, 1.0, 0.0, 0.0, 0), 1).unwrap();
        let d = DesignPoint::uniform(&inst.scenario, crate::model::BandAllocation::thirds(1.0), 1.0, 1.0);
        assert!(matches!(simulate_band(&inst, &d, SimBand::Shared, 100, 0), Err(Error::InsufficientSamples(_))));
    }

    #[test]
    fn gaussian_mi_of_known_covariance() {
        // y = x + n with unit variances: I = log2(2)
        let cov = CMat::from_row_slice(
            2,
            2,
            &[C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(2.0, 0.0)],
        );
        assert!((gaussian_mi(&cov, &[0], &[1]).unwrap() - 1.0).abs() < 1e-12);
    }
}
