//! Assembly of the convex block subproblems.
//!
//! With the auxiliary variables fixed, the scalar product-bound auxiliaries
//! (`c`, `c̃`, `ĉ`) and the budget variables (`α`, `ρ`, `ρ̃`, `β`, `θ`) can be
//! maximized out of each block in closed form: `sup_c 2c√W − c²/α = Wα`,
//! `sup_c̃ 2c̃√ρ − c̃²W = ρ/W`, `sup_ĉ 2ĉ√Γ − ĉ²W_S = Γ/W_S`. Within a block
//! the band widths are either the variables themselves or fixed, so every
//! block reduces to a concave quadratic objective under convex quadratic
//! constraints in the block variables alone:
//!
//! * bands: a linear program in `(W_P,1, W_P,2)` with `W_S = W − W_P,1 − W_P,2`;
//! * power: quadratics in the amplitudes `v` (allowed to go negative inside
//!   the solve, only `|v|` matters);
//! * quantizers: quadratics in the real and imaginary parts of every entry.
//!
//! Taking the supremum over an auxiliary can only enlarge the feasible set
//! of the block, and every point of the enlarged set still satisfies the
//! original constraints, so the outer loop stays monotone and feasible.
//!
//! Capacities are normalized to 1, bandwidths to fractions of `W`, powers to
//! `√P_max`, and quantizer entries to the current per-RU magnitude.

use std::collections::HashMap;

use nalgebra::DVector;

use super::expr::AffineExpr;
use super::surrogate::{band_name, Origin};
use super::{privacy_columns, AuxState, MIN_BAND_HZ};
use crate::error::Result;
use crate::linalg::{block_diag, cholesky, identity, inv_lower_factor, log2_det_hpd, trace_re, CMat, C64, LN2};
use crate::metrics::{DesignPoint, Observation};
use crate::model::{other, Band, BandAllocation, Instance, RuId, UeId, N_OPERATORS};
use crate::subsolver::{Constraint, ConvexFn, ConvexSubproblem};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Block {
    Bands,
    Power,
    Quantizer,
}

impl Block {
    pub fn as_str(&self) -> &'static str {
        match self {
            Block::Bands => "bands",
            Block::Power => "power",
            Block::Quantizer => "quantizer",
        }
    }
}

/// Which band widths a scheme lets the bands block move.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BandFreedom {
    Fixed,
    /// `W_S = 0`, `W_P,1` free, `W_P,2 = W − W_P,1`.
    PrivateOnly,
    /// `W_P,1` and `W_P,2` free, `W_S` takes the rest.
    Full,
}

/// Variables a scheme holds fixed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Freeze {
    pub bands: BandFreedom,
    /// Shared-band powers and quantizers.
    pub shared: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LoweringOptions {
    /// Relative slack added to every normalized bound so the warm start is
    /// strictly interior even where a constraint is active.
    pub relax: f64,
}

impl Default for LoweringOptions {
    fn default() -> Self {
        Self { relax: 1e-9 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Var {
    Width(usize),
    Power(UeId, Band),
    Entry { ru: RuId, band: Band, row: usize, col: usize, imag: bool },
}

/// A convex block subproblem together with the map back to design variables.
#[derive(Clone, Debug)]
pub struct SurrogateSystem {
    pub block: Block,
    pub problem: ConvexSubproblem,
    pub warm_start: DVector<f64>,
    /// Tag of each constraint, aligned with `problem.constraints`.
    pub origins: Vec<Origin>,
    vars: Vec<Var>,
    scales: Vec<f64>,
    freedom: BandFreedom,
}

impl SurrogateSystem {
    pub fn constraints(&self) -> impl Iterator<Item = (Origin, &Constraint)> {
        self.origins.iter().copied().zip(&self.problem.constraints)
    }

    /// Block variables of `design` in this system's coordinates (the inverse
    /// of [`SurrogateSystem::apply`] up to clamping).
    pub fn encode(&self, inst: &Instance, design: &DesignPoint) -> DVector<f64> {
        let total = inst.scenario.total_bandwidth;
        DVector::from_iterator(
            self.vars.len(),
            self.vars.iter().zip(&self.scales).map(|(var, &s)| match *var {
                Var::Width(i) => design.bands.w_private[i] / total,
                Var::Power(ue, band) => design.power(ue, band) / s,
                Var::Entry { ru, band, row, col, imag } => {
                    let e = design.quantizer(ru, band)[(row, col)];
                    (if imag { e.im } else { e.re }) / s
                }
            }),
        )
    }

    /// Writes the block variables `x` into a copy of `design`. Rates are left
    /// untouched; callers re-tighten them.
    pub fn apply(&self, inst: &Instance, design: &DesignPoint, x: &DVector<f64>) -> DesignPoint {
        let mut d = design.clone();
        let total = inst.scenario.total_bandwidth;
        let vmax = inst.scenario.p_max.sqrt();
        if self.block == Block::Bands {
            d.bands = widths_from(self.freedom, x, total);
            return d;
        }
        for ((var, &s), &xi) in self.vars.iter().zip(&self.scales).zip(x.iter()) {
            match *var {
                Var::Power(ue, band) => d.set_power(ue, band, (xi * s).abs().min(vmax)),
                Var::Entry { ru, band, row, col, imag } => {
                    let e = &mut d.quantizer_mut(ru, band)[(row, col)];
                    if imag {
                        e.im = xi * s;
                    } else {
                        e.re = xi * s;
                    }
                }
                Var::Width(_) => unreachable!("width variables only appear in the bands block"),
            }
        }
        d
    }
}

fn widths_from(freedom: BandFreedom, x: &DVector<f64>, total: f64) -> BandAllocation {
    let (mut p1, mut p2) = match freedom {
        BandFreedom::Full => (x[0], x[1]),
        BandFreedom::PrivateOnly => (x[0], 1.0 - x[0]),
        BandFreedom::Fixed => unreachable!("no bands block for fixed widths"),
    };
    p1 = p1.max(0.0);
    p2 = p2.max(0.0);
    let sum = p1 + p2;
    if sum > 1.0 || freedom == BandFreedom::PrivateOnly {
        p1 /= sum;
        p2 /= sum;
    }
    let shared = if freedom == BandFreedom::Full { (1.0 - p1 - p2).max(0.0) } else { 0.0 };
    BandAllocation::new(p1 * total, p2 * total, shared * total)
}

/// Builds the convex subproblem for `block` around the anchor `design`
/// (which `aux` must have been computed from).
pub fn build_surrogates(
    inst: &Instance,
    design: &DesignPoint,
    aux: &AuxState,
    block: Block,
    freeze: Freeze,
    opts: LoweringOptions,
) -> Result<SurrogateSystem> {
    match block {
        Block::Bands => lower_bands(inst, aux, freeze.bands, opts),
        Block::Power | Block::Quantizer => Lowering::new(inst, design, aux, block, freeze).build(opts),
    }
}

struct Problem {
    p: ConvexSubproblem,
    origins: Vec<Origin>,
    warm: DVector<f64>,
    relax: f64,
}

impl Problem {
    fn new(names: Vec<String>, warm: DVector<f64>, relax: f64) -> Self {
        Self { p: ConvexSubproblem::new(names), origins: Vec::new(), warm, relax }
    }

    /// Adds `f(x) ≤ nominal`, loosened so that the warm start is strictly
    /// inside. Functions that do not depend on `x` are dropped.
    fn push(&mut self, origin: Origin, label: String, function: ConvexFn, nominal: f64) {
        if function.is_constant() {
            return;
        }
        let at_warm = function.value(&self.warm);
        let bound = nominal.max(at_warm) + self.relax * nominal.abs().max(1.0);
        self.p.constraints.push(Constraint { label, tag: origin.as_str().into(), function, bound });
        self.origins.push(origin);
    }

    fn finish(self, block: Block, vars: Vec<Var>, scales: Vec<f64>, freedom: BandFreedom) -> SurrogateSystem {
        SurrogateSystem { block, problem: self.p, warm_start: self.warm, origins: self.origins, vars, scales, freedom }
    }
}

fn lower_bands(
    inst: &Instance,
    aux: &AuxState,
    freedom: BandFreedom,
    opts: LoweringOptions,
) -> Result<SurrogateSystem> {
    let sc = &inst.scenario;
    let total = sc.total_bandwidth;
    let b = &aux.bands;
    // each width as (coefficients, constant) in fractions of W
    let (names, warm, widths): (Vec<String>, Vec<f64>, [(Vec<f64>, f64); 3]) = match freedom {
        BandFreedom::Full => (
            vec!["w_p1".into(), "w_p2".into()],
            vec![b.w_private[0] / total, b.w_private[1] / total],
            [(vec![1.0, 0.0], 0.0), (vec![0.0, 1.0], 0.0), (vec![-1.0, -1.0], 1.0)],
        ),
        BandFreedom::PrivateOnly => {
            (vec!["w_p1".into()], vec![b.w_private[0] / total], [(vec![1.0], 0.0), (vec![-1.0], 1.0), (vec![0.0], 0.0)])
        }
        BandFreedom::Fixed => {
            return Err(crate::Error::InvalidDesign("bands block requested with fixed band widths".into()))
        }
    };
    let n = names.len();
    let width = |op: usize, band: Band| -> ConvexFn {
        let (c, k) = match band {
            Band::Private => &widths[op],
            Band::Shared => &widths[2],
        };
        ConvexFn::affine(DVector::from_column_slice(c), *k)
    };
    let mut pb = Problem::new(names, DVector::from_vec(warm), opts.relax);

    let mut cost = ConvexFn::zero(n);
    for ue in sc.ues() {
        for band in Band::ALL {
            cost.add_scaled(&width(ue.op, band), -aux.ue(ue).alpha.get(band));
        }
    }
    pb.p.cost = cost;

    for ru in sc.rus() {
        let cap = sc.fronthaul_capacity[ru.op][ru.idx];
        if !cap.is_finite() {
            continue;
        }
        let g = &aux.ru(ru).rho_tilde;
        let mut f = width(ru.op, Band::Private).scaled(g.private * total / cap);
        f.add_scaled(&width(ru.op, Band::Shared), g.shared * total / cap);
        pb.push(Origin::Fronthaul, format!("fronthaul[{}][{}]", ru.op, ru.idx), f, 1.0);
    }
    for op in 0..N_OPERATORS {
        let load: f64 = inst.channels.subset(op).iter().map(|&r| aux.ru[op][r].rho_tilde.shared).sum();
        if sc.backhaul_capacity[op].is_finite() {
            let f = width(op, Band::Shared).scaled(load * total / sc.backhaul_capacity[op]);
            pb.push(Origin::Backhaul, format!("backhaul[{op}]"), f, 1.0);
        }
    }
    let gamma = sc.privacy_threshold;
    if gamma > 0.0 {
        for ue in sc.ues() {
            let f = width(ue.op, Band::Shared).scaled(aux.ue(ue).beta_var * total / gamma);
            pb.push(Origin::Privacy, format!("privacy[{}][{}]", ue.op, ue.idx), f, 1.0);
        }
    }
    let labels = ["w_p1", "w_p2", "w_s"];
    for (i, label) in labels.iter().enumerate() {
        let band = if i == 2 { Band::Shared } else { Band::Private };
        let f = width(i.min(1), band).scaled(-1.0);
        pb.push(Origin::Bandwidth, format!("nonneg[{label}]"), f, 0.0);
    }
    let vars = (0..n).map(Var::Width).collect();
    Ok(pb.finish(Block::Bands, vars, vec![1.0; n], freedom))
}

/// Builder for the power and quantizer blocks.
struct Lowering<'a> {
    inst: &'a Instance,
    design: &'a DesignPoint,
    aux: &'a AuxState,
    block: Block,
    vars: Vec<Var>,
    names: Vec<String>,
    scales: Vec<f64>,
    warm: Vec<f64>,
    power_idx: HashMap<(UeId, Band), usize>,
    /// First variable of each free quantizer; entry `(a, b)` of an `n×n`
    /// block sits at `base + 2(a + b n)` (real) and the next index (imag).
    quant_idx: HashMap<(RuId, Band), usize>,
}

impl<'a> Lowering<'a> {
    fn new(inst: &'a Instance, design: &'a DesignPoint, aux: &'a AuxState, block: Block, freeze: Freeze) -> Self {
        let mut s = Self {
            inst,
            design,
            aux,
            block,
            vars: Vec::new(),
            names: Vec::new(),
            scales: Vec::new(),
            warm: Vec::new(),
            power_idx: HashMap::new(),
            quant_idx: HashMap::new(),
        };
        let free = |op: usize, band: Band| aux.band_open(op, band) && !(band == Band::Shared && freeze.shared);
        let sc = &inst.scenario;
        match block {
            Block::Power => {
                let vs = sc.p_max.sqrt();
                for ue in sc.ues() {
                    for band in Band::ALL {
                        if free(ue.op, band) {
                            s.power_idx.insert((ue, band), s.vars.len());
                            s.names.push(format!("v[{}][{}][{}]", ue.op, ue.idx, band_name(band)));
                            s.vars.push(Var::Power(ue, band));
                            s.scales.push(vs);
                            s.warm.push(design.power(ue, band) / vs);
                        }
                    }
                }
            }
            Block::Quantizer => {
                for ru in sc.rus() {
                    for band in Band::ALL {
                        if !free(ru.op, band) {
                            continue;
                        }
                        let l = design.quantizer(ru, band);
                        let n = l.nrows();
                        let scale = (l.norm() / (n as f64).sqrt()).max(1e-3);
                        s.quant_idx.insert((ru, band), s.vars.len());
                        for col in 0..n {
                            for row in 0..n {
                                for imag in [false, true] {
                                    let part = if imag { "im" } else { "re" };
                                    s.names.push(format!(
                                        "L[{}][{}][{}][{row},{col}].{part}",
                                        ru.op,
                                        ru.idx,
                                        band_name(band)
                                    ));
                                    s.vars.push(Var::Entry { ru, band, row, col, imag });
                                    s.scales.push(scale);
                                    let e = l[(row, col)];
                                    s.warm.push(if imag { e.im } else { e.re } / scale);
                                }
                            }
                        }
                    }
                }
            }
            Block::Bands => unreachable!(),
        }
        s
    }

    fn n_vars(&self) -> usize {
        self.vars.len()
    }

    /// `vec(P · L̃ · R) · v_ue` over the block diagonal of the quantizers of
    /// `rus` on `band`, as an affine function of the block variables (column
    /// major). `ue = None` means no power factor.
    fn expr(&self, p: &CMat, rus: &[RuId], band: Band, right: &CMat, ue: Option<UeId>) -> AffineExpr {
        let rows = p.nrows();
        let cols = right.ncols();
        let mut e = AffineExpr::zeros(rows * cols, self.n_vars());
        let v = ue.map_or(1.0, |u| self.design.power(u, band));
        match self.block {
            Block::Power => {
                let blocks: Vec<&CMat> = rus.iter().map(|&r| self.design.quantizer(r, band)).collect();
                let m = p * block_diag(&blocks) * right;
                let flat = CMat::from_column_slice(rows * cols, 1, m.as_slice());
                match ue.and_then(|u| self.power_idx.get(&(u, band))) {
                    Some(&j) => e.coeffs.set_column(j, &(flat.column(0) * C64::from(self.scales[j]))),
                    None => e.constant = flat.column(0) * C64::from(v),
                }
            }
            Block::Quantizer => {
                let mut o = 0;
                for &ru in rus {
                    let l = self.design.quantizer(ru, band);
                    let d = l.nrows();
                    let pb = p.columns(o, d);
                    let rb = right.rows(o, d);
                    match self.quant_idx.get(&(ru, band)) {
                        Some(&base) => {
                            let s = C64::from(self.scales[base] * v);
                            for b in 0..d {
                                for a in 0..d {
                                    let j = base + 2 * (a + b * d);
                                    for cc in 0..cols {
                                        let r = rb[(b, cc)] * s;
                                        for pp in 0..rows {
                                            let coef = pb[(pp, a)] * r;
                                            e.coeffs[(pp + cc * rows, j)] += coef;
                                            e.coeffs[(pp + cc * rows, j + 1)] += coef * C64::i();
                                        }
                                    }
                                }
                            }
                        }
                        None => {
                            let m = pb * l * rb * C64::from(v);
                            for cc in 0..cols {
                                for pp in 0..rows {
                                    e.constant[pp + cc * rows] += m[(pp, cc)];
                                }
                            }
                        }
                    }
                    o += d;
                }
            }
            Block::Bands => unreachable!(),
        }
        e
    }

    fn column(v: &crate::linalg::CVec) -> CMat {
        CMat::from_column_slice(v.len(), 1, v.as_slice())
    }

    /// `−QT` for `ue` on `band`, in bits/s/Hz.
    fn neg_quadratic_transform(&self, ue: UeId, band: Band) -> ConvexFn {
        let obs = match band {
            Band::Private => Observation::PrivateCp(ue.op),
            Band::Shared => Observation::SharedCp(ue.op),
        };
        let ua = self.aux.ue(ue);
        let kappa = *ua.kappa.get(band);
        let z = ua.z.get(band);
        let n = self.n_vars();
        if z.is_empty() {
            return ConvexFn::zero(n);
        }
        let rus = obs.rus(self.inst);
        let zr = CMat::from_row_slice(1, z.len(), z.adjoint().as_slice());
        let w = (1.0 + kappa) / LN2;
        let mut f = ConvexFn::zero(n);
        f.constant = -((1.0 + kappa).ln() - kappa - (1.0 + kappa) * z.norm_squared()) / LN2;
        let lin = self.expr(&zr, &rus, band, &Self::column(obs.channel(self.inst, ue)), Some(ue));
        f.add_scaled(&lin.real_part(), -2.0 * w);
        for l in obs.transmitters(self.inst) {
            let e = self.expr(&zr, &rus, band, &Self::column(obs.channel(self.inst, l)), Some(l));
            f.add_scaled(&e.norm_sqr(), w);
        }
        let dim = z.len();
        let noise = self.expr(&zr, &rus, band, &(identity(dim) * C64::from(self.inst.noise().sqrt())), None);
        f.add_scaled(&noise.norm_sqr(), w);
        f
    }

    /// Fenchel majorant of `log2 det` of `obs`'s covariance around `sigma`.
    fn fenchel(&self, obs: Observation, sigma: &CMat) -> Result<ConvexFn> {
        let n = self.n_vars();
        let dim = sigma.nrows();
        let mut f = ConvexFn::zero(n);
        if dim == 0 {
            return Ok(f);
        }
        let band = obs.band();
        let rus = obs.rus(self.inst);
        let u_inv = inv_lower_factor(sigma)?;
        f.constant = log2_det_hpd(sigma)? + (u_inv.norm_squared() - dim as f64) / LN2;
        for l in obs.transmitters(self.inst) {
            let e = self.expr(&u_inv, &rus, band, &Self::column(obs.channel(self.inst, l)), Some(l));
            f.add_scaled(&e.norm_sqr(), 1.0 / LN2);
        }
        let noise = self.expr(&u_inv, &rus, band, &(identity(dim) * C64::from(self.inst.noise().sqrt())), None);
        f.add_scaled(&noise.norm_sqr(), 1.0 / LN2);
        Ok(f)
    }

    /// `−(matrix quadratic-transform minorant)` of the leave-`ue`-out
    /// log-determinant of the other CP's shared-band covariance.
    fn neg_matrix_transform(&self, ue: UeId) -> Result<ConvexFn> {
        let n = self.n_vars();
        let obs = Observation::SharedCp(other(ue.op));
        let rus = obs.rus(self.inst);
        let dim = obs.dim(self.inst);
        let mut f = ConvexFn::zero(n);
        if dim == 0 {
            return Ok(f);
        }
        let ua = self.aux.ue(ue);
        let cols = privacy_columns(self.inst, ue);
        let ik = identity(dim) + &ua.k;
        let r = cholesky(&ik)?.l();
        let z = &ua.z_mat;
        let zr = z * &r;
        let sqrt_n0 = C64::from(self.inst.noise().sqrt());

        // tr((I+K) A Z) and A Z R, column by column of A
        let mut lin = AffineExpr::zeros(1, n);
        let mut azr = AffineExpr::zeros(dim * dim, n);
        for (j, &l) in cols.iter().enumerate() {
            let c = Self::column(obs.channel(self.inst, l));
            let zrow = z.rows(j, 1) * &ik;
            lin.add_assign(&self.expr(&zrow.into_owned(), &rus, Band::Shared, &c, Some(l)));
            let right = &c * zr.rows(j, 1);
            azr.add_assign(&self.expr(&identity(dim), &rus, Band::Shared, &right, Some(l)));
        }
        let q = cols.len();
        let zn = z.rows(q, dim) * &ik * sqrt_n0;
        lin.add_assign(&self.expr(&zn.into_owned(), &rus, Band::Shared, &identity(dim), None).trace(dim));
        let right = zr.rows(q, dim) * sqrt_n0;
        azr.add_assign(&self.expr(&identity(dim), &rus, Band::Shared, &right.into_owned(), None));

        let lndet = log2_det_hpd(&ik)? * LN2;
        let zz = trace_re(&(&ik * z.adjoint() * z));
        f.constant = -(lndet - trace_re(&ua.k) - zz) / LN2;
        f.add_scaled(&lin.real_part(), -2.0 / LN2);
        f.add_scaled(&azr.norm_sqr(), 1.0 / LN2);
        Ok(f)
    }

    fn build(self, opts: LoweringOptions) -> Result<SurrogateSystem> {
        let inst = self.inst;
        let sc = &inst.scenario;
        let aux = self.aux;
        let n = self.n_vars();
        let total = sc.total_bandwidth;
        let width = |op: usize, band: Band| aux.bands.width(op, band);
        let mut pb = Problem::new(self.names.clone(), DVector::from_vec(self.warm.clone()), opts.relax);
        let active = |op: usize, band: Band| aux.band_open(op, band);

        let mut cost = ConvexFn::zero(n);
        for ue in sc.ues() {
            for band in Band::ALL {
                if active(ue.op, band) {
                    cost.add_scaled(&self.neg_quadratic_transform(ue, band), width(ue.op, band) / total);
                }
            }
        }
        pb.p.cost = cost;

        let mut fen_shared = HashMap::new();
        for ru in sc.rus() {
            let mut f = ConvexFn::zero(n);
            for band in Band::ALL {
                if !active(ru.op, band) {
                    continue;
                }
                let fen = self.fenchel(Observation::Fronthaul { ru, band }, aux.ru(ru).sigma.get(band))?;
                f.add_scaled(&fen, width(ru.op, band));
                if band == Band::Shared {
                    fen_shared.insert(ru, fen);
                }
            }
            let cap = sc.fronthaul_capacity[ru.op][ru.idx];
            if cap.is_finite() {
                pb.push(Origin::Fronthaul, format!("fronthaul[{}][{}]", ru.op, ru.idx), f.scaled(1.0 / cap), 1.0);
            }
        }

        for op in 0..N_OPERATORS {
            let cap = sc.backhaul_capacity[op];
            if !active(op, Band::Shared) || !cap.is_finite() {
                continue;
            }
            let mut f = ConvexFn::zero(n);
            for &r in inst.channels.subset(op) {
                if let Some(fen) = fen_shared.get(&RuId { op, idx: r }) {
                    f.add_scaled(fen, aux.bands.w_shared / cap);
                }
            }
            pb.push(Origin::Backhaul, format!("backhaul[{op}]"), f, 1.0);
        }

        let gamma = sc.privacy_threshold;
        if gamma > 0.0 && aux.bands.w_shared >= MIN_BAND_HZ {
            let mut first = Vec::with_capacity(N_OPERATORS);
            for cp in 0..N_OPERATORS {
                first.push(self.fenchel(Observation::SharedCp(cp), &aux.sigma_tilde[cp])?);
            }
            for ue in sc.ues() {
                let mut f = first[other(ue.op)].clone();
                f.add_scaled(&self.neg_matrix_transform(ue)?, 1.0);
                pb.push(
                    Origin::Privacy,
                    format!("privacy[{}][{}]", ue.op, ue.idx),
                    f.scaled(aux.bands.w_shared / gamma),
                    1.0,
                );
            }
        }

        if self.block == Block::Power {
            for (j, name) in self.names.iter().enumerate() {
                let mut q = nalgebra::DMatrix::zeros(n, n);
                q[(j, j)] = 1.0;
                let f = ConvexFn { quad: Some(q), linear: DVector::zeros(n), constant: 0.0, sqrt: Vec::new() };
                pb.push(Origin::Power, format!("power:{name}"), f, 1.0);
            }
        }
        let freedom = BandFreedom::Fixed;
        Ok(pb.finish(self.block, self.vars, self.scales, freedom))
    }
}
