//! Small randomized instances and designs used by `validate`, the tests and
//! the acceptance suite.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::linalg::{CVec, C64};
use crate::metrics::{constraint_report, DesignPoint};
use crate::model::{BandAllocation, ChannelSet, Instance, RuId, Scenario, UeId};

/// Random instance with at most 2 RUs, 2 antennas per RU and 2 UEs per
/// tenant, random backhaul subsets, and a random design on it (thirds split,
/// amplitudes in [0.2, 1), quantizer entries in [-1.5, 1.5) + j[-1.5, 1.5)).
/// Capacities are the defaults of the rate-vs-secrecy setup, so the design
/// is not necessarily feasible; see [`fit_capacities`].
pub fn random_small_case(seed: u64) -> (Instance, DesignPoint) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_rus = [rng.gen_range(1..=2), rng.gen_range(1..=2)];
    let n_ues = [rng.gen_range(1..=2), rng.gen_range(1..=2)];
    let mut sc = Scenario::symmetric(1, 1, 1, 5e8, 1e9, 1e8, 0.0, 6e8, 0);
    sc.n_rus = n_rus;
    sc.n_ues = n_ues;
    sc.n_antennas = [0, 1].map(|op| (0..n_rus[op]).map(|_| rng.gen_range(1..=2)).collect());
    sc.fronthaul_capacity = [vec![5e8; n_rus[0]], vec![5e8; n_rus[1]]];
    sc.subset_size = [rng.gen_range(0..=n_rus[0]), rng.gen_range(0..=n_rus[1])];
    let inst = Instance::generate(sc, rng.gen()).expect("valid by construction");
    let mut d = DesignPoint::uniform(&inst.scenario, BandAllocation::thirds(1e8), 1.0, 1.0);
    for p in d.power.iter_mut().flatten() {
        p.private = rng.gen_range(0.2..1.0);
        p.shared = rng.gen_range(0.2..1.0);
    }
    for q in d.quantizer.iter_mut().flatten() {
        for m in [&mut q.private, &mut q.shared] {
            for z in m.iter_mut() {
                *z = C64::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
            }
        }
    }
    (inst, d)
}

/// Rescales every capacity and the privacy threshold to `margin` times what
/// `design` uses, so that `design` is strictly feasible on the result.
pub fn fit_capacities(inst: &Instance, design: &DesignPoint, margin: f64) -> Result<Instance> {
    let report = constraint_report(inst, design)?;
    let mut sc = inst.scenario.clone();
    let old = inst.scenario.clone();
    for op in 0..2 {
        for (r, c) in sc.fronthaul_capacity[op].iter_mut().enumerate() {
            *c = (margin * (old.fronthaul_capacity[op][r] - report.fronthaul_slack[op][r])).max(1.0);
        }
        sc.backhaul_capacity[op] = (margin * (old.backhaul_capacity[op] - report.backhaul_slack[op])).max(1.0);
    }
    let leak = report.privacy_slack.iter().flatten().fold(0.0f64, |a, &s| a.max(old.privacy_threshold - s));
    sc.privacy_threshold = (margin * leak).max(1.0);
    inst.with_scenario(sc)
}

/// Random multiplicative perturbation of every amplitude, additive
/// perturbation of every quantizer entry and a fresh random band split.
pub fn perturb(inst: &Instance, d: &DesignPoint, seed: u64) -> DesignPoint {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = d.clone();
    for v in p.power.iter_mut().flatten() {
        v.private = (v.private * rng.gen_range(0.2..1.8)).max(0.0);
        v.shared = (v.shared * rng.gen_range(0.2..1.8)).max(0.0);
    }
    for q in p.quantizer.iter_mut().flatten() {
        for m in [&mut q.private, &mut q.shared] {
            for z in m.iter_mut() {
                *z += C64::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
            }
        }
    }
    let w = inst.scenario.total_bandwidth;
    let (a, b): (f64, f64) = (rng.gen_range(0.05..0.9), rng.gen_range(0.05..0.9));
    let (lo, hi) = (a.min(b), a.max(b));
    p.bands = BandAllocation::new(lo * w, (hi - lo) * w, (1.0 - hi) * w);
    p
}

/// Single-antenna instance with `n_rus`/`n_ues` per tenant, the given
/// backhaul subsets and real link gains from `link`. Other parameters follow
/// the rate-vs-secrecy setup at 0 dB.
pub fn scalar_instance(
    n_rus: [usize; 2],
    n_ues: [usize; 2],
    subset: [Vec<usize>; 2],
    link: impl Fn(UeId, RuId) -> f64,
) -> Result<Instance> {
    let mut sc = Scenario::symmetric(1, 1, 1, 5e8, 1e9, 1e8, 0.0, 6e8, 0);
    sc.n_rus = n_rus;
    sc.n_ues = n_ues;
    sc.n_antennas = [vec![1; n_rus[0]], vec![1; n_rus[1]]];
    sc.fronthaul_capacity = [vec![5e8; n_rus[0]], vec![5e8; n_rus[1]]];
    sc.subset_size = [subset[0].len(), subset[1].len()];
    let ch = ChannelSet::from_fn(&sc, subset, |u, r| CVec::from_element(1, C64::new(link(u, r), 0.0)))?;
    Instance::new(sc, ch)
}

/// One UE and one RU in tenant 0, nothing in tenant 1, capacities of 1 Tbps
/// and a privacy threshold that never binds.
pub fn single_link_instance(snr_db: f64, gain: f64) -> Result<Instance> {
    let mut inst = scalar_instance([1, 0], [1, 0], [vec![], vec![]], |_, _| gain)?;
    let sc = &mut inst.scenario;
    sc.fronthaul_capacity = [vec![1e12], vec![]];
    sc.backhaul_capacity = [1e12; 2];
    sc.privacy_threshold = 1e15;
    sc.set_snr_db(snr_db);
    Ok(inst)
}
