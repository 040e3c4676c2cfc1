use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::linalg::{log2_det_hpd, CMat, C64};
use crate::metrics::{constraint_report, observation_covariance, DesignPoint, Evaluation, Observation};
use crate::model::{Band, BandAllocation, RuId, UeId};
use crate::subsolver::{BarrierSolver, ConvexSolver};
use crate::testutil::{random_instance, scalar_instance, unit_design};

fn open() -> Freeze {
    Freeze { bands: BandFreedom::Full, shared: false }
}

use crate::harness::cases::perturb;

#[test]
fn scalar_private_aux_closed_form() {
    let inst = scalar_instance([1, 0], [1, 0], [vec![], vec![]], |_, _| 1.0);
    let aux = update_aux(&inst, &unit_design(&inst)).unwrap();
    let ue = aux.ue(UeId { op: 0, idx: 0 });
    assert!((ue.kappa.private - 0.5).abs() < 1e-12);
    assert!((ue.z.private[0] - C64::new(1.0 / 3.0, 0.0)).norm() < 1e-12);
    assert!((ue.alpha.private - 1.5f64.log2()).abs() < 1e-12);
}

#[test]
fn quadratic_transform_is_tight_at_its_maximizer() {
    let (inst, d) = random_instance(4);
    let aux = update_aux(&inst, &d).unwrap();
    for ue in inst.scenario.ues() {
        for band in Band::ALL {
            let qt = quadratic_transform_bound(&inst, &d, &aux, ue, band);
            assert!((qt - (1.0 + aux.ue(ue).kappa.get(band)).log2()).abs() < 1e-10);
        }
    }
}

#[test]
fn product_bound_identity() {
    for seed in 0..20 {
        let (inst, d) = random_instance(seed);
        let aux = update_aux(&inst, &d).unwrap();
        let w = d.bands.w_shared;
        for ru in inst.scenario.rus() {
            let a = aux.ru(ru);
            let bound = 2.0 * a.c_tilde.shared * a.rho.shared.sqrt() - a.c_tilde.shared.powi(2) * w;
            assert!((bound - a.rho.shared / w).abs() <= 1e-10 * a.rho_tilde.shared.max(1e-6));
            assert!((bound - a.rho_tilde.shared).abs() <= 1e-10 * a.rho_tilde.shared.max(1e-6));
        }
    }
}

#[test]
fn every_surrogate_is_tight_at_the_anchor() {
    for seed in 0..50 {
        let (inst, d) = random_instance(seed);
        let aux = update_aux(&inst, &d).unwrap();
        for t in evaluate_surrogates(&inst, &aux, &d, SurrogateOptions::default()).unwrap() {
            assert!(t.relative_gap() <= 1e-8, "seed {seed}: {} {} vs {}", t.label, t.surrogate, t.original);
        }
    }
}

#[test]
fn surrogates_err_on_the_safe_side_away_from_the_anchor() {
    for seed in 0..100 {
        let (inst, d) = random_instance(1000 + seed);
        let aux = update_aux(&inst, &d).unwrap();
        let p = perturb(&inst, &d, seed);
        for t in evaluate_surrogates(&inst, &aux, &p, SurrogateOptions::default()).unwrap() {
            assert!(t.holds(1e-9), "seed {seed}: {} {:?} {} vs {}", t.label, t.direction, t.surrogate, t.original);
        }
    }
}

#[test]
fn flipped_backhaul_sign_breaks_tightness() {
    let (inst, d) = (0..100).map(random_instance).find(|(inst, _)| !inst.channels.subset(0).is_empty()).unwrap();
    let aux = update_aux(&inst, &d).unwrap();
    let opts = SurrogateOptions { backhaul_product_sign: ProductSign::Plus };
    let terms = evaluate_surrogates(&inst, &aux, &d, opts).unwrap();
    let bh = terms.iter().find(|t| t.label == "backhaul[0]").unwrap();
    assert!(bh.relative_gap() > 0.5);
    assert!(!bh.holds(1e-9));
}

fn random_hpd(n: usize, rng: &mut ChaCha8Rng) -> CMat {
    let a = CMat::from_fn(n, n, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    &a * a.adjoint() + CMat::identity(n, n) * C64::from(0.1)
}

#[test]
fn fenchel_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for n in 1..=4 {
        for _ in 0..10 {
            let x = random_hpd(n, &mut rng);
            let ld = log2_det_hpd(&x).unwrap();
            assert!((fenchel_bound(&x, &x).unwrap() - ld).abs() < 1e-10);
            for _ in 0..5 {
                let s = random_hpd(n, &mut rng);
                assert!(fenchel_bound(&s, &x).unwrap() >= ld - 1e-10);
            }
        }
    }
}

#[test]
fn matrix_transform_is_a_tight_minorant() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for (n, q) in [(1, 1), (2, 3), (3, 2), (4, 6)] {
        let a = CMat::from_fn(n, q, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let k = &a * a.adjoint();
        let z = (a.adjoint() * &a + CMat::identity(q, q)).try_inverse().unwrap() * a.adjoint();
        let exact = log2_det_hpd(&(CMat::identity(n, n) + &k)).unwrap();
        assert!((matrix_transform_bound(&k, &z, &a).unwrap() - exact).abs() < 1e-10);
        for _ in 0..10 {
            let b = &a + CMat::from_fn(n, q, |_, _| C64::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)));
            let exact_b = log2_det_hpd(&(CMat::identity(n, n) + &b * b.adjoint())).unwrap();
            assert!(matrix_transform_bound(&k, &z, &b).unwrap() <= exact_b + 1e-10);
        }
    }
}

#[test]
fn leakage_beyond_threshold_admits_no_budget_variables() {
    // CP 1 sees UE (0,0) through RU (0,0) in its subset: β = log2(1 + 1/2)
    let mut inst = scalar_instance([1, 1], [1, 0], [vec![0], vec![]], |_, _| 1.0);
    let w_s = 1e8 / 3.0;
    let d = unit_design(&inst);
    let beta = Evaluation::compute(&inst, &d).unwrap().beta(UeId { op: 0, idx: 0 });
    assert!(beta > 0.1);
    inst.scenario.privacy_threshold = 0.5 * w_s * beta;
    let aux = update_aux(&inst, &d).unwrap();
    let terms = evaluate_surrogates(&inst, &aux, &d, SurrogateOptions::default()).unwrap();
    let leak = terms.iter().find(|t| t.label == "leakage[0][0]").unwrap().surrogate;
    let cap = terms.iter().find(|t| t.label == "privacy[0][0]").unwrap().surrogate;
    // feasible (β_var, θ) need θ ≤ MQT, β_var ≥ Fen − θ, β_var ≤ cap
    let ue = aux.ue(UeId { op: 0, idx: 0 });
    let fen = leak + ue.theta;
    let mut found = false;
    for i in 0..=400 {
        let theta = ue.theta * (i as f64 / 200.0);
        if theta > ue.theta + 1e-12 {
            continue;
        }
        for j in 0..=400 {
            let beta_var = 2.0 * beta * j as f64 / 400.0;
            found |= beta_var >= fen - theta && beta_var <= cap;
        }
    }
    assert!(!found);
}

/// Cross-checks the assembled quadratics against literal surrogate values
/// at a design that differs from the anchor only in the block variables.
fn check_lowering(seed: u64, block: Block) {
    let (inst, d) = random_instance(seed);
    let aux = update_aux(&inst, &d).unwrap();
    let sys = build_surrogates(&inst, &d, &aux, block, open(), LoweringOptions::default()).unwrap();
    let mut p = perturb(&inst, &d, seed + 7);
    p.bands = d.bands;
    if block == Block::Power {
        p.quantizer = d.quantizer.clone();
    } else {
        p.power = d.power.clone();
    }
    let x = sys.encode(&inst, &p);
    let sc = &inst.scenario;
    let total = sc.total_bandwidth;

    let mut objective = 0.0;
    for ue in sc.ues() {
        for band in Band::ALL {
            objective += d.bands.width(ue.op, band) / total * quadratic_transform_bound(&inst, &p, &aux, ue, band);
        }
    }
    let got = sys.problem.objective(&x);
    assert!((got - objective).abs() < 1e-9 * objective.abs().max(1.0), "objective {got} vs {objective}");

    for (origin, c) in sys.constraints() {
        let value = c.function.value(&x);
        let expected = match origin {
            Origin::Fronthaul => {
                let idx: Vec<usize> =
                    c.label.trim_start_matches("fronthaul").split(['[', ']']).filter_map(|s| s.parse().ok()).collect();
                let ru = RuId { op: idx[0], idx: idx[1] };
                let mut usage = 0.0;
                for band in Band::ALL {
                    let x = observation_covariance(&inst, &p, Observation::Fronthaul { ru, band }, None);
                    usage += d.bands.width(ru.op, band) * fenchel_bound(aux.ru(ru).sigma.get(band), &x).unwrap();
                }
                usage / sc.fronthaul_capacity[ru.op][ru.idx]
            }
            Origin::Backhaul => {
                let op: usize = c.label[9..10].parse().unwrap();
                let mut usage = 0.0;
                for &r in inst.channels.subset(op) {
                    let ru = RuId { op, idx: r };
                    let x = observation_covariance(&inst, &p, Observation::Fronthaul { ru, band: Band::Shared }, None);
                    usage += d.bands.w_shared * fenchel_bound(&aux.ru(ru).sigma.shared, &x).unwrap();
                }
                usage / sc.backhaul_capacity[op]
            }
            Origin::Privacy => {
                let idx: Vec<usize> =
                    c.label.trim_start_matches("privacy").split(['[', ']']).filter_map(|s| s.parse().ok()).collect();
                let ue = UeId { op: idx[0], idx: idx[1] };
                let cp = crate::model::other(ue.op);
                let full = observation_covariance(&inst, &p, Observation::SharedCp(cp), None);
                let first = fenchel_bound(&aux.sigma_tilde[cp], &full).unwrap();
                let ua = aux.ue(ue);
                let second = matrix_transform_bound(&ua.k, &ua.z_mat, &privacy_matrix(&inst, &p, ue)).unwrap();
                d.bands.w_shared * (first - second) / sc.privacy_threshold
            }
            Origin::Power => x
                .iter()
                .zip(&sys.problem.variables)
                .find(|(_, n)| c.label.ends_with(n.as_str()))
                .map(|(v, _)| v * v)
                .unwrap(),
            other => panic!("unexpected constraint origin {other}"),
        };
        assert!((value - expected).abs() < 1e-9 * expected.abs().max(1.0), "{}: {value} vs {expected}", c.label);
    }
}

#[test]
fn power_block_quadratics_match_literal_surrogates() {
    for seed in 0..30 {
        check_lowering(seed, Block::Power);
    }
}

#[test]
fn quantizer_block_quadratics_match_literal_surrogates() {
    for seed in 0..30 {
        check_lowering(seed, Block::Quantizer);
    }
}

#[test]
fn anchor_is_strictly_inside_every_block() {
    for seed in 0..30 {
        let (inst, d) = random_instance(seed);
        let aux = update_aux(&inst, &d).unwrap();
        for block in [Block::Bands, Block::Power, Block::Quantizer] {
            let sys = build_surrogates(&inst, &d, &aux, block, open(), LoweringOptions::default()).unwrap();
            sys.problem.check_interior(&sys.warm_start).unwrap();
            let mut back = sys.apply(&inst, &d, &sys.warm_start);
            back.rates = d.rates.clone();
            assert!((back.bands.w_shared - d.bands.w_shared).abs() < 1e-6);
            assert_eq!(sys.encode(&inst, &d), sys.warm_start);
        }
    }
}

#[test]
fn block_solves_improve_and_stay_feasible() {
    let solver = BarrierSolver::default();
    for seed in 0..20 {
        let (inst, mut d) = random_instance(seed);
        // scale the quantizers down until the anchor is feasible
        for _ in 0..60 {
            d.tighten_rates(&inst).unwrap();
            if constraint_report(&inst, &d).unwrap().max_relative_violation(&inst.scenario) <= 0.0 {
                break;
            }
            for q in d.quantizer.iter_mut().flatten() {
                q.private *= C64::from(0.5);
                q.shared *= C64::from(0.5);
            }
            for p in d.power.iter_mut().flatten() {
                p.shared *= 0.5;
            }
        }
        d.tighten_rates(&inst).unwrap();
        let before = d.sum_rate();
        for block in [Block::Bands, Block::Power, Block::Quantizer] {
            let aux = update_aux(&inst, &d).unwrap();
            let sys = build_surrogates(&inst, &d, &aux, block, open(), LoweringOptions::default()).unwrap();
            let sol = solver.solve(&sys.problem, &sys.warm_start).unwrap();
            let mut next = sys.apply(&inst, &d, &sol.x);
            next.tighten_rates(&inst).unwrap();
            let viol = constraint_report(&inst, &next).unwrap().max_relative_violation(&inst.scenario);
            assert!(viol <= 1e-7, "seed {seed} {:?}: violation {viol}", block);
            assert!(next.sum_rate() >= d.sum_rate() * (1.0 - 1e-9), "seed {seed} {:?}", block);
            d = next;
        }
        assert!(d.sum_rate() >= before);
    }
}

#[test]
fn scalar_power_block_saturates_the_power_budget() {
    let mut inst = scalar_instance([1, 0], [1, 0], [vec![], vec![]], |_, _| 0.8);
    inst.scenario.fronthaul_capacity = [vec![1e12], vec![]];
    inst.scenario.p_max = 4.0;
    let mut d = DesignPoint::uniform(&inst.scenario, BandAllocation::thirds(1e8), 0.5, 1.0);
    d.tighten_rates(&inst).unwrap();
    let aux = update_aux(&inst, &d).unwrap();
    let freeze = Freeze { bands: BandFreedom::Fixed, shared: true };
    let sys = build_surrogates(&inst, &d, &aux, Block::Power, freeze, LoweringOptions::default()).unwrap();
    let sol = BarrierSolver::default().solve(&sys.problem, &sys.warm_start).unwrap();
    let v = sys.apply(&inst, &d, &sol.x).power(UeId { op: 0, idx: 0 }, Band::Private);
    // brute-force grid of the same surrogate over v ∈ [0, √P]
    let best = (0..=20_000)
        .map(|i| 2.0 * i as f64 / 20_000.0)
        .map(|v| {
            let mut t = d.clone();
            t.set_power(UeId { op: 0, idx: 0 }, Band::Private, v);
            (v, quadratic_transform_bound(&inst, &t, &aux, UeId { op: 0, idx: 0 }, Band::Private))
        })
        .fold((0.0, f64::NEG_INFINITY), |m, c| if c.1 > m.1 { c } else { m });
    assert!((v - best.0).abs() <= 1e-3 * best.0, "{v} vs {}", best.0);
    assert!((v * v - 4.0).abs() <= 4e-3);
}

#[test]
fn frozen_shared_band_has_no_shared_variables() {
    let (inst, d) = random_instance(2);
    let aux = update_aux(&inst, &d).unwrap();
    let freeze = Freeze { bands: BandFreedom::Full, shared: true };
    for block in [Block::Power, Block::Quantizer] {
        let sys = build_surrogates(&inst, &d, &aux, block, freeze, LoweringOptions::default()).unwrap();
        assert!(sys.problem.variables.iter().all(|n| !n.contains("shared")));
        let next = sys.apply(&inst, &d, &sys.warm_start);
        assert_eq!(next.quantizer[0][0].shared, d.quantizer[0][0].shared);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn sandwich_holds_for_arbitrary_perturbations(seed in any::<u64>(), pseed in any::<u64>()) {
        let (inst, d) = random_instance(seed);
        let aux = update_aux(&inst, &d).unwrap();
        let p = perturb(&inst, &d, pseed);
        for t in evaluate_surrogates(&inst, &aux, &p, SurrogateOptions::default()).unwrap() {
            prop_assert!(t.holds(1e-9), "{} {} vs {}", t.label, t.surrogate, t.original);
        }
    }

    #[test]
    fn fenchel_bound_is_minimized_at_x(seed in any::<u64>(), n in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_hpd(n, &mut rng);
        let at_x = fenchel_bound(&x, &x).unwrap();
        let s = random_hpd(n, &mut rng);
        prop_assert!(fenchel_bound(&s, &x).unwrap() >= at_x - 1e-10);
    }
}
