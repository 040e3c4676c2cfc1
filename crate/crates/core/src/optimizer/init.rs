use super::Scheme;
use crate::error::{Error, Result};
use crate::linalg::{CMat, C64};
use crate::metrics::{privacy_leakage, quantization_rate, DesignPoint};
use crate::model::{Band, BandAllocation, Instance, RuId, N_OPERATORS};

fn set_quantizer(d: &mut DesignPoint, ru: RuId, band: Band, mu: f64) {
    let n = d.quantizer(ru, band).nrows();
    *d.quantizer_mut(ru, band) = CMat::identity(n, n) * C64::from(mu);
}

fn fronthaul_ok(inst: &Instance, d: &DesignPoint, ru: RuId) -> Result<bool> {
    let mut usage = 0.0;
    for band in Band::ALL {
        let w = d.bands.width(ru.op, band);
        if w > 0.0 {
            usage += w * quantization_rate(inst, d, ru, band)?;
        }
    }
    Ok(usage <= inst.scenario.fronthaul_capacity[ru.op][ru.idx])
}

fn backhaul_ok(inst: &Instance, d: &DesignPoint, op: usize) -> Result<bool> {
    let w = d.bands.w_shared;
    let mut usage = 0.0;
    for &r in inst.channels.subset(op) {
        usage += w * quantization_rate(inst, d, RuId { op, idx: r }, Band::Shared)?;
    }
    Ok(usage <= inst.scenario.backhaul_capacity[op])
}

/// A feasible starting design for `scheme`.
///
/// Band widths follow the scheme (`W/3` each when pooling, `W/2` per tenant
/// otherwise). Every UE transmits at amplitude `η√P_max` on each band it
/// uses, with `η = 1, 1/2, 1/4, …`. For each `η`, every RU gets `L = μI` with
/// `μ` the largest power of 1/2 (at most 1) that fits its fronthaul, and the
/// forwarded RUs' shared quantizers are halved further until the backhaul
/// fits. The first `η` that also meets the privacy thresholds wins. Bands a
/// scheme does not use, and the shared band when `Γ = 0`, get zero power and
/// zero quantizers.
pub fn initialize(inst: &Instance, scheme: Scheme, max_halvings: usize) -> Result<DesignPoint> {
    let sc = &inst.scenario;
    sc.validate()?;
    let w = sc.total_bandwidth;
    let bands = if scheme.pools() { BandAllocation::thirds(w) } else { BandAllocation::halves(w) };
    let shared_on = scheme.pools() && sc.privacy_threshold > 0.0;
    let vmax = sc.p_max.sqrt();

    for k in 0..=max_halvings {
        let eta = 0.5f64.powi(k as i32);
        let mut d = DesignPoint::uniform(sc, bands, eta * vmax, 1.0);
        if !shared_on {
            for ue in sc.ues() {
                d.set_power(ue, Band::Shared, 0.0);
            }
            for ru in sc.rus() {
                set_quantizer(&mut d, ru, Band::Shared, 0.0);
            }
        }
        for ru in sc.rus() {
            let mut mu = 1.0;
            let mut fits = false;
            for _ in 0..=max_halvings {
                set_quantizer(&mut d, ru, Band::Private, mu);
                if shared_on {
                    set_quantizer(&mut d, ru, Band::Shared, mu);
                }
                if fronthaul_ok(inst, &d, ru)? {
                    fits = true;
                    break;
                }
                mu *= 0.5;
            }
            if !fits {
                set_quantizer(&mut d, ru, Band::Private, 0.0);
                set_quantizer(&mut d, ru, Band::Shared, 0.0);
            }
        }
        if shared_on {
            for op in 0..N_OPERATORS {
                let mut halvings = 0;
                while !backhaul_ok(inst, &d, op)? {
                    for &r in inst.channels.subset(op) {
                        let ru = RuId { op, idx: r };
                        let scaled =
                            d.quantizer(ru, Band::Shared) * C64::from(if halvings < max_halvings { 0.5 } else { 0.0 });
                        *d.quantizer_mut(ru, Band::Shared) = scaled;
                    }
                    halvings += 1;
                }
            }
            let mut private_ok = true;
            for ue in sc.ues() {
                if bands.w_shared * privacy_leakage(inst, &d, ue)? > sc.privacy_threshold {
                    private_ok = false;
                    break;
                }
            }
            if !private_ok {
                continue;
            }
        }
        d.tighten_rates(inst)?;
        return Ok(d);
    }
    Err(Error::InfeasibleScenario(format!(
        "no initial point meets the privacy threshold {:e} after {max_halvings} power halvings",
        sc.privacy_threshold
    )))
}
