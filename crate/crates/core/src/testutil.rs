//! Instance builders shared by the unit tests.

use crate::harness::cases;
use crate::metrics::DesignPoint;
use crate::model::{BandAllocation, Instance, RuId, UeId};

pub(crate) use crate::harness::cases::random_small_case as random_instance;

pub(crate) fn unit_design(inst: &Instance) -> DesignPoint {
    DesignPoint::uniform(&inst.scenario, BandAllocation::thirds(inst.scenario.total_bandwidth), 1.0, 1.0)
}

pub(crate) fn scalar_instance(
    n_rus: [usize; 2],
    n_ues: [usize; 2],
    subset: [Vec<usize>; 2],
    link: impl Fn(UeId, RuId) -> f64,
) -> Instance {
    cases::scalar_instance(n_rus, n_ues, subset, link).unwrap()
}
