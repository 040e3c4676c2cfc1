use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{other, Placement, RuId, Scenario, UeId, N_OPERATORS};
use crate::error::{Error, Result};
use crate::linalg::{concat, CVec, C64};

/// Per-entry channel power `1 / (1 + (d / d_ref)^α)`.
pub fn pathloss_gain(distance: f64, d_ref: f64, exponent: f64) -> f64 {
    1.0 / (1.0 + (distance / d_ref).powf(exponent))
}

/// All UE→RU channel vectors plus the stacked vectors the CPs decode from.
///
/// Stacked vectors are plain copies of the per-link blocks in RU order; the
/// shared-band stack of CP `c` lists all of `c`'s RUs followed by the RUs the
/// other CP forwards over the backhaul.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelSet {
    n_rus: [usize; N_OPERATORS],
    n_ues: [usize; N_OPERATORS],
    // h[j][k][i][r]: UE (j,k) -> RU (i,r)
    h: Vec<Vec<Vec<Vec<CVec>>>>,
    subset: [Vec<usize>; N_OPERATORS],
    stacked_private: [Vec<CVec>; N_OPERATORS],
    stacked_shared_own: [Vec<CVec>; N_OPERATORS],
    stacked_shared_cross: [Vec<CVec>; N_OPERATORS],
}

impl ChannelSet {
    /// Builds a channel set from explicit link vectors `h[j][k][i][r]` and
    /// backhaul subsets (indices into each operator's RUs).
    pub fn from_links(scenario: &Scenario, h: Vec<Vec<Vec<Vec<CVec>>>>, subset: [Vec<usize>; 2]) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidScenario(m));
        if h.len() != N_OPERATORS {
            return bad(format!("expected {N_OPERATORS} operators of UEs, got {}", h.len()));
        }
        for j in 0..N_OPERATORS {
            if h[j].len() != scenario.n_ues[j] {
                return bad(format!("operator {j}: {} UE channel sets for {} UEs", h[j].len(), scenario.n_ues[j]));
            }
            for per_ue in &h[j] {
                if per_ue.len() != N_OPERATORS {
                    return bad("each UE needs channels towards both operators".into());
                }
                for i in 0..N_OPERATORS {
                    if per_ue[i].len() != scenario.n_rus[i] {
                        return bad(format!("operator {i}: wrong number of RU channels"));
                    }
                    for (r, v) in per_ue[i].iter().enumerate() {
                        if v.len() != scenario.n_antennas[i][r] {
                            return bad(format!(
                                "RU ({i},{r}): channel length {} != {} antennas",
                                v.len(),
                                scenario.n_antennas[i][r]
                            ));
                        }
                    }
                }
            }
        }
        for op in 0..N_OPERATORS {
            let mut seen = vec![false; scenario.n_rus[op]];
            for &r in &subset[op] {
                if r >= scenario.n_rus[op] || seen[r] {
                    return bad(format!("operator {op}: invalid or repeated subset index {r}"));
                }
                seen[r] = true;
            }
        }
        let mut set = Self {
            n_rus: scenario.n_rus,
            n_ues: scenario.n_ues,
            h,
            subset: [Vec::new(), Vec::new()],
            stacked_private: [Vec::new(), Vec::new()],
            stacked_shared_own: [Vec::new(), Vec::new()],
            stacked_shared_cross: [Vec::new(), Vec::new()],
        };
        set.restack(subset);
        Ok(set)
    }

    /// Builds a channel set from a link generator `f(ue, ru)`.
    pub fn from_fn(
        scenario: &Scenario,
        subset: [Vec<usize>; 2],
        mut f: impl FnMut(UeId, RuId) -> CVec,
    ) -> Result<Self> {
        let h = (0..N_OPERATORS)
            .map(|j| {
                (0..scenario.n_ues[j])
                    .map(|k| {
                        (0..N_OPERATORS)
                            .map(|i| {
                                (0..scenario.n_rus[i])
                                    .map(|r| f(UeId { op: j, idx: k }, RuId { op: i, idx: r }))
                                    .collect()
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Self::from_links(scenario, h, subset)
    }

    fn restack(&mut self, mut subset: [Vec<usize>; 2]) {
        for s in subset.iter_mut() {
            s.sort_unstable();
        }
        self.subset = subset;
        for i in 0..N_OPERATORS {
            let ib = other(i);
            let mut private = Vec::with_capacity(self.n_ues[i]);
            let mut own = Vec::with_capacity(self.n_ues[i]);
            let mut cross = Vec::with_capacity(self.n_ues[i]);
            for k in 0..self.n_ues[i] {
                let links = &self.h[i][k];
                let own_blocks: Vec<&CVec> = links[i].iter().collect();
                private.push(concat(&own_blocks));

                let mut blocks = own_blocks.clone();
                blocks.extend(self.subset[ib].iter().map(|&r| &links[ib][r]));
                own.push(concat(&blocks));

                let mut blocks: Vec<&CVec> = links[ib].iter().collect();
                blocks.extend(self.subset[i].iter().map(|&r| &links[i][r]));
                cross.push(concat(&blocks));
            }
            self.stacked_private[i] = private;
            self.stacked_shared_own[i] = own;
            self.stacked_shared_cross[i] = cross;
        }
    }

    /// Same links with different backhaul subsets.
    pub fn with_subsets(&self, subset: [Vec<usize>; 2]) -> Self {
        let mut out = self.clone();
        out.restack(subset);
        out
    }

    /// Re-runs subset selection for the scenario's `subset_size`.
    pub fn reselected(&self, scenario: &Scenario) -> Self {
        self.with_subsets(select_backhaul_subset(self, scenario))
    }

    pub fn n_rus(&self) -> [usize; N_OPERATORS] {
        self.n_rus
    }

    pub fn n_ues(&self) -> [usize; N_OPERATORS] {
        self.n_ues
    }

    /// Channel vector from `ue` to `ru`.
    pub fn link(&self, ue: UeId, ru: RuId) -> &CVec {
        &self.h[ue.op][ue.idx][ru.op][ru.idx]
    }

    pub fn links(&self) -> &Vec<Vec<Vec<Vec<CVec>>>> {
        &self.h
    }

    /// RU indices of operator `op` whose shared-band streams go to the other CP.
    pub fn subset(&self, op: usize) -> &[usize] {
        &self.subset[op]
    }

    pub fn subsets(&self) -> &[Vec<usize>; 2] {
        &self.subset
    }

    /// `h_{i,k}^i`: UE (i,k) to all of its own operator's RUs.
    pub fn stacked_private(&self, ue: UeId) -> &CVec {
        &self.stacked_private[ue.op][ue.idx]
    }

    /// `h̃_{i,k}`: UE (i,k) into its own CP's shared-band stack.
    pub fn stacked_shared_own(&self, ue: UeId) -> &CVec {
        &self.stacked_shared_own[ue.op][ue.idx]
    }

    /// `g̃_{i,k}`: UE (i,k) into the other CP's shared-band stack.
    pub fn stacked_shared_cross(&self, ue: UeId) -> &CVec {
        &self.stacked_shared_cross[ue.op][ue.idx]
    }

    /// RUs whose shared-band streams CP `cp` decodes from, in stacking order.
    pub fn shared_stack_rus(&self, cp: usize) -> Vec<RuId> {
        let mut rus: Vec<RuId> = (0..self.n_rus[cp]).map(|idx| RuId { op: cp, idx }).collect();
        rus.extend(self.subset[other(cp)].iter().map(|&idx| RuId { op: other(cp), idx }));
        rus
    }

    /// `‖h_{ī}^{i,r}‖`: norm of all other-tenant UE channels into RU (i,r).
    pub fn cross_norm(&self, ru: RuId) -> f64 {
        let j = other(ru.op);
        (0..self.n_ues[j]).map(|k| self.h[j][k][ru.op][ru.idx].norm_squared()).sum::<f64>().sqrt()
    }
}

/// For each operator, the `subset_size` RU indices with the largest
/// cross-tenant channel norm, ties broken by lower index, returned sorted.
pub fn select_backhaul_subset(channels: &ChannelSet, scenario: &Scenario) -> [Vec<usize>; 2] {
    [0, 1].map(|op| {
        let mut order: Vec<(usize, f64)> =
            (0..channels.n_rus[op]).map(|idx| (idx, channels.cross_norm(RuId { op, idx }))).collect();
        order.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        let mut chosen: Vec<usize> = order.into_iter().take(scenario.subset_size[op]).map(|(i, _)| i).collect();
        chosen.sort_unstable();
        chosen
    })
}

/// Draws i.i.d. Rayleigh-faded channels with distance-dependent path loss and
/// selects the backhaul subsets. Deterministic in `seed`.
pub fn generate_channels(scenario: &Scenario, placement: &Placement, seed: u64) -> ChannelSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut h = Vec::with_capacity(N_OPERATORS);
    for j in 0..N_OPERATORS {
        let mut per_op = Vec::with_capacity(scenario.n_ues[j]);
        for k in 0..scenario.n_ues[j] {
            let ue_pos = placement.ues[j][k];
            let per_ue = [0, 1].map(|i| {
                (0..scenario.n_rus[i])
                    .map(|r| {
                        let d = Placement::distance(ue_pos, placement.rus[i][r]);
                        let sd = (pathloss_gain(d, scenario.d_ref, scenario.pathloss_exp) / 2.0).sqrt();
                        CVec::from_fn(scenario.n_antennas[i][r], |_, _| {
                            let re: f64 = StandardNormal.sample(&mut rng);
                            let im: f64 = StandardNormal.sample(&mut rng);
                            C64::new(sd * re, sd * im)
                        })
                    })
                    .collect::<Vec<_>>()
            });
            per_op.push(per_ue.into_iter().collect());
        }
        h.push(per_op);
    }
    let mut set = ChannelSet::from_links(scenario, h, [Vec::new(), Vec::new()])
        .expect("generated channels match the scenario dimensions");
    let subset = select_backhaul_subset(&set, scenario);
    set.restack(subset);
    set
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::generate_scenario_geometry;

    fn scalar_links(scenario: &Scenario, value: impl Fn(UeId, RuId) -> C64) -> Vec<Vec<Vec<Vec<CVec>>>> {
        (0..2)
            .map(|j| {
                (0..scenario.n_ues[j])
                    .map(|k| {
                        (0..2)
                            .map(|i| {
                                (0..scenario.n_rus[i])
                                    .map(|r| {
                                        let v = value(UeId { op: j, idx: k }, RuId { op: i, idx: r });
                                        CVec::from_element(scenario.n_antennas[i][r], v)
                                    })
                                    .collect()
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn pathloss_reference_points() {
        assert!((pathloss_gain(50.0, 50.0, 3.0) - 0.5).abs() < 1e-15);
        assert_eq!(pathloss_gain(0.0, 50.0, 3.0), 1.0);
        assert!((pathloss_gain(100.0, 50.0, 3.0) - 1.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn subset_picks_largest_cross_norms() {
        let mut s = Scenario::symmetric(3, 1, 1, 1.0, 1.0, 1.0, 0.0, 0.0, 2);
        s.n_ues = [1, 1];
        let norms = [2.0, 5.0, 3.0];
        let h =
            scalar_links(&s, |ue, ru| if ue.op != ru.op { C64::new(norms[ru.idx], 0.0) } else { C64::new(1.0, 0.0) });
        let set = ChannelSet::from_links(&s, h, [vec![], vec![]]).unwrap();
        let chosen = select_backhaul_subset(&set, &s);
        assert_eq!(chosen[0], vec![1, 2]);
    }

    #[test]
    fn subset_ties_break_low_index() {
        let s = Scenario::symmetric(3, 1, 1, 1.0, 1.0, 1.0, 0.0, 0.0, 1);
        let h = scalar_links(&s, |_, _| C64::new(1.0, 0.0));
        let set = ChannelSet::from_links(&s, h, [vec![], vec![]]).unwrap();
        assert_eq!(select_backhaul_subset(&set, &s), [vec![0], vec![0]]);
    }

    #[test]
    fn subset_extremes() {
        let mut s = Scenario::symmetric(4, 2, 1, 1.0, 1.0, 1.0, 0.0, 0.0, 4);
        let p = generate_scenario_geometry(&s, 1);
        let set = generate_channels(&s, &p, 1);
        assert_eq!(set.subset(0), &[0, 1, 2, 3]);
        s.subset_size = [0, 0];
        assert!(set.reselected(&s).subset(1).is_empty());
    }

    #[test]
    fn stacks_copy_blocks_in_order() {
        let mut s = Scenario::symmetric(3, 2, 2, 1.0, 1.0, 1.0, 0.0, 0.0, 2);
        s.n_antennas = [vec![1, 2, 3], vec![2, 1, 1]];
        let p = generate_scenario_geometry(&s, 9);
        let set = generate_channels(&s, &p, 9);
        for i in 0..2 {
            let ib = other(i);
            for k in 0..2 {
                let ue = UeId { op: i, idx: k };
                let mut off = 0;
                for r in 0..3 {
                    let blk = set.link(ue, RuId { op: i, idx: r });
                    assert_eq!(&set.stacked_private(ue).rows(off, blk.len()).clone_owned(), blk);
                    assert_eq!(&set.stacked_shared_own(ue).rows(off, blk.len()).clone_owned(), blk);
                    off += blk.len();
                }
                for &r in set.subset(ib) {
                    let blk = set.link(ue, RuId { op: ib, idx: r });
                    assert_eq!(&set.stacked_shared_own(ue).rows(off, blk.len()).clone_owned(), blk);
                    off += blk.len();
                }
                assert_eq!(off, set.stacked_shared_own(ue).len());

                let mut off = s.n_antennas[ib].iter().sum::<usize>();
                for &r in set.subset(i) {
                    let blk = set.link(ue, RuId { op: i, idx: r });
                    assert_eq!(&set.stacked_shared_cross(ue).rows(off, blk.len()).clone_owned(), blk);
                    off += blk.len();
                }
                assert_eq!(off, set.stacked_shared_cross(ue).len());
            }
        }
    }

    #[test]
    fn channel_statistics_match_pathloss() {
        // one UE at distance 100 m from one RU, many independent draws
        let mut s = Scenario::symmetric(1, 1, 1, 1.0, 1.0, 1.0, 0.0, 0.0, 0);
        s.n_ues = [1, 0];
        s.n_rus = [1, 0];
        s.n_antennas = [vec![1], vec![]];
        s.fronthaul_capacity = [vec![1.0], vec![]];
        let placement = Placement { ues: [vec![[100.0, 0.0]], vec![]], rus: [vec![[0.0, 0.0]], vec![]] };
        let n = 100_000;
        let (mut mean_re, mut power) = (0.0, 0.0);
        for seed in 0..n {
            let set = generate_channels(&s, &placement, seed);
            let x = set.link(UeId { op: 0, idx: 0 }, RuId { op: 0, idx: 0 })[0];
            mean_re += x.re;
            power += x.norm_sqr();
        }
        mean_re /= n as f64;
        power /= n as f64;
        let expected = 1.0 / 9.0;
        assert!((power - expected).abs() < 0.03 * expected, "power {power}");
        // 3-sigma bound on the mean of N(0, 1/18)
        assert!(mean_re.abs() < 3.0 * (expected / 2.0 / n as f64).sqrt());
    }

    #[test]
    fn rejects_bad_dimensions() {
        let s = Scenario::symmetric(1, 1, 2, 1.0, 1.0, 1.0, 0.0, 0.0, 0);
        let mut h = scalar_links(&s, |_, _| C64::new(1.0, 0.0));
        h[0][0][1][0] = CVec::zeros(1);
        assert!(ChannelSet::from_links(&s, h, [vec![], vec![]]).is_err());
        let h = scalar_links(&s, |_, _| C64::new(1.0, 0.0));
        assert!(ChannelSet::from_links(&s, h, [vec![1], vec![]]).is_err());
    }
}
