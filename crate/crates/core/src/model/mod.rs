//! Static problem data: scenarios, geometry, channels and backhaul RU subsets.

mod channels;
mod dump;
mod geometry;

pub use channels::{generate_channels, pathloss_gain, select_backhaul_subset, ChannelSet};
pub use dump::{read_channel_dump, write_channel_dump};
pub use geometry::{generate_scenario_geometry, Placement, Point};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of operators (tenants). The model is specific to two tenants.
pub const N_OPERATORS: usize = 2;

/// Index of the other operator.
#[inline]
pub fn other(op: usize) -> usize {
    1 - op
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UeId {
    pub op: usize,
    pub idx: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RuId {
    pub op: usize,
    pub idx: usize,
}

/// Which subband a signal lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Band {
    Private,
    Shared,
}

impl Band {
    pub const ALL: [Band; 2] = [Band::Private, Band::Shared];
}

/// A pair of values, one per subband.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PerBand<T> {
    pub private: T,
    pub shared: T,
}

impl<T> PerBand<T> {
    pub fn new(private: T, shared: T) -> Self {
        Self { private, shared }
    }

    pub fn get(&self, band: Band) -> &T {
        match band {
            Band::Private => &self.private,
            Band::Shared => &self.shared,
        }
    }

    pub fn get_mut(&mut self, band: Band) -> &mut T {
        match band {
            Band::Private => &mut self.private,
            Band::Shared => &mut self.shared,
        }
    }
}

/// How radio units are laid out inside the cell.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RuPlacement {
    /// Uniform in the disk, like the UEs.
    #[default]
    Uniform,
    /// Row-major square lattice inscribed in the disk.
    Grid,
}

/// Static problem data for one two-tenant network.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub n_rus: [usize; N_OPERATORS],
    pub n_ues: [usize; N_OPERATORS],
    /// Antennas per RU, `n_antennas[i][r]`.
    pub n_antennas: [Vec<usize>; N_OPERATORS],
    /// Fronthaul capacity per RU in bits/s.
    pub fronthaul_capacity: [Vec<f64>; N_OPERATORS],
    /// Backhaul capacity from CP `i` to the other CP in bits/s.
    pub backhaul_capacity: [f64; N_OPERATORS],
    /// Total uplink bandwidth in Hz.
    pub total_bandwidth: f64,
    /// Per-UE, per-subband transmit power limit (linear, noise-normalized).
    pub p_max: f64,
    /// Noise power per sample. SNR in dB is `10 log10(p_max / noise_psd)`.
    pub noise_psd: f64,
    /// Privacy leakage threshold in bits/s.
    pub privacy_threshold: f64,
    /// Number of RUs whose shared-band streams each CP forwards.
    pub subset_size: [usize; N_OPERATORS],
    pub cell_radius: f64,
    pub d_ref: f64,
    pub pathloss_exp: f64,
    #[serde(default)]
    pub ru_placement: RuPlacement,
}

impl Scenario {
    /// Symmetric two-tenant scenario with identical RUs.
    #[allow(clippy::too_many_arguments)]
    pub fn symmetric(
        n_rus: usize,
        n_ues: usize,
        n_antennas: usize,
        fronthaul_capacity: f64,
        backhaul_capacity: f64,
        total_bandwidth: f64,
        snr_db: f64,
        privacy_threshold: f64,
        subset_size: usize,
    ) -> Self {
        Self {
            n_rus: [n_rus; 2],
            n_ues: [n_ues; 2],
            n_antennas: [vec![n_antennas; n_rus], vec![n_antennas; n_rus]],
            fronthaul_capacity: [vec![fronthaul_capacity; n_rus], vec![fronthaul_capacity; n_rus]],
            backhaul_capacity: [backhaul_capacity; 2],
            total_bandwidth,
            p_max: snr_db_to_linear(snr_db),
            noise_psd: 1.0,
            privacy_threshold,
            subset_size: [subset_size; 2],
            cell_radius: 100.0,
            d_ref: 50.0,
            pathloss_exp: 3.0,
            ru_placement: RuPlacement::Uniform,
        }
    }

    /// Backhaul-sweep setup: 4 RUs and 4 UEs per tenant, single-antenna RUs,
    /// 500 Mbps fronthaul, 100 MHz, 600 Mbps privacy threshold, 0 dB SNR.
    pub fn backhaul_sweep_defaults(backhaul_capacity: f64, subset_size: usize) -> Self {
        Self::symmetric(4, 4, 1, 5e8, backhaul_capacity, 1e8, 0.0, 6e8, subset_size)
    }

    /// Rate-vs-secrecy setup: 2 RUs and 2 UEs per tenant, full forwarding,
    /// 1 Gbps backhaul, 500 Mbps fronthaul, 100 MHz.
    pub fn secrecy_tradeoff_defaults(snr_db: f64, privacy_threshold: f64) -> Self {
        Self::symmetric(2, 2, 1, 5e8, 1e9, 1e8, snr_db, privacy_threshold, 2)
    }

    pub fn set_snr_db(&mut self, snr_db: f64) {
        self.p_max = self.noise_psd * snr_db_to_linear(snr_db);
    }

    pub fn antennas(&self, ru: RuId) -> usize {
        self.n_antennas[ru.op][ru.idx]
    }

    pub fn ues(&self) -> impl Iterator<Item = UeId> + '_ {
        (0..N_OPERATORS).flat_map(move |op| (0..self.n_ues[op]).map(move |idx| UeId { op, idx }))
    }

    pub fn ues_of(&self, op: usize) -> impl Iterator<Item = UeId> {
        (0..self.n_ues[op]).map(move |idx| UeId { op, idx })
    }

    pub fn rus(&self) -> impl Iterator<Item = RuId> + '_ {
        (0..N_OPERATORS).flat_map(move |op| (0..self.n_rus[op]).map(move |idx| RuId { op, idx }))
    }

    pub fn rus_of(&self, op: usize) -> impl Iterator<Item = RuId> {
        (0..self.n_rus[op]).map(move |idx| RuId { op, idx })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidScenario(msg));
        for op in 0..N_OPERATORS {
            if self.n_antennas[op].len() != self.n_rus[op] {
                return bad(format!(
                    "operator {op}: n_antennas has {} entries for {} RUs",
                    self.n_antennas[op].len(),
                    self.n_rus[op]
                ));
            }
            if self.fronthaul_capacity[op].len() != self.n_rus[op] {
                return bad(format!(
                    "operator {op}: fronthaul_capacity has {} entries for {} RUs",
                    self.fronthaul_capacity[op].len(),
                    self.n_rus[op]
                ));
            }
            if self.subset_size[op] > self.n_rus[op] {
                return bad(format!(
                    "operator {op}: subset_size {} exceeds n_rus {}",
                    self.subset_size[op], self.n_rus[op]
                ));
            }
            if let Some(c) = self.fronthaul_capacity[op].iter().find(|c| !(c.is_finite() && **c > 0.0)) {
                return bad(format!("operator {op}: fronthaul capacity {c} must be positive"));
            }
            if self.n_antennas[op].contains(&0) {
                return bad(format!("operator {op}: every RU needs at least one antenna"));
            }
            let cb = self.backhaul_capacity[op];
            if !(cb.is_finite() && cb > 0.0) {
                return bad(format!("operator {op}: backhaul capacity {cb} must be positive"));
            }
        }
        for (name, v) in [
            ("total_bandwidth", self.total_bandwidth),
            ("p_max", self.p_max),
            ("noise_psd", self.noise_psd),
            ("d_ref", self.d_ref),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return bad(format!("{name} = {v} must be strictly positive"));
            }
        }
        if !(self.privacy_threshold.is_finite() && self.privacy_threshold >= 0.0) {
            return bad(format!("privacy_threshold = {} must be >= 0", self.privacy_threshold));
        }
        if !(self.cell_radius.is_finite() && self.cell_radius >= 0.0) {
            return bad(format!("cell_radius = {} must be >= 0", self.cell_radius));
        }
        if !(self.pathloss_exp.is_finite() && self.pathloss_exp >= 0.0) {
            return bad(format!("pathloss_exp = {} must be >= 0", self.pathloss_exp));
        }
        Ok(())
    }
}

/// A scenario together with one channel realization.
#[derive(Clone, Debug)]
pub struct Instance {
    pub scenario: Scenario,
    pub channels: ChannelSet,
}

impl Instance {
    pub fn new(scenario: Scenario, channels: ChannelSet) -> Result<Self> {
        scenario.validate()?;
        if channels.n_rus() != scenario.n_rus || channels.n_ues() != scenario.n_ues {
            return Err(Error::InvalidScenario("channel set dimensions do not match the scenario".into()));
        }
        Ok(Self { scenario, channels })
    }

    /// Draws placement and channels for `seed`.
    pub fn generate(scenario: Scenario, seed: u64) -> Result<Self> {
        scenario.validate()?;
        let placement = generate_scenario_geometry(&scenario, seed);
        let channels = generate_channels(&scenario, &placement, seed);
        Ok(Self { scenario, channels })
    }

    /// Same channels under a modified scenario; backhaul subsets are
    /// re-selected in case `subset_size` changed.
    pub fn with_scenario(&self, scenario: Scenario) -> Result<Self> {
        let channels = self.channels.reselected(&scenario);
        Self::new(scenario, channels)
    }

    pub fn noise(&self) -> f64 {
        self.scenario.noise_psd
    }
}

pub fn snr_db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Split of the total bandwidth into two private subbands and one shared subband.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandAllocation {
    pub w_private: [f64; N_OPERATORS],
    pub w_shared: f64,
}

impl BandAllocation {
    pub fn new(w_p1: f64, w_p2: f64, w_shared: f64) -> Self {
        Self { w_private: [w_p1, w_p2], w_shared }
    }

    pub fn thirds(total: f64) -> Self {
        let t = total / 3.0;
        Self::new(t, t, total - 2.0 * t)
    }

    pub fn halves(total: f64) -> Self {
        Self::new(total / 2.0, total / 2.0, 0.0)
    }

    pub fn width(&self, op: usize, band: Band) -> f64 {
        match band {
            Band::Private => self.w_private[op],
            Band::Shared => self.w_shared,
        }
    }

    pub fn sum(&self) -> f64 {
        self.w_private[0] + self.w_private[1] + self.w_shared
    }

    pub fn validate(&self, total: f64) -> Result<()> {
        let all = [self.w_private[0], self.w_private[1], self.w_shared];
        if all.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidDesign(format!("negative or non-finite band width in {all:?}")));
        }
        if (self.sum() - total).abs() > 1e-9 * total {
            return Err(Error::InvalidDesign(format!("band widths sum to {} instead of {total}", self.sum())));
        }
        Ok(())
    }
}
