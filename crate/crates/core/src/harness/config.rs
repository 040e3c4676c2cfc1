//! Flat TOML experiment configuration.
//!
//! Keys are the field names of [`Scenario`], [`ExperimentSpec`] and
//! [`OptimizerConfig`], plus `snr_db` as an alternative to `p_max`. Missing
//! keys fall back to the backhaul-sweep setup. Per-tenant quantities take a
//! scalar (both tenants) or a two-element array; per-RU quantities also
//! accept one array per tenant. Unknown keys are errors.
//!
//! ```toml
//! n_rus = 2
//! n_ues = 2
//! backhaul_capacity = 1e9
//! subset_size = 2
//! snr_db = 10
//! sweep_axis = "privacy_threshold"
//! sweep_values = [1e7, 1e8, 1e9]
//! schemes = ["optimized-pooling", "no-pooling"]
//! trials = 50
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::experiment::{ExperimentSpec, SweepAxis};
use crate::error::{Error, Result};
use crate::model::{snr_db_to_linear, RuPlacement, Scenario};
use crate::optimizer::{OptimizerConfig, Scheme};

pub const DEFAULT_TRIALS: usize = 200;

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum PerOp<T> {
    Both(T),
    Each([T; 2]),
}

impl<T: Clone> PerOp<T> {
    fn get(&self) -> [T; 2] {
        match self {
            PerOp::Both(x) => [x.clone(), x.clone()],
            PerOp::Each(x) => x.clone(),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum PerRu<T> {
    All(T),
    PerOp([T; 2]),
    Each([Vec<T>; 2]),
}

impl<T: Clone> PerRu<T> {
    fn get(&self, n_rus: [usize; 2]) -> [Vec<T>; 2] {
        match self {
            PerRu::All(x) => n_rus.map(|n| vec![x.clone(); n]),
            PerRu::PerOp([a, b]) => [vec![a.clone(); n_rus[0]], vec![b.clone(); n_rus[1]]],
            PerRu::Each(x) => x.clone(),
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    n_rus: Option<PerOp<usize>>,
    n_ues: Option<PerOp<usize>>,
    n_antennas: Option<PerRu<usize>>,
    fronthaul_capacity: Option<PerRu<f64>>,
    backhaul_capacity: Option<PerOp<f64>>,
    total_bandwidth: Option<f64>,
    p_max: Option<f64>,
    snr_db: Option<f64>,
    noise_psd: Option<f64>,
    privacy_threshold: Option<f64>,
    subset_size: Option<PerOp<usize>>,
    cell_radius: Option<f64>,
    d_ref: Option<f64>,
    pathloss_exp: Option<f64>,
    ru_placement: Option<RuPlacement>,

    sweep_axis: Option<SweepAxis>,
    sweep_values: Option<Vec<f64>>,
    schemes: Option<Vec<Scheme>>,
    trials: Option<usize>,
    base_seed: Option<u64>,
    output: Option<PathBuf>,
    record_timing: Option<bool>,

    max_outer_iters: Option<usize>,
    rel_obj_tol: Option<f64>,
    subsolver_tol: Option<f64>,
    max_newton_steps: Option<usize>,
    relax: Option<f64>,
    feasibility_tol: Option<f64>,
    init_max_halvings: Option<usize>,
}

/// Parsed configuration. `sweep_axis`/`sweep_values` may be absent when the
/// sweep is given on the command line.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub sweep_axis: Option<SweepAxis>,
    pub sweep_values: Option<Vec<f64>>,
    pub schemes: Vec<Scheme>,
    pub trials: usize,
    pub base_seed: u64,
    pub output: Option<PathBuf>,
    pub record_timing: bool,
    pub optimizer: OptimizerConfig,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let f: ConfigFile = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let base = Scenario::backhaul_sweep_defaults(1e9, 2);
        let n_rus = f.n_rus.map_or(base.n_rus, |x| x.get());
        let n_ues = f.n_ues.map_or(base.n_ues, |x| x.get());
        let noise_psd = f.noise_psd.unwrap_or(base.noise_psd);
        let p_max = match (f.p_max, f.snr_db) {
            (Some(_), Some(_)) => return Err(Error::Config("give p_max or snr_db, not both".into())),
            (Some(p), None) => p,
            (None, Some(db)) => noise_psd * snr_db_to_linear(db),
            (None, None) => base.p_max,
        };
        let scenario = Scenario {
            n_rus,
            n_ues,
            n_antennas: f.n_antennas.map_or_else(|| PerRu::All(1).get(n_rus), |x| x.get(n_rus)),
            fronthaul_capacity: f
                .fronthaul_capacity
                .map_or_else(|| PerRu::All(base.fronthaul_capacity[0][0]).get(n_rus), |x| x.get(n_rus)),
            backhaul_capacity: f.backhaul_capacity.map_or(base.backhaul_capacity, |x| x.get()),
            total_bandwidth: f.total_bandwidth.unwrap_or(base.total_bandwidth),
            p_max,
            noise_psd,
            privacy_threshold: f.privacy_threshold.unwrap_or(base.privacy_threshold),
            subset_size: f.subset_size.map_or(base.subset_size, |x| x.get()),
            cell_radius: f.cell_radius.unwrap_or(base.cell_radius),
            d_ref: f.d_ref.unwrap_or(base.d_ref),
            pathloss_exp: f.pathloss_exp.unwrap_or(base.pathloss_exp),
            ru_placement: f.ru_placement.unwrap_or(base.ru_placement),
        };
        scenario.validate()?;
        let d = OptimizerConfig::default();
        let optimizer = OptimizerConfig {
            scheme: d.scheme,
            max_outer_iters: f.max_outer_iters.unwrap_or(d.max_outer_iters),
            rel_obj_tol: f.rel_obj_tol.unwrap_or(d.rel_obj_tol),
            subsolver_tol: f.subsolver_tol.unwrap_or(d.subsolver_tol),
            max_newton_steps: f.max_newton_steps.unwrap_or(d.max_newton_steps),
            relax: f.relax.unwrap_or(d.relax),
            feasibility_tol: f.feasibility_tol.unwrap_or(d.feasibility_tol),
            init_max_halvings: f.init_max_halvings.unwrap_or(d.init_max_halvings),
        };
        optimizer.validate()?;
        Ok(Self {
            scenario,
            sweep_axis: f.sweep_axis,
            sweep_values: f.sweep_values,
            schemes: f.schemes.unwrap_or_else(|| vec![Scheme::OptimizedPooling]),
            trials: f.trials.unwrap_or(DEFAULT_TRIALS),
            base_seed: f.base_seed.unwrap_or(0),
            output: f.output,
            record_timing: f.record_timing.unwrap_or(false),
            optimizer,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// The experiment, with the sweep taken from `sweep` if given and from
    /// the file otherwise.
    pub fn spec(&self, sweep: Option<(SweepAxis, Vec<f64>)>) -> Result<ExperimentSpec> {
        let (sweep_axis, sweep_values) = match sweep {
            Some(s) => s,
            None => match (self.sweep_axis, &self.sweep_values) {
                (Some(a), Some(v)) => (a, v.clone()),
                _ => return Err(Error::Config("the config needs both sweep_axis and sweep_values".into())),
            },
        };
        let spec = ExperimentSpec {
            scenario: self.scenario.clone(),
            sweep_axis,
            sweep_values,
            schemes: self.schemes.clone(),
            trials: self.trials,
            base_seed: self.base_seed,
            output: self.output.clone(),
            record_timing: self.record_timing,
            optimizer: self.optimizer.clone(),
        };
        spec.validate()?;
        Ok(spec)
    }
}
