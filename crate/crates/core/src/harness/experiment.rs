use std::fmt;
use std::fs::File;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{constraint_report, secrecy_sum_rate};
use crate::model::{Instance, Scenario};
use crate::optimizer::{optimize, OptimizerConfig, Outcome, Scheme};

/// Largest relative constraint violation a design may have and still be
/// recorded as feasible.
pub const FEASIBLE_REL_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    BackhaulCapacity,
    PrivacyThreshold,
    SnrDb,
    SubsetSize,
}

impl SweepAxis {
    pub const ALL: [SweepAxis; 4] =
        [SweepAxis::BackhaulCapacity, SweepAxis::PrivacyThreshold, SweepAxis::SnrDb, SweepAxis::SubsetSize];

    pub fn as_str(&self) -> &'static str {
        match self {
            SweepAxis::BackhaulCapacity => "backhaul_capacity",
            SweepAxis::PrivacyThreshold => "privacy_threshold",
            SweepAxis::SnrDb => "snr_db",
            SweepAxis::SubsetSize => "subset_size",
        }
    }

    /// `scenario` with this axis set to `value` for both tenants.
    pub fn apply(&self, scenario: &Scenario, value: f64) -> Result<Scenario> {
        let mut sc = scenario.clone();
        let bad = |why: &str| Err(Error::Config(format!("{} = {value}: {why}", self.as_str())));
        match self {
            SweepAxis::BackhaulCapacity => {
                if !(value.is_finite() && value > 0.0) {
                    return bad("must be positive");
                }
                sc.backhaul_capacity = [value; 2];
            }
            SweepAxis::PrivacyThreshold => {
                if !(value.is_finite() && value >= 0.0) {
                    return bad("must be non-negative");
                }
                sc.privacy_threshold = value;
            }
            SweepAxis::SnrDb => {
                if !value.is_finite() {
                    return bad("must be finite");
                }
                sc.set_snr_db(value);
            }
            SweepAxis::SubsetSize => {
                if value.fract() != 0.0 || value < 0.0 || value > sc.n_rus[0].min(sc.n_rus[1]) as f64 {
                    return bad("must be an integer between 0 and the RU count");
                }
                sc.subset_size = [value as usize; 2];
            }
        }
        sc.validate()?;
        Ok(sc)
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SweepAxis::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown sweep axis `{s}`")))
    }
}

/// A Monte Carlo experiment: every scheme at every sweep value for every
/// trial. Trial `t` uses seed `base_seed + t` throughout, so all schemes and
/// sweep values of a trial see the same channels.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSpec {
    pub scenario: Scenario,
    pub sweep_axis: SweepAxis,
    pub sweep_values: Vec<f64>,
    pub schemes: Vec<Scheme>,
    pub trials: usize,
    pub base_seed: u64,
    pub output: Option<PathBuf>,
    /// Fill `wall_ms`. Off by default so that output files are reproducible
    /// byte for byte.
    pub record_timing: bool,
    /// Settings shared by every scheme; its `scheme` field is ignored.
    pub optimizer: OptimizerConfig,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        self.optimizer.validate()?;
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.sweep_values.is_empty() {
            return Err(Error::Config("sweep_values is empty".into()));
        }
        if self.schemes.is_empty() {
            return Err(Error::Config("schemes is empty".into()));
        }
        for (i, s) in self.schemes.iter().enumerate() {
            if self.schemes[..i].contains(s) {
                return Err(Error::Config(format!("scheme `{s}` listed twice")));
            }
        }
        for &v in &self.sweep_values {
            self.sweep_axis.apply(&self.scenario, v)?;
        }
        Ok(())
    }
}

/// One CSV row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub trial: usize,
    pub seed: u64,
    pub scheme: Scheme,
    pub sweep_axis: SweepAxis,
    pub sweep_value: f64,
    pub sum_rate_bps: f64,
    pub secrecy_sum_rate_bps: f64,
    pub w_p1_hz: f64,
    pub w_p2_hz: f64,
    pub w_s_hz: f64,
    pub iterations: usize,
    pub feasible: bool,
    pub wall_ms: f64,
}

pub const CSV_HEADER: &str =
    "trial,seed,scheme,sweep_axis,sweep_value,sum_rate_bps,secrecy_sum_rate_bps,w_p1_hz,w_p2_hz,w_s_hz,iterations,feasible,wall_ms";

/// Callback invoked with every successful optimization of an experiment.
pub type Inspector<'a> = &'a (dyn Fn(&Instance, &Outcome, &RunRecord) + Sync);

fn run_one(
    spec: &ExperimentSpec,
    base: &Instance,
    trial: usize,
    seed: u64,
    scheme: Scheme,
    value: f64,
    inspect: Option<Inspector<'_>>,
) -> Result<RunRecord> {
    let sc = spec.sweep_axis.apply(&spec.scenario, value)?;
    let inst = base.with_scenario(sc)?;
    let config = OptimizerConfig { scheme, ..spec.optimizer.clone() };
    let start = Instant::now();
    let result = optimize(&inst, &config);
    let wall_ms = if spec.record_timing { start.elapsed().as_secs_f64() * 1e3 } else { 0.0 };
    let mut rec = RunRecord {
        trial,
        seed,
        scheme,
        sweep_axis: spec.sweep_axis,
        sweep_value: value,
        sum_rate_bps: f64::NAN,
        secrecy_sum_rate_bps: f64::NAN,
        w_p1_hz: f64::NAN,
        w_p2_hz: f64::NAN,
        w_s_hz: f64::NAN,
        iterations: 0,
        feasible: false,
        wall_ms,
    };
    let out = match result {
        Ok(out) => out,
        Err(Error::InfeasibleScenario(_)) => return Ok(rec),
        Err(e) => {
            return Err(Error::Numerical(format!(
                "trial {trial} (seed {seed}), {scheme}, {} = {value}: {e}",
                spec.sweep_axis
            )))
        }
    };
    let d = &out.design;
    rec.sum_rate_bps = d.sum_rate();
    rec.secrecy_sum_rate_bps = secrecy_sum_rate(d, &inst.scenario);
    rec.w_p1_hz = d.bands.w_private[0];
    rec.w_p2_hz = d.bands.w_private[1];
    rec.w_s_hz = d.bands.w_shared;
    rec.iterations = out.iterations;
    rec.feasible = constraint_report(&inst, d)?.is_feasible(&inst.scenario, FEASIBLE_REL_TOL);
    if let Some(f) = inspect {
        f(&inst, &out, &rec);
    }
    Ok(rec)
}

/// Runs every trial (in parallel) and returns the records in
/// (trial, scheme, sweep value) order.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<RunRecord>> {
    run_inner(spec, None)
}

/// [`run_experiment`] that also hands every optimized design to `inspect`,
/// for checks that need more than the CSV columns.
pub fn run_experiment_with(spec: &ExperimentSpec, inspect: Inspector<'_>) -> Result<Vec<RunRecord>> {
    run_inner(spec, Some(inspect))
}

fn run_inner(spec: &ExperimentSpec, inspect: Option<Inspector<'_>>) -> Result<Vec<RunRecord>> {
    spec.validate()?;
    let per_trial: Vec<Vec<RunRecord>> = (0..spec.trials)
        .into_par_iter()
        .map(|trial| {
            let seed = spec.base_seed.wrapping_add(trial as u64);
            let base = Instance::generate(spec.scenario.clone(), seed)?;
            let mut rows = Vec::with_capacity(spec.schemes.len() * spec.sweep_values.len());
            for &scheme in &spec.schemes {
                for &value in &spec.sweep_values {
                    rows.push(run_one(spec, &base, trial, seed, scheme, value, inspect)?);
                }
            }
            Ok(rows)
        })
        .collect::<Result<_>>()?;
    Ok(per_trial.into_iter().flatten().collect())
}

pub fn write_records(out: impl Write, records: &[RunRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if records.is_empty() {
        w.write_record(CSV_HEADER.split(','))?;
    }
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_records(input: impl std::io::Read) -> Result<Vec<RunRecord>> {
    let mut r = csv::Reader::from_reader(input);
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}

/// [`run_experiment`] followed by writing the CSV to `path`. The file is
/// created before any trial runs so that a bad path fails fast.
pub fn run_to_file(spec: &ExperimentSpec, path: &std::path::Path) -> Result<Vec<RunRecord>> {
    spec.validate()?;
    let file = File::create(path).map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))?;
    let records = run_experiment(spec)?;
    write_records(std::io::BufWriter::new(file), &records)?;
    Ok(records)
}
