//! Experiment configuration, Monte Carlo sweeps, CSV output and the
//! `validate` self-check.

pub mod cases;
mod config;
mod experiment;
mod validate;

pub use config::{ExperimentConfig, DEFAULT_TRIALS};
pub use experiment::{
    read_records, run_experiment, run_experiment_with, run_to_file, write_records, ExperimentSpec, Inspector,
    RunRecord, SweepAxis, CSV_HEADER, FEASIBLE_REL_TOL,
};
pub use validate::{
    check_det_ratio, check_direction, check_monotone, check_sampling, check_tightness, validate, CheckOutcome,
    MutationOutcome, ValidationReport,
};

#[cfg(test)]
mod tests;
