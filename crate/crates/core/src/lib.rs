//! Joint bandwidth allocation, uplink power control and fronthaul quantization
//! for a two-tenant C-RAN uplink with spectrum pooling, multiplex-and-forward
//! backhaul cooperation between the cloud processors, and an
//! information-theoretic privacy constraint on what each CP can learn about
//! the other tenant's users.
//!
//! The crate is organized bottom-up:
//!
//! * [`model`]: scenarios, geometry, Rayleigh channels, backhaul RU subsets.
//! * [`metrics`]: compression rates, achievable rates, privacy leakage and
//!   constraint residuals, plus a Monte Carlo mutual-information oracle.
//! * [`fp`]: fractional-programming auxiliary variables and the convex
//!   surrogate constraints built from them.
//! * [`subsolver`]: a log-barrier interior-point method for the per-block
//!   convex subproblems.
//! * [`optimizer`]: the alternating outer loop and the baseline schemes.
//! * [`harness`]: config files, Monte Carlo sweeps, CSV output, self-checks.

pub mod error;
pub mod fp;
pub mod harness;
pub mod linalg;
pub mod metrics;
pub mod model;
pub mod optimizer;
pub mod subsolver;

#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
