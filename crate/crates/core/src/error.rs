use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("invalid design: {0}")]
    InvalidDesign(String),

    #[error("infeasible scenario: {0}")]
    InfeasibleScenario(String),

    /// The warm start handed to the subsolver violates one of the surrogate
    /// constraints. Surrogates are tight at their anchor, so this points at a
    /// bug in the auxiliary-variable update rather than at user input.
    #[error("anchor violation: constraint `{label}` evaluates to {value:e} at the warm start")]
    AnchorViolation { label: String, value: f64 },

    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),

    #[error("numerical trouble: {0}")]
    Numerical(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("malformed channel dump: {0}")]
    Dump(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
