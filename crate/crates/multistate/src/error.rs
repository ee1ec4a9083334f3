//! Crate-wide error type.
//!
//! Errors split into two broad categories that the CLI maps to distinct
//! exit codes: problems with the inputs (configuration, data files,
//! mismatched names) and numerical failures encountered during fitting.

use thiserror::Error;

/// Coarse failure category, used by the CLI to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    /// Bad configuration, malformed files, inconsistent names or shapes.
    Input,
    /// A numerical routine failed (non-finite values, impossible data).
    Numerical,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid state space: {0}")]
    InvalidStateSpace(String),

    #[error("invalid transition structure: {0}")]
    InvalidTransition(String),

    #[error("covariate `{name}` required by the model is missing")]
    MissingCovariate { name: String },

    #[error("covariate `{name}` has non-finite value {value}")]
    NonFiniteCovariate { name: String, value: f64 },

    #[error("parameter `{name}` is non-finite ({value})")]
    NonFiniteParameter { name: String, value: f64 },

    #[error("parameter set has {actual} entries but the model requires {expected}")]
    ParameterDimension { expected: usize, actual: usize },

    #[error("state {state} is absorbing under the current parameters; the jump distribution is undefined")]
    AbsorbingState { state: usize },

    #[error("state index {state} outside 1..={k}")]
    StateOutOfRange { state: usize, k: usize },

    #[error("horizon must be non-negative and finite, got {0}")]
    InvalidHorizon(f64),

    #[error("generator matrix is invalid: {0}")]
    InvalidGenerator(String),

    #[error("matrix exponential produced an entry {value} at ({row},{col}) below the round-off floor; input is likely not a valid generator")]
    MatexpNegativeEntry { row: usize, col: usize, value: f64 },

    #[error("uniformization tolerance must lie in (0, 1e-6], got {0}")]
    InvalidTolerance(f64),

    #[error("uniformization range t*max|q_rr| = {0} exceeds the supported 1e4")]
    UniformizationRange(f64),

    #[error("panel data invalid: {0}")]
    InvalidPanel(String),

    #[error(
        "observed transition {from_state}->{to_state} for subject `{subject}` over ({from_time}, {to_time}) has probability zero under the model"
    )]
    ImpossibleTransition {
        subject: String,
        from_time: f64,
        to_time: f64,
        from_state: usize,
        to_state: usize,
    },

    #[error("objective is non-finite near coordinate {coordinate} even after shrinking the step")]
    NonFiniteObjective { coordinate: usize },

    #[error("objective is not finite at the starting parameters: {0}")]
    NonFiniteStart(f64),

    #[error("optimization failed: {0}")]
    OptimizationFailed(String),

    #[error("pipeline error: {0}")]
    Pipeline(String),

    #[error("variable `{variable}` in group `{group}` has zero variance; cannot standardize")]
    ZeroVariance { group: String, variable: String },

    #[error("cut-points are degenerate: fewer than 3 distinct values (or tied tertiles)")]
    DegenerateCutPoints,

    #[error("negative yield {0} cannot be assigned a state")]
    NegativeYield(f64),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::ImpossibleTransition { .. }
            | Error::NonFiniteObjective { .. }
            | Error::NonFiniteStart(_)
            | Error::OptimizationFailed(_)
            | Error::MatexpNegativeEntry { .. }
            | Error::UniformizationRange(_)
            | Error::AbsorbingState { .. } => ErrorCategory::Numerical,
            _ => ErrorCategory::Input,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
