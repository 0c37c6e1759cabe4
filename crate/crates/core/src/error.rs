use thiserror::Error;

use crate::model::ValidationReport;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("invalid instance: wave list is empty")]
    NoWaves,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExpectationError {
    #[error("failure rate must be non-negative, got {0}")]
    NegativeRate(f64),
    #[error("type {type_id} wave {wave}: {flown} aircraft flown but only {expected} expected")]
    InfeasibleFlow {
        type_id: usize,
        wave: usize,
        flown: u32,
        expected: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("instance failed validation:\n{0}")]
    InvalidInstance(ValidationReport),
    #[error("search space of {size} exceeds the cap of {cap}")]
    SearchSpaceTooLarge { size: u128, cap: u128 },
}

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported document version {found:?}, expected {expected:?}")]
    Version { found: String, expected: &'static str },
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("invalid generator parameters: {0}")]
    Params(String),
    #[error("seed {seed}: could not place {waves} waves inside horizon {horizon} after {attempts} attempts")]
    WavePlacement {
        seed: u64,
        waves: usize,
        horizon: i64,
        attempts: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("policy must satisfy 1 <= reschedule interval <= horizon, got P{horizon}{every}")]
    Policy { horizon: usize, every: usize },
    #[error("sub-problem at clock {clock} failed: {source}")]
    Solve {
        clock: i64,
        #[source]
        source: SolveError,
    },
}
