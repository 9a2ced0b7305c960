use thiserror::Error;

/// Rejected model parameters, states or population settings.
///
/// Every variant names the offending field so callers can surface it
/// directly as a diagnostic.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("{field}: {reason}")]
    InvalidField { field: &'static str, reason: String },
    #[error("state densities sum to {sum}, expected 1")]
    NotNormalized { sum: f64 },
}

impl ModelError {
    pub(crate) fn field(field: &'static str, reason: impl Into<String>) -> Self {
        ModelError::InvalidField {
            field,
            reason: reason.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OdeError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("integrator diverged at t={t}: component {component} = {value} (step too large?)")]
    Diverged { t: f64, component: usize, value: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Ledger(#[from] LedgerError),
    #[error("ensemble needs at least two runs, got {0}")]
    TooFewRuns(usize),
    #[error("ensemble runs have mismatched horizons ({expected} vs {found} snapshots)")]
    HorizonMismatch { expected: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LedgerError {
    #[error("cannot append to a chain without a genesis block")]
    MissingGenesis,
    #[error("block timestamp {timestamp} precedes previous block timestamp {previous}")]
    TimestampRegression { timestamp: f64, previous: f64 },
    #[error("invalid timestamp {0}")]
    InvalidTimestamp(f64),
    #[error("receiver {0} is not enrolled in the contract")]
    ReceiverNotEnrolled(u32),
    #[error("spreader {spreader} does not hold information {info_id}")]
    MissingInformation { spreader: u32, info_id: u64 },
    #[error("{field}: {reason}")]
    InvalidParams { field: &'static str, reason: String },
}
