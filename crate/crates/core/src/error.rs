//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by model construction, conjugate updates, sampling and I/O.
#[derive(Debug, Error)]
pub enum SmbsError {
    #[error("state sequence must be non-empty")]
    EmptyPath,

    #[error("state index {index} out of range for a space of {n_states} states")]
    StateOutOfRange { index: usize, n_states: usize },

    #[error("unknown state id {0}")]
    UnknownStateId(u32),

    #[error("state space must be non-empty with distinct ids")]
    InvalidStateSpace,

    #[error("consecutive visited states must differ")]
    RepeatedVisitedState,

    #[error("holding times must be positive integers")]
    NonPositiveHolding,

    #[error("blocks cover {covered} time steps but horizon {horizon} requires {required}")]
    LengthMismatch {
        covered: u64,
        horizon: u64,
        required: u64,
    },

    #[error("observations must be positive integers")]
    NonPositiveObservation,

    #[error("precision values must be strictly positive and finite")]
    InvalidPrecision,

    #[error("invalid centering distribution: {0}")]
    InvalidCentering(String),

    #[error("base measure must be non-negative with positive finite total mass")]
    InvalidBaseMeasure,

    #[error("jump base measure of state {0} must place zero mass on itself")]
    NonZeroSelfMass(usize),

    #[error("no probability mass at or beyond holding age {age} for state {state}")]
    NoMassAtAge { state: usize, age: u64 },

    #[error("hazard undefined at t={0}: zero mass at and beyond t")]
    HazardUndefined(u64),

    #[error("hazard overshoot at t={t}: computed {value}, expected at most 1")]
    HazardOvershoot { t: u64, value: f64 },

    #[error("transition matrix invalid: {0}")]
    InvalidTransitionMatrix(String),

    #[error("urn has zero total mass")]
    EmptyUrn,

    #[error("urn walk exceeded {0} draws without termination")]
    WalkCapExceeded(u64),

    #[error("incremental update inconsistent: expected state {expected_state} at age {expected_age}, got state {state} at age {age}")]
    InconsistentIncrement {
        expected_state: usize,
        expected_age: u64,
        state: usize,
        age: u64,
    },

    #[error("operation not supported for this urn model: {0}")]
    UnsupportedUrnModel(&'static str),

    #[error("equilibrium distribution does not exist: {0}")]
    NoEquilibrium(String),

    #[error("series did not converge within {0} terms")]
    SeriesNotConverged(u64),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, SmbsError>;
