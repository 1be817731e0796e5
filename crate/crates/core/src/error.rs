use thiserror::Error;

/// Errors raised by state validation, field evaluation, stepping and diagnostics.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ContactError {
    #[error("integration factor must be positive, got lambda = {0}")]
    NonPositiveLambda(f64),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("singular step: denominator {denominator:e} below threshold")]
    StepSingular { denominator: f64 },
    #[error("overdamped regime unsupported: gamma = {gamma} >= 2 omega = {}", 2.0 * .omega)]
    OverdampedUnsupported { omega: f64, gamma: f64 },
    #[error("insufficient data: {0}")]
    InsufficientData(&'static str),
    #[error("invalid model spec: {0}")]
    InvalidSpec(String),
    #[error("invalid integrator config: {0}")]
    InvalidConfig(String),
    #[error("trajectory is empty")]
    EmptyTrajectory,
    #[error("unsupported model: {0}")]
    UnsupportedModel(String),
    #[error("trajectory length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("trajectory too short: {0}")]
    TooShort(String),
    #[error("no zero crossings for oscillator {0}")]
    NoCrossings(usize),
}

pub type Result<T> = std::result::Result<T, ContactError>;
