use thiserror::Error;

/// Errors raised by the solver pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid problem specification: {0}")]
    InvalidSpec(String),

    #[error("negative amplitude {0:e} passed to the dual algebraic equation")]
    NegativeAmplitude(f64),

    #[error("degenerate load: {0}")]
    DegenerateLoad(String),

    #[error("malformed load: {0}")]
    MalformedLoad(String),

    #[error(
        "amplitude overflow at r = {radius}: |sigma|^2 = {amplitude:e} reaches the critical value {critical:e}"
    )]
    AmplitudeOverflow {
        radius: f64,
        amplitude: f64,
        critical: f64,
    },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("duality gap {gap:e} exceeds tolerance {tolerance:e} on branch {branch}")]
    GapViolation {
        branch: usize,
        gap: f64,
        tolerance: f64,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
