use thiserror::Error;

/// Errors raised by field evaluation, guidance and integration.
///
/// Positions and times are carried as `f64` regardless of the scalar type so
/// the error type stays non-generic.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("mode number must be >= 1, got {0}")]
    InvalidModeNumber(i64),

    #[error("position x = {x} lies outside the box [0, {length}]")]
    OutsideBox { x: f64, length: f64 },

    #[error("amplitude {amplitude:e} below node tolerance at (x = {x}, t = {t})")]
    NearNode { x: f64, t: f64, amplitude: f64 },

    #[error("guidance pole: S0 vanishes at (x = {x}, t = {t})")]
    Pole { x: f64, t: f64 },

    #[error("current density normalization needs a positive rest mass")]
    MasslessCurrent,

    #[error("stress tensor has complex eigenvalues {re} ± {im}i")]
    ComplexEigenvalues { re: f64, im: f64 },

    #[error("no time-like eigenvector: {0}")]
    NoTimelikeFlow(String),

    #[error("rapidity angle undefined because P·S = 0; use the eigenvector route")]
    UndefinedTheta,

    #[error("trajectory cannot start at (x = {x}, t = {t}): {reason}")]
    DegenerateStart { x: f64, t: f64, reason: String },

    #[error("tangent is null at tau = {tau} and the crossing could not be bracketed")]
    NullTangent { tau: f64 },

    #[error("mass-shell constraint violated: {0}")]
    ConstraintViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
