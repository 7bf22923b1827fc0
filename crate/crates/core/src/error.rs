//! Error type shared across the crate.

use thiserror::Error;

#[derive(Error, Debug)]
pub enum Error {
    #[error("grid too small: packet boundary magnitude {magnitude:.3e} exceeds {limit:.3e}")]
    GridTooSmall { magnitude: f64, limit: f64 },

    #[error("operation requires a periodic (ring) grid")]
    NotPeriodic,

    #[error("aliasing detected: offset-correlation boundary magnitude {magnitude:.3e} exceeds {limit:.3e}")]
    AliasingDetected { magnitude: f64, limit: f64 },

    #[error("grid mismatch between operands")]
    GridMismatch,

    #[error("operator truncation too severe: [Q,P] deviates from i*hbar by {deviation:.3e} on the trusted block")]
    TruncationTooSevere { deviation: f64 },

    #[error("polynomial degree overflow: {degree} exceeds the limit {limit}")]
    DegreeOverflow { degree: u32, limit: u32 },

    #[error("bandwidth exceeded: {share:.3e} of spectral energy in the top shell (limit {limit:.3e})")]
    BandwidthExceeded { share: f64, limit: f64 },

    #[error("evolution unstable: norm drift {drift:.3e} per unit time exceeds {limit:.3e}")]
    StabilityViolation { drift: f64, limit: f64 },

    #[error("coefficient truncation overflow: tail share {share:.3e} exceeds {limit:.3e}")]
    TruncationOverflow { share: f64, limit: f64 },

    #[error("quadrature divergence: function grows faster than the Gaussian weight controls")]
    QuadratureDivergence,

    #[error("matrix is not Hermitian with respect to the space inner product (deviation {deviation:.3e})")]
    NonHermitian { deviation: f64 },

    #[error("state violates the admission rules of the {formalism} backend: {reason}")]
    FormalismMismatch { formalism: String, reason: String },

    #[error("ring momentum incommensurate: p0*R/hbar = {value} is not an integer")]
    IncommensurateMomentum { value: f64 },

    #[error("unsupported state kind for this operation: {0}")]
    UnsupportedState(String),

    #[error("config parse error: {0}")]
    ParseError(String),

    #[error("invalid config field `{field}`: {reason}")]
    ValidationError { field: String, reason: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
