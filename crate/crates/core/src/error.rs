use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix entries must be finite")]
    NonFinite,

    #[error("QR iteration did not converge within {sweeps} sweeps")]
    NonConvergence { sweeps: usize },

    /// Eigenvalue gap too small for the requested computation.
    #[error("degenerate spectrum: gap {gap:.3e} below threshold {threshold:.3e}")]
    DegenerateSpectrum { gap: f64, threshold: f64 },

    #[error("matrix is numerically singular")]
    SingularMatrix,

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("stereographic pole: z = {z} is too close to 1")]
    PoleSingularity { z: f64 },

    #[error("argument must be positive, got {0}")]
    NonPositiveArgument(f64),

    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),

    #[error("ensemble not supported here: {0}")]
    UnsupportedEnsemble(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
