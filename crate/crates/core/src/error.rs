//! Error type shared by all modules of the crate.

/// Errors reported by generators, detectors, solvers, and the harness.
///
/// Numerical failures that occur *inside* a recovery run (rank-deficient
/// least squares, an all-zero solution) are also available as a
/// [`RecoveryStatus`](crate::history::RecoveryStatus) so that benchmark
/// sweeps can record a failed trial instead of aborting.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A matrix or vector dimension is zero or otherwise unusable.
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    /// Two operands disagree on a shared dimension.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// Sign-flip ratio outside `[0, 0.5)`.
    #[error("sign-flip ratio must satisfy 0 <= rho < 0.5, got {0}")]
    InvalidFlipRatio(f64),

    /// A scalar argument is outside its documented domain.
    #[error("argument out of range: {0}")]
    OutOfRange(String),

    /// Support-detection accuracy is undefined for an empty reference support.
    #[error("true support must be nonempty")]
    EmptyTrueSupport,

    /// Requested top-`l` selection size is not in `[1, n]`.
    #[error("invalid target size: {0}")]
    InvalidTargetSize(String),

    /// An algorithm parameter violates its documented precondition.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The least-squares system has numerically dependent columns.
    #[error("rank-deficient system: {0}")]
    RankDeficient(String),

    /// Normalization of an exactly-zero vector was requested.
    #[error("cannot normalize a zero vector")]
    ZeroVector,

    /// An aggregate was requested over an empty record set.
    #[error("empty input: {0}")]
    EmptyInput(String),

    /// A sweep configuration failed validation before any work started.
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    /// Retried signal generation still produced a zero support entry.
    #[error("signal generation produced a zero entry on the support twice")]
    DegenerateSignal,
}

pub type Result<T> = std::result::Result<T, Error>;
