use thiserror::Error;

/// Errors raised by the design, synthesis and verification routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("generator index {0} out of range (expected 1, 2 or 3)")]
    IndexOutOfRange(usize),

    #[error("non-finite input: {0}")]
    NonFinite(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The Wei-Norman coefficient matrix is not invertible, |cos 2g2| at or below the threshold.
    #[error("Wei-Norman coordinates are singular: |cos 2g2| = {cos_2g2:e}")]
    SingularCoordinates { cos_2g2: f64 },

    /// The dependent base function g1 cannot be recovered at `t`.
    #[error("degenerate parameter profile at t = {t}: {reason}")]
    DegenerateProfile { t: f64, reason: &'static str },

    #[error("u2 root is inconsistent with the F2 coefficient at t = {t} (residual {residual:e})")]
    BranchInconsistency { t: f64, residual: f64 },

    #[error("endpoint conditions violated: |D|_inf = {norm:e}")]
    EndpointViolation { norm: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
