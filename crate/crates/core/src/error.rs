use thiserror::Error;

/// Errors raised by the numeric routines and file formats.
///
/// Numeric payloads are reported as `f64` regardless of the scalar type the
/// failing routine was instantiated with.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix must be square, got {rows} rows with {cols} columns")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix dimension must be at least 1")]
    Empty,

    #[error("non-finite value encountered")]
    NonFinite,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{routine} did not converge after {iterations} iterations (best estimate {estimate:e})")]
    NoConvergence {
        routine: &'static str,
        iterations: usize,
        estimate: f64,
    },

    #[error("shifted QR iteration did not converge after {steps} steps (partial residual {residual:e})")]
    QrNoConvergence { steps: usize, residual: f64 },

    #[error("matrix is singular to working precision (smallest singular value {sigma_min:e})")]
    Singular { sigma_min: f64 },

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("input is not upper triangular (lower-triangle magnitude {magnitude:e})")]
    NotTriangular { magnitude: f64 },

    #[error("conditioning cap exceeded: t = {t:e} gives kappa = {kappa:e} > {cap:e}")]
    ConditioningExceeded { t: f64, kappa: f64, cap: f64 },

    #[error("no spectral gap: rho = {rho} is not below 1")]
    NoSpectralGap { rho: f64 },

    #[error("graph is not strongly connected")]
    NotStronglyConnected,

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
