//! Error type shared by all modules of the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFiniteEntry { row: usize, col: usize },

    #[error("matrix is not Hermitian: max |a_ij - conj(a_ji)| = {deviation:.3e}")]
    NotHermitian { deviation: f64 },

    #[error("eigensolver failed to converge")]
    ConvergenceFailure,

    #[error("matrix is not positive semidefinite: min eigenvalue {min_eigenvalue:.3e}")]
    NotPsd { min_eigenvalue: f64 },

    #[error("site {site} out of range for a chain of {n} spins")]
    SiteOutOfRange { site: usize, n: usize },

    #[error("site {site} listed more than once")]
    DuplicateSite { site: usize },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid density matrix: {reason}")]
    InvalidDensityMatrix { reason: String },

    #[error("invalid chain specification: {reason}")]
    InvalidChainSpec { reason: String },

    #[error("invalid time grid: {reason}")]
    InvalidGrid { reason: String },

    #[error("argument out of domain: {name} = {value} not in [{min}, {max}]")]
    DomainError {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },
}
