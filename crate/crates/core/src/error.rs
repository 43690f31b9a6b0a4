//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the library operations.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated an operation's precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A matrix that must be positive semidefinite has an eigenvalue below the floor.
    #[error("matrix is not positive semidefinite: min eigenvalue {min_eig:e} < -{eps:e}")]
    NotPsd { min_eig: f64, eps: f64 },

    /// Convex-combination weights are negative or do not sum to one.
    #[error("invalid convex combination: {0}")]
    InvalidCombination(String),

    /// A vector configuration violates its unit-norm or dimension contract.
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    /// A candidate primal point violates the feasibility constraints.
    #[error("infeasible point: {0}")]
    InfeasiblePoint(String),

    /// A measurement parametrization outside the admissible set.
    #[error("invalid measurement: {0}")]
    InvalidMeasurement(String),

    /// A quantity that must come out real or finite did not.
    #[error("numerical integrity violation: {0}")]
    NumericalIntegrity(String),

    /// Requested problem size exceeds the supported range.
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
