use thiserror::Error;

/// Errors raised across the certification pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Caller mixed incompatible objects (e.g. elements from different groups).
    #[error("usage error: {0}")]
    Usage(String),

    /// Input data violates a documented invariant.
    #[error("validation error: {0}")]
    Validation(String),

    /// A configured size cap was exceeded.
    #[error("resource limit exceeded: {what} (cap {cap})")]
    Resource { what: String, cap: usize },

    /// An element could not be reached from the generators within the search bound.
    #[error("element {element} not in generated subgroup within radius {radius}")]
    Unreachable { element: String, radius: usize },

    /// The Gram problem cannot be feasible on this basis.
    #[error("structurally infeasible: target support not covered by pair products: {}", missing.join(", "))]
    StructuralInfeasibility { missing: Vec<String> },

    /// NaN or overflow inside a floating point routine.
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// Rounded Gram matrix could not be repaired into a PSD matrix.
    #[error("factorization failed: {0}")]
    Factorization(String),

    /// Unparseable file or field.
    #[error("malformed input: {0}")]
    Malformed(String),

    /// An identity that must hold unconditionally failed.
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
