use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An argument is outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A quadrature did not converge within the allowed refinements.
    #[error("quadrature did not converge: |delta|={residual:.3e} > tol={tol:.3e} after {refinements} refinements")]
    NonConvergence {
        residual: f64,
        tol: f64,
        refinements: usize,
    },

    /// The principal matrix is singular or numerically near-singular at this energy.
    #[error("principal matrix is singular near E (condition {condition:.3e}); energy is at or near a bound state")]
    SingularMatrix { condition: f64 },

    /// No calibrated constants are registered for the requested geometry.
    #[error("no calibrated bound constants for geometry: {0}")]
    MissingConstants(String),

    /// The operation is not defined for this geometry class.
    #[error("unsupported for this geometry: {0}")]
    Unsupported(String),

    /// Energy lies outside the admissible window of the model.
    #[error("energy window violation: {0}")]
    WindowViolation(String),

    /// A truncated spectral sum cannot meet the requested tolerance.
    #[error("mode truncation insufficient: tail estimate {tail:.3e} exceeds tolerance {tol:.3e}")]
    TruncationInsufficient { tail: f64, tol: f64 },

    /// A positivity property guaranteed by the admissible window failed.
    #[error("positivity violation: {0}")]
    PositivityViolation(String),

    /// Invalid parameters for a domain type.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
