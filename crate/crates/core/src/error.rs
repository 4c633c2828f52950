use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Error type shared by all modules of the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid argument (degree/dimension out of range, non-positive counts, ...).
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// Mesh file could not be parsed; carries the 1-based line number.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// Invalid geometry (tangled element, negative Jacobian, ...).
    #[error("geometry error: {0}")]
    Geometry(String),

    /// A field left the admissible set of its energy model.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative method failed to converge.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// A field does not have the shape a diagnostic requires.
    #[error("shape error: {0}")]
    Shape(String),

    /// A least-squares fit could not be performed.
    #[error("fit error: {0}")]
    Fit(String),
}
