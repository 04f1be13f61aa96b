use thiserror::Error;

/// Errors raised across the index toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed group table, group mismatch, or an action the model catalog cannot carry.
    #[error("structural error: {0}")]
    Structural(String),

    /// Input outside the domain of an operation (t <= 0, empty fixed set, unsupported twist, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A delocalized divisor vanishes (Φ = identity on a nonzero normal bundle).
    #[error("singular divisor: {0}")]
    SingularDivisor(String),

    /// Quadrature could not reach the requested tolerance at the allowed resolution.
    #[error("resolution error: estimated error {estimate:e} at grid {grid}, try grid >= {suggested}")]
    Resolution {
        estimate: f64,
        grid: usize,
        suggested: usize,
    },

    /// Model document failed schema validation.
    #[error("schema violations:\n  {}", .0.join("\n  "))]
    Schema(Vec<String>),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
