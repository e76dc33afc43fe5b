//! Crate-wide error type.

/// Errors surfaced by constructors and solvers.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// Construction-time validation failure (bad support, masses, coefficients, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The sampled sign pattern of the second derivative matches no supported shape.
    #[error("objective shape unrecognized: {0}")]
    ShapeUnrecognized(String),

    /// A solver was handed an objective of the wrong shape class.
    #[error("objective shape mismatch: expected {expected}, found {found}")]
    ShapeError {
        expected: &'static str,
        found: String,
    },

    /// No interior bitangent line exists (or the search failed to converge).
    #[error("no bitangent: {0}")]
    NoBitangent(String),

    /// A conditional expectation was requested over a set of negligible mass.
    #[error("empty interval: mass {mass:.3e} on [{lo}, {hi}] is below tolerance")]
    EmptyInterval { lo: f64, hi: f64, mass: f64 },

    /// A signal does not fit the prior it was applied to.
    #[error("malformed signal: {0}")]
    MalformedSignal(String),

    /// An enumeration request exceeds the hard instance-size cap.
    #[error("instance too large: {detail} (cap {cap})")]
    TooLarge { detail: String, cap: usize },

    /// A bipooling construction was requested without a valid certificate.
    #[error("certificate required: {0}")]
    CertificateRequired(String),

    /// A block structure is not expressible as a monotone signal.
    #[error("nonmonotone signal: {0}")]
    NonmonotoneSignal(String),

    /// A problem configuration failed validation before any solver ran.
    #[error("config invalid: {0}")]
    ConfigInvalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
