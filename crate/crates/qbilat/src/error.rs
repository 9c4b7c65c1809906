use thiserror::Error;

/// Errors shared across the numeric and formal backends.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Principal-branch power at a branch point (base 0 with non-positive real exponent).
    #[error("branch point: {0}")]
    BranchPoint(String),

    /// A pole was hit: gamma at a non-positive integer, or a vanishing
    /// denominator factor in a shifted-factorial or infinite product.
    #[error("pole: {0}")]
    Pole(String),

    /// Arguments outside the operation's domain (convergence annulus,
    /// excluded points, malformed parameters).
    #[error("domain: {0}")]
    Domain(String),

    /// The term budget was exhausted before the requested tolerance was met.
    #[error("budget exhausted: {0}")]
    Budget(String),

    /// Formal-series inversion of a series with vanishing leading coefficient.
    #[error("not invertible: {0}")]
    NotInvertible(String),

    /// Too few points for the requested extrapolation order.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// A formal-series valuation precondition failed, so the requested
    /// truncation order cannot be certified.
    #[error("precision contract violated: {0}")]
    PrecisionContract(String),

    /// Malformed configuration or usage input.
    #[error("usage: {0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, Error>;
