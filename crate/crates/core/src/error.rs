use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A distribution spec failed validation at construction.
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    /// An argument was outside its documented domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Two distributions from incompatible families (or alphabet sizes)
    /// were combined.
    #[error("family mismatch: {0}")]
    FamilyMismatch(String),

    /// An observation has zero density under every hypothesis in play.
    #[error("data outside support: {0}")]
    OutsideSupport(String),

    /// The norm solver failed to bracket or converge.
    #[error("solver failure: {0}")]
    Solver(String),

    /// Exact enumeration requested for a distribution family that has no
    /// finite alphabet.
    #[error("exact enumeration unsupported: {0}")]
    UnsupportedExact(String),

    /// Exact enumeration would exceed the documented state cap.
    #[error("exact enumeration too large: {0}")]
    TooLarge(String),
}

pub type Result<T> = std::result::Result<T, Error>;
