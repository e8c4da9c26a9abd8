use thiserror::Error;

/// Errors raised by the core routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A vector's length does not match the problem dimension.
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch {
        /// Required length.
        expected: usize,
        /// Supplied length.
        actual: usize,
    },

    /// An argument violates a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),

    /// Weights are outside `(0, 1]` or not non-increasing.
    #[error("invalid weights: {0}")]
    InvalidWeights(&'static str),

    /// The lattice size is not prime.
    #[error("{0} is not prime")]
    NotPrime(u64),

    /// The projected index set exceeds the configured cardinality cap.
    #[error("projected index set size {projected:.3e} exceeds cap {cap}")]
    CapExceeded {
        /// Upper bound on the cardinality.
        projected: f64,
        /// Configured cap.
        cap: u64,
    },

    /// `N_*` is below one, so the index set would be empty.
    #[error("budget too small for these weights and tau: N_* = {0} < 1")]
    BudgetTooSmall(f64),

    /// No prime satisfies the budget inequality.
    #[error("no prime N satisfies the budget M_max = {0}")]
    NoFeasiblePrime(u64),

    /// A root finder failed to bracket or converge.
    #[error("root finding failed: {0}")]
    RootFinding(&'static str),

    /// Oracle norm and coefficients are inconsistent (negative squared error).
    #[error("inconsistent oracle: squared error {0:e} is negative")]
    InconsistentOracle(f64),

    /// Too few or invalid points for a regression.
    #[error("rate fit: {0}")]
    Fit(&'static str),
}

/// Result alias with the crate [`Error`].
pub type Result<T> = core::result::Result<T, Error>;
