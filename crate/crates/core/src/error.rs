use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid group parameters m={m}, l={ell}: {reason}")]
    InvalidParams { m: i64, ell: i64, reason: &'static str },

    #[error("parse error at byte {position}: {reason}")]
    Parse { position: usize, reason: String },

    #[error("canonicalization sweep exceeded {bound} steps")]
    NonTerminating { bound: usize },

    #[error("turn graph needs a hyperbolic word with t-exponent 0")]
    NotHyperbolicZeroExponent,

    #[error("{what}: count {count} exceeds cap {cap}")]
    LimitExceeded { what: &'static str, count: usize, cap: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("word does not have alternating t-shape")]
    NotAlternating,

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("N={n} does not clear the denominators of the LP point")]
    NonIntegralScaling { n: u64 },

    #[error("input is elliptic")]
    EllipticInput,

    #[error("input has nonzero t-exponent {0}")]
    NonZeroTExponent(i64),

    #[error("copy density did not stabilize: {0}")]
    NonStabilized(String),

    #[error("integer overflow in {0}")]
    Overflow(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
