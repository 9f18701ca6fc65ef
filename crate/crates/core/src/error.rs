use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right} variables")]
    DimensionMismatch { left: usize, right: usize },

    #[error("ambient dimension n = {0} is not supported (need 1 <= n <= {max})", max = crate::monomial::MAX_DIMENSION)]
    InvalidDimension(usize),

    #[error("monomial set is empty")]
    EmptySet,

    #[error("need at least 2 monomials, got {0}")]
    TooFewMonomials(usize),

    #[error("duplicate monomial {0}")]
    DuplicateMonomial(String),

    #[error("monomial {monomial} has degree {found}, expected {expected}")]
    DegreeMismatch {
        monomial: String,
        expected: u64,
        found: u64,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("out of range: {0}")]
    OutOfRange(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("brute force supports at most {cap} monomials, got {size}")]
    TooLargeForBruteForce { size: usize, cap: usize },

    #[error("gcd closure exceeded the cap of {cap} elements")]
    ClosureCap { cap: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Hypothesis(_) => 3,
            Error::TooLargeForBruteForce { .. } | Error::ClosureCap { .. } => 4,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
