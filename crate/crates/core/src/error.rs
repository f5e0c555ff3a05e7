use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("symbol is identically zero")]
    ZeroSymbol,

    #[error("reduced symbol coefficient at degree {degree} is not real ({re} + {im}i)")]
    ComplexReduction { degree: usize, re: f64, im: f64 },

    #[error("need at least {needed} nonzero coefficients, found {found}")]
    TooFewCoefficients { needed: usize, found: usize },

    #[error("quadrature did not converge: last two values {last} and {previous}")]
    NonConvergence { last: f64, previous: f64 },

    #[error("budget exceeded at level {level}: {detail}")]
    BudgetExceeded { level: u32, detail: String },

    #[error("index {index} exceeds the truncation budget {budget}")]
    TruncationBudget { index: u64, budget: u64 },

    #[error("kernel pole: r * lambda = 1")]
    Pole,

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
