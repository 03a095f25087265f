use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix does not have full column rank")]
    RankDeficient,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("inconsistent filtration data: {0}")]
    InconsistentFlag(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("enumeration budget of {0} nodes exhausted")]
    BudgetExhausted(u64),
    #[error("unverified certificate: {0}")]
    UnverifiedCertificate(String),
    #[error("function undefined at {0}")]
    Undefined(String),
    #[error("operation requires a probability measure, got the zero measure")]
    ZeroMeasure,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("sign of a real number undecided at the precision cap")]
    PrecisionCap,
    #[error("degenerate: {0}")]
    Degenerate(String),
}

impl Error {
    /// Budget-type failures: results are missing, not wrong.
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            Error::BudgetExhausted(_) | Error::UnverifiedCertificate(_) | Error::PrecisionCap
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
