use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("query budget exhausted ({used} of {budget} used)")]
    BudgetExhausted { budget: u64, used: u64 },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("instance too large for exhaustive search: n = {n} exceeds {limit}")]
    TooLarge { n: usize, limit: usize },

    #[error("unknown verification suite `{0}`")]
    UnknownSuite(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
