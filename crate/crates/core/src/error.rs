use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("infeasible instance: 2m = {total_degree} exceeds d*n = {capacity}")]
    Infeasible { total_degree: u64, capacity: u64 },

    #[error("gave up after {attempts} {stage} attempts (n = {n}, m = {m}, d = {d})")]
    RetryLimit {
        stage: &'static str,
        attempts: u64,
        n: usize,
        m: usize,
        d: usize,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("enumeration refused: about {estimate:.3e} edge subsets exceed the limit of {limit:.0e}")]
    TooLarge { estimate: f64, limit: f64 },

    #[error("sampled graph {0} is not in the enumerated ensemble")]
    NotInEnsemble(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short stable identifier used in machine-readable error lines.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Infeasible { .. } => "infeasible",
            Error::RetryLimit { .. } => "retry_limit",
            Error::Precondition(_) => "precondition",
            Error::TooLarge { .. } => "too_large",
            Error::NotInEnsemble(_) => "not_in_ensemble",
            Error::Config(_) => "config",
            Error::Parse { .. } => "parse",
            Error::Io(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
