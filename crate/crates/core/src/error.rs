use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("positivity violated: smallest eigenvalue {min_eigenvalue:e}")]
    Positivity { min_eigenvalue: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    #[error("quadrature did not reach tolerance {requested:e} (achieved {achieved:e})")]
    Accuracy { requested: f64, achieved: f64 },

    #[error("range error: {0}")]
    Range(String),

    #[error("inconsistent dynamics: {0}")]
    Inconsistency(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("hierarchy of {requested} auxiliary operators exceeds budget {budget}; reduce depth or Matsubara cutoff")]
    Capacity { requested: usize, budget: usize },

    #[error("hierarchy did not converge within budget (last delta {last_delta:e}, depth {depth}, cutoff {cutoff})")]
    NonConvergence {
        last_delta: f64,
        depth: usize,
        cutoff: usize,
    },

    #[error("state lost positivity at t = {time} (eigenvalue {min_eigenvalue:e}); increase the hierarchy depth")]
    TruncationTooSmall { time: f64, min_eigenvalue: f64 },

    #[error("analytic oracle not applicable: {0}")]
    OracleInapplicable(String),

    #[error("at t = {time}: {source}")]
    AtTime {
        time: f64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn at_time(self, time: f64) -> Self {
        Error::AtTime {
            time,
            source: Box::new(self),
        }
    }

    /// Strips time annotations and returns the underlying error.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtTime { source, .. } => source.root(),
            other => other,
        }
    }
}
