use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("integration did not converge: {0}")]
    NonConvergence(String),

    #[error("node budget exceeded: {requested} nodes requested, cap is {cap}")]
    NodeBudget { requested: usize, cap: usize },

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("integral diverges: {0}")]
    Divergent(String),

    #[error("degenerate least-squares design: {0}")]
    DegenerateFit(String),

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
