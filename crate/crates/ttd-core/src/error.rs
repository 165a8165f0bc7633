use thiserror::Error;

/// Errors produced by codebook construction, analysis, and link evaluation.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error("formulation mismatch: {0}")]
    Formulation(String),

    /// Sector cannot be realized: the array is too small to induce the
    /// delay wrap-around (requires ceil(D) < N_T).
    #[error("infeasible design: ceil(D) = {d_ceil} must be < N_T = {n_t}")]
    Infeasible { d_ceil: usize, n_t: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
