use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("Fock level {requested} exceeds the cutoff max_total = {max_total}")]
    Cutoff { requested: usize, max_total: usize },

    /// Truncation discarded more probability than the cutoff tolerates.
    #[error(
        "truncation lost {deficit:.3e} of the norm (tail_tol = {tail_tol:.1e}); \
         retry with max_total >= {suggested_max_total}"
    )]
    Convergence {
        deficit: f64,
        tail_tol: f64,
        suggested_max_total: usize,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    pub fn is_convergence(&self) -> bool {
        matches!(self, Error::Convergence { .. })
    }
}
