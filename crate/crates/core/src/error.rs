use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("size limit exceeded: {what} is {size}, limit {limit}")]
    Size {
        what: &'static str,
        size: u128,
        limit: u128,
    },

    #[error("level error: matrix size {n} exceeds family depth {max}")]
    Level { n: usize, max: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("sampling exhausted: accepted {accepted} of {attempts} proposals (rate {rate:.3e}), needed {needed}")]
    SamplingExhausted {
        accepted: usize,
        attempts: usize,
        needed: usize,
        rate: f64,
    },

    #[error("identity not certified at level {level}: residual {residual:.3e} >= tol {tol:.3e}")]
    NotCertified {
        level: usize,
        residual: f64,
        tol: f64,
    },

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Dimension { expected, found })
    }
}
