use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid range: {0}")]
    InvalidRange(String),
    #[error("degenerate profile (h identically -1)")]
    DegenerateProfile,
    #[error("constraint violation: {0}")]
    ConstraintViolation(String),
    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),
    #[error("no convergence after {iter} iterations (residual {residual:.3e})")]
    NoConvergence { iter: usize, residual: f64 },
    #[error("no catenoid spans the two unit circles at l = {0}")]
    NoCatenoid(f64),
    #[error("no sign change on [{lo}, {hi}]: g(lo) = {g_lo:.6e}, g(hi) = {g_hi:.6e}")]
    NoSignChange { lo: f64, hi: f64, g_lo: f64, g_hi: f64 },
    #[error("inner solve failed for profile {values:?}: {source}")]
    InnerFailure { values: Vec<f64>, source: Box<Error> },
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
}

impl Error {
    /// True for solver non-convergence, possibly wrapped with the offending profile.
    pub fn is_non_convergence(&self) -> bool {
        match self {
            Error::NoConvergence { .. } => true,
            Error::InnerFailure { source, .. } => source.is_non_convergence(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
