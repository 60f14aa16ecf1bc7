use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("no stationary branch {branch} for lambda = {lambda}")]
    NoSuchBranch { lambda: f64, branch: usize },

    #[error("grid resolution {intervals} is too coarse, need at least {required} intervals")]
    Resolution { intervals: usize, required: usize },

    #[error("integration diverged at tau = {tau}")]
    Divergence { tau: f64 },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("root bracket has no sign change on [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
