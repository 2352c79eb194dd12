use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A denominator factor vanished identically after a substitution.
    #[error("denominator factor {0} vanishes identically after substitution")]
    PoleOnPole(String),

    #[error("residue root must not contain the integration variable z{0}")]
    RootContainsVariable(usize),

    #[error("homogeneity check failed: {0}")]
    Homogeneity(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("series error: {0}")]
    Series(String),

    #[error("cache i/o error: {0}")]
    Cache(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Internal consistency failures, as opposed to bad user input.
    pub fn is_internal(&self) -> bool {
        matches!(
            self,
            Error::PoleOnPole(_) | Error::RootContainsVariable(_) | Error::Homogeneity(_) | Error::Series(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
