use std::path::PathBuf;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A physical parameter is outside its valid domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A scenario or instrument configuration is inconsistent.
    #[error("configuration error: {0}")]
    Config(String),

    /// Scenario file failed to parse.
    #[error("parse error in {path}: {message} (line {line}, column {column})")]
    Parse {
        path: PathBuf,
        message: String,
        line: usize,
        column: usize,
    },

    /// Scenario parsed but violates an invariant.
    #[error("validation error: {0}")]
    Validation(String),

    /// Scenario is missing an explicit seed.
    #[error("missing seed: scenario `{0}` must set a `seed` (no silent nondeterminism)")]
    MissingSeed(String),

    /// Nonlinear fit did not converge.
    #[error("fit error: {message} (iterations: {iterations}, last chi2: {chisq:.6e})")]
    Fit {
        message: String,
        iterations: usize,
        chisq: f64,
    },

    /// Binary time-tag stream is malformed.
    #[error("time-tag format error at byte {offset}: {message}")]
    Format { offset: u64, message: String },

    /// A root/overlap search failed to bracket its target.
    #[error("search error: {0}")]
    Search(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
}
