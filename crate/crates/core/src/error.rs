use thiserror::Error;

/// Error type shared by every module in this crate.
///
/// The split mirrors how callers have to react: `Domain` means the input
/// violated a precondition (bad measure, bad exponent, malformed Young
/// function), `UnboundedNorm` means the requested quantity is genuinely
/// infinite (divergent boundary trace, empty Luxemburg bracket) and no
/// finite answer exists, `Construction` means an internal build step could
/// not satisfy its own postcondition.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("unbounded norm: {0}")]
    UnboundedNorm(String),

    #[error("construction failed: {0}")]
    Construction(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn unbounded(msg: impl Into<String>) -> Self {
        Error::UnboundedNorm(msg.into())
    }

    pub fn construction(msg: impl Into<String>) -> Self {
        Error::Construction(msg.into())
    }
}
