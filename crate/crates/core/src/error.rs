use thiserror::Error;

use crate::numeric::SliceRealization;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Arguments outside an operation's domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// A combinatorial axiom, closure or shelling property failed.
    #[error("structural error: {0}")]
    Structural(String),
    /// A numeric search ran out of budget without a consistent answer.
    #[error("incomplete: {message}")]
    Incomplete { message: String, partial: Option<Box<SliceRealization>> },
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn structural(msg: impl Into<String>) -> Self {
        Error::Structural(msg.into())
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Parse(_) => 2,
            Error::Structural(_) => 3,
            Error::Incomplete { .. } => 4,
        }
    }
}
