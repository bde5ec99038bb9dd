use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Rejection sampling could not find a point in the requested class region.
    #[error(
        "no point of class {class} found after {draws} draws; class region is empty or degenerate"
    )]
    DegenerateConcept { class: u8, draws: u64 },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: io::Error,
    },
}

impl Error {
    pub(crate) fn io(context: impl Into<String>, source: io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
