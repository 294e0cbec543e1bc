use std::path::PathBuf;

/// Errors raised while loading inputs or computing authorship analytics.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("line {line}: malformed commit record: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: commit record schema violation: {message}")]
    Schema { line: usize, message: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("release boundary not found: {0}")]
    BoundaryNotFound(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate arithmetic: {0}")]
    Degenerate(String),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn domain(message: impl Into<String>) -> Self {
        Error::Domain(message.into())
    }

    pub(crate) fn config(message: impl Into<String>) -> Self {
        Error::Config(message.into())
    }

    /// Wraps the error with a human-readable location (release, scope, input file).
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// True for errors caused by invalid or unreadable inputs, as opposed to
    /// failures during analysis.
    pub fn is_config(&self) -> bool {
        match self {
            Error::Parse { .. }
            | Error::Schema { .. }
            | Error::Config(_)
            | Error::Io { .. }
            | Error::BoundaryNotFound(_) => true,
            Error::Domain(_) | Error::Degenerate(_) => false,
            Error::Context { source, .. } => source.is_config(),
        }
    }
}
