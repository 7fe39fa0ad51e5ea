use qtransfer_core::Error;

pub const EXIT_PARSE: u8 = 2;
pub const EXIT_PHYSICS: u8 = 3;
pub const EXIT_IO: u8 = 4;
pub const EXIT_SUITE: u8 = 5;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Parse { path: String, source: Error },
    #[error("{0}")]
    Physics(Error),
    #[error("{context}: {source}")]
    Io {
        context: String,
        source: std::io::Error,
    },
    #[error("{failed} of {total} scenarios failed")]
    SuiteFailed { failed: usize, total: usize },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse { .. } => EXIT_PARSE,
            CliError::Physics(_) => EXIT_PHYSICS,
            CliError::Io { .. } => EXIT_IO,
            CliError::SuiteFailed { .. } => EXIT_SUITE,
        }
    }

    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            context: context.into(),
            source,
        }
    }

    /// Sorts a core error raised while loading `path`.
    pub fn loading(path: &std::path::Path, e: Error) -> Self {
        match e {
            Error::Io(source) => CliError::io(path.display().to_string(), source),
            source => CliError::Parse {
                path: path.display().to_string(),
                source,
            },
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(source) => CliError::io("i/o", source),
            other => CliError::Physics(other),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
