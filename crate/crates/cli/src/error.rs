use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_SCHEME: i32 = 3;
pub const EXIT_FME: i32 = 4;
pub const EXIT_NO_CLAIM: i32 = 10;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("scheme: {0}")]
    Scheme(String),
    #[error("{0}")]
    Fme(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } | CliError::Parse { .. } | CliError::Argument(_) => EXIT_PARSE,
            CliError::Scheme(_) => EXIT_SCHEME,
            CliError::Fme(_) => EXIT_FME,
            CliError::Failed(_) => EXIT_FAILURE,
        }
    }
}
