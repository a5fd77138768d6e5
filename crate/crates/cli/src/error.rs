use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{context}: {source}")]
    Input {
        context: String,
        #[source]
        source: ffd_adapt::Error,
    },

    #[error("numerical failure: {0}")]
    Numerical(#[source] ffd_adapt::Error),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

impl CliError {
    /// Process exit status: 1 for configuration and input problems, 2 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numerical(_) => 2,
            _ => 1,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn input(context: impl Into<String>, source: ffd_adapt::Error) -> Self {
        CliError::Input {
            context: context.into(),
            source,
        }
    }
}

impl From<ffd_adapt::Error> for CliError {
    fn from(e: ffd_adapt::Error) -> Self {
        use ffd_adapt::Error as E;
        match e {
            E::IllConditioned { .. }
            | E::Singular
            | E::DegenerateSupport
            | E::NonFiniteStart
            | E::ParameterOutOfRange(_) => CliError::Numerical(e),
            other => CliError::Input {
                context: "invalid input".into(),
                source: other,
            },
        }
    }
}
