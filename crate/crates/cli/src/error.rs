use scilu_core::Error as CoreError;

/// Process exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitCode {
    Ok = 0,
    CriterionFailed = 1,
    InvalidInput = 2,
    Breakdown = 3,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {msg}")]
    MatrixMarket { path: String, line: usize, msg: String },

    #[error("config: {0}")]
    Config(String),

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] CoreError),
}

impl CliError {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Core(
                CoreError::ZeroPivot { .. }
                | CoreError::ZeroDiagonal { .. }
                | CoreError::SingularCoarse
                | CoreError::NonFinite(_)
                | CoreError::NonFiniteIterate { .. },
            ) => ExitCode::Breakdown,
            _ => ExitCode::InvalidInput,
        }
    }
}
