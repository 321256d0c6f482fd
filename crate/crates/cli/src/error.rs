use thiserror::Error;

/// Failures of a CLI run, each tied to a process exit code.
#[derive(Debug, Clone, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("numerical failure in {context}: {source}")]
    Numerical {
        context: String,
        #[source]
        source: velopaoi_core::Error,
    },

    #[error("i/o error: {0}")]
    Io(String),

    #[error("tolerance violated: {0}")]
    Tolerance(String),
}

impl CliError {
    pub fn numerical(context: impl Into<String>, source: velopaoi_core::Error) -> Self {
        match source {
            velopaoi_core::Error::Config(msg) => CliError::Config(msg),
            source => CliError::Numerical { context: context.into(), source },
        }
    }

    /// 1 tolerance violation, 2 configuration or output error, 3 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Tolerance(_) => 1,
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Numerical { .. } => 3,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

/// Attaches a context label to core results.
pub(crate) trait Context<T> {
    fn context(self, what: &str) -> Result<T, CliError>;
}

impl<T> Context<T> for velopaoi_core::Result<T> {
    fn context(self, what: &str) -> Result<T, CliError> {
        self.map_err(|e| CliError::numerical(what, e))
    }
}
