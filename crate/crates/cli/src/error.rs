use thiserror::Error;

/// Failures are split by exit code: bad input (1) versus a run that could
/// not complete (2).
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("{command} failed: {source}")]
    Compute {
        command: &'static str,
        #[source]
        source: boltseq::Error,
    },
    #[error("cannot write {path}: {message}")]
    Output { path: String, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Input(_) => 1,
            CliError::Compute { .. } | CliError::Output { .. } => 2,
        }
    }
}
