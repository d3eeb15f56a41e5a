use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid config: {0}")]
    Config(String),

    #[error("numerical guard tripped: {0}")]
    Guard(String),

    #[error("missing results: {0}")]
    MissingResults(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::MissingResults(_) | CliError::Io(_) => 1,
            CliError::Guard(_) => 2,
        }
    }
}

impl From<qgraph::Error> for CliError {
    fn from(e: qgraph::Error) -> Self {
        match e {
            qgraph::Error::Io(msg) => CliError::Io(std::io::Error::other(msg)),
            qgraph::Error::Parse(msg) => CliError::Config(msg),
            other => CliError::Guard(other.to_string()),
        }
    }
}
