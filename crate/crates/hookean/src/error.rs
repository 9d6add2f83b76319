use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config key `{key}`: {reason}")]
    Config { key: String, reason: String },
    #[error("config syntax: {0}")]
    Syntax(String),
    #[error("usage: {0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("snapshot {}: {reason}", path.display())]
    Snapshot { path: PathBuf, reason: String },
    #[error(transparent)]
    Core(#[from] hookean_core::Error),
}

impl CliError {
    pub(crate) fn config(key: &str, reason: impl Into<String>) -> Self {
        CliError::Config { key: key.to_string(), reason: reason.into() }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Self {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}

pub type CliResult<T> = Result<T, CliError>;
