use std::path::PathBuf;

/// Failures surfaced to the shell. Usage and configuration problems exit
/// with 1, input and domain problems with 2.
#[derive(Debug, thiserror::Error)]
pub enum ToolError {
    #[error("{0}")]
    Config(String),
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("{path}: {count} invalid row(s)\n{details}")]
    Schema { path: PathBuf, count: usize, details: String },
    #[error("{0}")]
    Domain(String),
}

impl ToolError {
    pub fn exit_code(&self) -> i32 {
        match self {
            ToolError::Config(_) => 1,
            _ => 2,
        }
    }

    pub fn domain(e: impl std::fmt::Display) -> Self {
        ToolError::Domain(e.to_string())
    }
}
