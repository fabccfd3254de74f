use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] strider_core::Error),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{0}")]
    Usage(String),

    #[error("config {}: {message}", path.display())]
    Config { path: PathBuf, message: String },
}

pub type Result<T> = std::result::Result<T, CliError>;

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CHECKSUM: i32 = 3;
pub const EXIT_CORRUPT: i32 = 4;

impl CliError {
    /// 2 for IO, usage and range problems, 3 for a reference checksum
    /// mismatch, 4 for a damaged container or index.
    pub fn exit_code(&self) -> i32 {
        use strider_core::Error as E;
        match self {
            CliError::Core(E::ChecksumMismatch { .. }) => EXIT_CHECKSUM,
            CliError::Core(e) if e.is_corruption() => EXIT_CORRUPT,
            _ => EXIT_USAGE,
        }
    }

    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}
