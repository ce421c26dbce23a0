//! File formats, experiment configuration and the command-line front end
//! for `solfree-core`.

use std::path::PathBuf;

use thiserror::Error;

pub mod cli;
pub mod config;
pub mod experiment;
pub mod formats;

#[derive(Debug, Error)]
pub enum AppError {
    /// Bad command-line usage; exit code 2.
    #[error("usage: {0}")]
    Usage(String),
    #[error("{0}")]
    Domain(String),
    #[error("{origin}:{line}: {message}")]
    Parse {
        origin: String,
        line: usize,
        message: String,
    },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl AppError {
    pub fn exit_code(&self) -> u8 {
        match self {
            AppError::Usage(_) => 2,
            _ => 1,
        }
    }

    pub(crate) fn domain(e: impl std::fmt::Display) -> Self {
        AppError::Domain(e.to_string())
    }
}
