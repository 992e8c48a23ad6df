// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("guard violation in [{analysis}]: {message}")]
    Guard { analysis: String, message: String },
    #[error("{path}:{line}: {message}")]
    EdgeList {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("unknown plot table `{0}` (available: {1})")]
    UnknownTable(String, String),
    #[error("plot table `{0}` has no rows")]
    EmptyTable(String),
    #[error("cache file {path}: {message}")]
    Cache { path: PathBuf, message: String },
    #[error(transparent)]
    Core(#[from] ultracon_core::Error),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Toml(#[from] toml::de::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            context: context.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
