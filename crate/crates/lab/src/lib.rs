//! Experiment runner for `lvrae-core`: JSON configs, CSV tables, binary
//! checkpoints, SVG scatter plots and the `lvrae` command line.

pub mod checkpoint;
pub mod cli;
pub mod config;
pub mod experiments;
pub mod gradcheck;
pub mod svg;
pub mod table;

use std::path::Path;

pub use config::{load_config, parse_config, save_config, ExperimentConfig, ExperimentKind};

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },
    #[error("usage: {0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Format { path: String, message: String },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error(transparent)]
    Core(#[from] lvrae_core::Error),
}

impl LabError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        LabError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    /// 2 for numerical failures, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Numerical(_)
            | LabError::Core(lvrae_core::Error::NonFinite { .. } | lvrae_core::Error::Degenerate(_)) => 2,
            _ => 1,
        }
    }
}
