//! Scenario runner for the speed-limit studies: INI configuration, figure
//! presets, parameter sweeps and CSV output.

pub mod config;
pub mod presets;
pub mod scenario;

use std::path::PathBuf;

use qsl_core::Error as CoreError;
use thiserror::Error;

pub use config::{parse_config, parse_config_with, parse_layered, serialize, ScenarioConfig};
pub use scenario::{run_scenario, sweep_parallel, write_artifact, Artifact};

#[derive(Debug, Error)]
pub enum LabError {
    /// `line` is 0 for command-line overrides and whole-file problems.
    #[error("{}config error at `{key}`: {message}", if *line > 0 { format!("line {line}: ") } else { String::new() })]
    Config {
        line: usize,
        key: String,
        message: String,
    },

    #[error("at {coords}: {source}")]
    Point {
        coords: String,
        #[source]
        source: CoreError,
    },

    #[error("invariant violated at {coords}: {message}")]
    Invariant { coords: String, message: String },

    #[error("invalid argument `{name}`: {message}")]
    Argument { name: &'static str, message: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl LabError {
    /// 2 configuration, 3 numerical non-convergence, 4 invariant violation.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Config { .. } | LabError::Argument { .. } => 2,
            LabError::Invariant { .. } => 4,
            LabError::Io { .. } => 1,
            LabError::Point { source, .. } => match source.root() {
                CoreError::InvariantViolation(_) | CoreError::Inconsistency(_) => 4,
                CoreError::Parameter { .. }
                | CoreError::Domain(_)
                | CoreError::Range(_)
                | CoreError::Dimension(_)
                | CoreError::Degenerate(_)
                | CoreError::OracleInapplicable(_) => 2,
                _ => 3,
            },
        }
    }
}
