//! Crate-wide error type with stable machine-readable codes.

use std::path::PathBuf;
use thiserror::Error;

/// All failure modes surface through this enum. Each variant maps to a
/// stable `error_code` string (used by the CLI) and a process exit code.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error in {path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid scene spec: {0}")]
    InvalidSpec(String),

    #[error("invalid scene: {0}")]
    InvalidScene(String),

    #[error("empty floor plan: {0}")]
    EmptyPlan(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("drift calibration failed: {0}")]
    CalibrationFailure(String),

    #[error("empty problem: {0}")]
    EmptyProblem(String),

    #[error("metric undefined: {0}")]
    MetricUndefined(String),

    #[error("trajectory association failed: {0}")]
    Association(String),

    #[error("solver failure: {0}")]
    Solver(String),
}

impl Error {
    /// Stable snake_case code, the `error_code` half of the CLI's
    /// `error_code: message` failure line.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Config(_) => "config_error",
            Error::Io { .. } => "io_error",
            Error::Parse { .. } => "parse_error",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::InvalidSpec(_) => "invalid_spec",
            Error::InvalidScene(_) => "invalid_scene",
            Error::EmptyPlan(_) => "empty_plan",
            Error::DegenerateInput(_) => "degenerate_input",
            Error::CalibrationFailure(_) => "calibration_failure",
            Error::EmptyProblem(_) => "empty_problem",
            Error::MetricUndefined(_) => "metric_undefined",
            Error::Association(_) => "association_error",
            Error::Solver(_) => "solver_error",
        }
    }

    /// Process exit code: 2 config, 3 I/O, 4 numeric/solver, 5 empty
    /// problem or undefined metric.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidArgument(_) | Error::InvalidSpec(_) => 2,
            Error::Io { .. } | Error::Parse { .. } => 3,
            Error::InvalidScene(_)
            | Error::DegenerateInput(_)
            | Error::CalibrationFailure(_)
            | Error::Association(_)
            | Error::Solver(_) => 4,
            Error::EmptyPlan(_) | Error::EmptyProblem(_) | Error::MetricUndefined(_) => 5,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
