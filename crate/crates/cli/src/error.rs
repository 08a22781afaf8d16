//! CLI error taxonomy mapped to exit codes.
//!
//! * `2` — configuration problems (bad TOML, unknown keys, violated model
//!   invariants);
//! * `3` — data problems (missing/garbled CSV, I/O);
//! * `4` — numerical failures (divergence, failed optimization/selection).

use std::fmt;

use acsel_core::Error as CoreError;

/// An error with an exit-code class attached.
#[derive(Debug)]
pub enum CliError {
    /// Invalid configuration (exit code 2).
    Config(String),
    /// Unusable input data or file I/O trouble (exit code 3).
    Data(String),
    /// A numerical procedure failed on valid inputs (exit code 4).
    Numerical(String),
}

impl CliError {
    /// The process exit code for this error class.
    pub fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }

    /// Classifies a core-library error raised while *running* (not while
    /// interpreting configuration; configuration building maps core errors
    /// to [`CliError::Config`] explicitly at the call sites).
    pub fn from_run(err: CoreError) -> Self {
        match err {
            CoreError::NonFinite { .. } | CoreError::SeriesTooShort { .. } => {
                CliError::Data(err.to_string())
            }
            CoreError::InvalidSpec { .. }
            | CoreError::DimensionMismatch { .. }
            | CoreError::PenaltyUndefined { .. } => CliError::Config(err.to_string()),
            CoreError::Nonstationary { .. }
            | CoreError::SimulationDiverged { .. }
            | CoreError::NonFiniteLikelihood { .. }
            | CoreError::OptimizationFailed
            | CoreError::SelectionFailed
            | CoreError::MomentUndefined { .. }
            | CoreError::InsufficientData { .. } => CliError::Numerical(err.to_string()),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Data(msg) => write!(f, "data error: {msg}"),
            CliError::Numerical(msg) => write!(f, "numerical error: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Data(err.to_string())
    }
}

/// Result alias for CLI plumbing.
pub type Result<T> = std::result::Result<T, CliError>;
