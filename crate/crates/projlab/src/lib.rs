//! Command-line laboratory for analytic surface data: a flat key/value
//! config file selects the coefficient data and the numerical knobs, and the
//! subcommands run the [`projframe`] pipelines and write stable text
//! reports.
//!
//! Exit-code contract, shared by every subcommand:
//!
//! * `0` — the run completed and every gated check passed;
//! * `1` — the run completed but a validation or consistency check failed
//!   (residuals over tolerance, a flatness verdict contradicting the class,
//!   coefficient data with poles or zeros on the grid);
//! * `2` — the run never started (bad usage, unreadable config, unknown or
//!   ill-typed keys, malformed expressions, impossible grid geometry).
//!
//! Determinism is part of the interface: the same effective configuration
//! produces byte-identical files and stdout, so outputs can be diffed and
//! hashed. All floating-point output is printed with 17 significant digits
//! (lossless for `f64`).

pub mod commands;
pub mod config;
pub mod mesh;
pub mod output;

pub use commands::{run, USAGE};
pub use config::RunConfig;

use projframe::frame::FrameError;
use projframe::quadric::QuadricError;
use projframe::spectral::SpectralError;
use projframe::surface::SurfaceError;
use thiserror::Error;

/// Everything that can stop a run, tagged with the exit code it maps to.
#[derive(Debug, Error)]
pub enum CliError {
    /// The command line itself was malformed (exit 2).
    #[error("{0}")]
    Usage(String),
    /// The config file was unreadable or inconsistent (exit 2).
    #[error("config: {0}")]
    Config(String),
    /// The config was fine but the data failed a mathematical gate (exit 1).
    #[error("invalid data: {0}")]
    Invalid(String),
    /// Report files could not be written (exit 2).
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// The process exit code this error maps to.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Invalid(_) => 1,
        }
    }
}

impl From<SurfaceError> for CliError {
    fn from(e: SurfaceError) -> Self {
        match &e {
            // Geometry and naming problems come straight from config values.
            SurfaceError::InvalidStep { .. }
            | SurfaceError::InvalidDomain { .. }
            | SurfaceError::InvalidBase { .. }
            | SurfaceError::UnknownCatalog { .. }
            | SurfaceError::BadParameter { .. } => CliError::Config(e.to_string()),
            // Well-formed config, mathematically unusable data.
            SurfaceError::Pole { .. }
            | SurfaceError::SmallCoefficient { .. }
            | SurfaceError::NotASurface { .. } => CliError::Invalid(e.to_string()),
        }
    }
}

impl From<FrameError> for CliError {
    fn from(e: FrameError) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl From<SpectralError> for CliError {
    fn from(e: SpectralError) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl From<QuadricError> for CliError {
    fn from(e: QuadricError) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl From<wirtexpr::ParseError> for CliError {
    fn from(e: wirtexpr::ParseError) -> Self {
        CliError::Config(e.to_string())
    }
}
