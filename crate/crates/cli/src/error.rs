use std::fmt;
use std::io;
use std::path::{Path, PathBuf};

use hlsloop::dsl::ExecError;
use hlsloop::matcher::MatchError;
use hlsloop::optimize::OptimizeError;
use hlsloop::pgm::PgmError;
use hlsloop::stream::LowerError;
use hlsloop::synth::SynthesisError;

pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_IO: u8 = 2;
pub const EXIT_DIMENSIONS: u8 = 3;
pub const EXIT_CONFIG: u8 = 4;
pub const EXIT_INFEASIBLE: u8 = 5;

#[derive(Debug)]
pub enum CliError {
    Io { path: PathBuf, source: io::Error },
    Pgm { path: PathBuf, source: PgmError },
    Dimensions(String),
    Config(String),
    Infeasible(String),
    Failed(String),
}

impl CliError {
    pub fn io(path: &Path, source: io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } | CliError::Pgm { .. } => EXIT_IO,
            CliError::Dimensions(_) => EXIT_DIMENSIONS,
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Infeasible(_) => EXIT_INFEASIBLE,
            CliError::Failed(_) => EXIT_FAILURE,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            CliError::Pgm { path, source } => write!(f, "{}: {source}", path.display()),
            CliError::Dimensions(m) | CliError::Config(m) | CliError::Infeasible(m) | CliError::Failed(m) => {
                f.write_str(m)
            }
        }
    }
}

impl From<MatchError> for CliError {
    fn from(e: MatchError) -> Self {
        match e {
            MatchError::DimensionMismatch { .. } => CliError::Dimensions(e.to_string()),
            MatchError::Exec(inner) => inner.into(),
            MatchError::Lower(inner) => inner.into(),
            MatchError::InvalidConfig(_)
            | MatchError::ImageTooSmall { .. }
            | MatchError::RangeTooWide(_)
            | MatchError::Graph(_)
            | MatchError::Dsl(_) => CliError::Config(e.to_string()),
            _ => CliError::Failed(e.to_string()),
        }
    }
}

impl From<ExecError> for CliError {
    fn from(e: ExecError) -> Self {
        match e {
            ExecError::DimensionMismatch { .. } => CliError::Dimensions(e.to_string()),
            ExecError::SourceCount { .. } => CliError::Config(e.to_string()),
            _ => CliError::Failed(e.to_string()),
        }
    }
}

impl From<LowerError> for CliError {
    fn from(e: LowerError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<SynthesisError> for CliError {
    fn from(e: SynthesisError) -> Self {
        match e {
            SynthesisError::Backend { .. } | SynthesisError::Csv(_) | SynthesisError::InvalidReport(_) => {
                CliError::Failed(e.to_string())
            }
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<OptimizeError> for CliError {
    fn from(e: OptimizeError) -> Self {
        match e {
            OptimizeError::Infeasible { .. } => CliError::Infeasible(e.to_string()),
            OptimizeError::Synthesis(inner) => inner.into(),
            OptimizeError::InvalidOptions(_) | OptimizeError::Csv { .. } => CliError::Config(e.to_string()),
        }
    }
}
