//! Two-phase clock-period search and Pareto filtering of design points.

mod csv_io;
mod pareto;
mod search;

use thiserror::Error;

use crate::synth::SynthesisError;

pub use csv_io::{read_design_points, write_design_points, DESIGN_POINT_HEADER};
pub use pareto::pareto_front;
pub use search::{optimize, DesignPoint, OptimizationResult, OptimizeOptions, Phase, SearchDirection};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OptimizeError {
    #[error("invalid search options: {0}")]
    InvalidOptions(String),
    #[error("constraints not met after {doublings} doublings")]
    Infeasible { doublings: u32, points: Vec<DesignPoint> },
    #[error(transparent)]
    Synthesis(#[from] SynthesisError),
    #[error("line {line}: {message}")]
    Csv { line: u64, message: String },
}
