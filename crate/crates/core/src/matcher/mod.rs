//! Stereo block matching: cost functions, a naive reference matcher and the
//! equivalent streaming kernel graphs.

mod cost;
mod pipelines;
mod reference;

use thiserror::Error;

use crate::dsl::{DslError, ExecError, GraphError};
use crate::stream::LowerError;

pub use cost::{
    bounded_bit_count, census_cost, census_vector, min_index, sad_cost, BitCount, Block, BlockView, CensusVector,
};
pub use pipelines::{
    build_census_pipeline, build_pipeline, build_sad_pipeline, match_streaming, DISPARITY_STREAM, LEFT_STREAM,
    RIGHT_STREAM,
};
pub use reference::{match_reference, CostFunction, DisparityMap, MatchConfig};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatchError {
    #[error("invalid match configuration: {0}")]
    InvalidConfig(String),
    #[error("image dimensions differ: left is {left:?}, right is {right:?}")]
    DimensionMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("image {width}x{height} is smaller than the {rows}x{cols} block")]
    ImageTooSmall {
        width: usize,
        height: usize,
        rows: usize,
        cols: usize,
    },
    #[error("block extents differ: {left:?} vs {right:?}")]
    ExtentMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("census vector widths differ: {left} vs {right}")]
    WidthMismatch { left: u32, right: u32 },
    #[error("no candidate costs")]
    EmptyCosts,
    #[error("disparity range {0} does not fit in an 8-bit image without normalization")]
    RangeTooWide(u32),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Dsl(#[from] DslError),
    #[error(transparent)]
    Lower(#[from] LowerError),
    #[error(transparent)]
    Exec(#[from] ExecError),
}
