//! Kernel-description layer.
//!
//! Kernels are local operators built from window views, masks, domains and
//! reductions. A [`KernelGraph`] chains them through named streams; it can be
//! run buffer-wise with [`execute_buffered`] or lowered to a streaming
//! pipeline by [`crate::stream::lower`].

mod graph;
mod kernel;
pub mod library;
mod ops;
mod window;

use thiserror::Error;

pub use graph::{build_graph, execute_buffered, ExecError, GraphError, KernelGraph, Producer, StreamInfo, SOURCE_BITS};
pub use kernel::{KernelBody, KernelBuilder, KernelCost, KernelInput, KernelSpec, LoopBound};
pub use ops::{convolve, iterate, reduce, Accumulator, Domain, Mask, ReduceOp, StaticBound, Tap};
pub use window::{SubWindow, Window, WindowShape};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DslError {
    #[error("window extents must be odd and positive, got {rows}x{cols}")]
    EvenExtent { rows: usize, cols: usize },
    #[error("anchor ({anchor_row},{anchor_col}) lies outside a {rows}x{cols} window")]
    BadAnchor {
        rows: usize,
        cols: usize,
        anchor_row: usize,
        anchor_col: usize,
    },
    #[error("expected {expected} cells, found {found}")]
    WindowLength { expected: usize, found: usize },
    #[error("extent mismatch: window is {expected:?}, mask/domain is {found:?}")]
    ExtentMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("domain has no active cells")]
    EmptyDomain,
    #[error("loop bound must be positive")]
    ZeroBound,
    #[error("kernel '{kernel}' declares a loop with a run-time bound; only static bounds can be pipelined")]
    DynamicBound { kernel: String },
    #[error("kernel '{kernel}': {reason}")]
    InvalidKernel { kernel: String, reason: String },
    #[error("kernel '{kernel}' produced {value}, which does not fit in {bits} bits")]
    OutputOverflow { kernel: String, value: u64, bits: u32 },
}
