//! Image-kernel pipelines for FPGA-style streaming accelerators.
//!
//! The crate covers the whole flow from kernel description to a tuned
//! design point:
//!
//! * [`image`] and [`pgm`]: 8-bit images, boundary handling, PGM files.
//! * [`dsl`]: local-operator kernels and kernel graphs with a buffer-wise
//!   reference executor.
//! * [`stream`]: lowering to line-buffered pipelines and cycle simulation.
//! * [`matcher`]: SAD and census stereo block matching.
//! * [`synth`]: synthesis reports, a deterministic cost-model backend and
//!   resource constraints.
//! * [`optimize`]: two-phase clock-period search and Pareto filtering.

pub mod dsl;
pub mod image;
pub mod matcher;
pub mod optimize;
pub mod pgm;
pub mod stream;
pub mod synth;

pub use image::{BoundaryMode, Image, ImageError, Roi};
