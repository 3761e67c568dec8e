//! Ready-made kernels and single-kernel graphs.

use super::{build_graph, convolve, KernelGraph, KernelSpec, Mask, ReduceOp, WindowShape};
use crate::image::BoundaryMode;

/// 3x3 Gaussian blur coefficients; they sum to exactly 1.0.
pub const GAUSSIAN_3X3: [[f64; 3]; 3] = [
    [0.0625, 0.1250, 0.0625],
    [0.1250, 0.2500, 0.1250],
    [0.0625, 0.1250, 0.0625],
];

/// Stores a real value into an 8-bit pixel: truncate toward zero, then
/// saturate to `[0, 255]`.
#[inline]
pub fn truncate_to_u8(v: f64) -> u64 {
    let t = v.trunc();
    if t.is_nan() || t <= 0.0 {
        0
    } else if t >= 255.0 {
        255
    } else {
        t as u64
    }
}

pub fn gaussian_mask() -> Mask {
    Mask::from_array(&GAUSSIAN_3X3).expect("3x3 is odd")
}

/// Convolution with `mask`, rounded half-up and stored as 8 bits.
pub fn convolution_kernel(name: &str, input: &str, output: &str, mask: Mask, boundary: BoundaryMode) -> KernelSpec {
    let shape = WindowShape::centered(mask.rows(), mask.cols()).expect("masks are odd");
    let taps = (mask.rows() * mask.cols()) as u64;
    KernelSpec::builder(name)
        .input(input, shape, boundary)
        .output(output, 8)
        .uses_mask(0, &mask)
        .ops(taps)
        .real_mults(taps)
        .body(move |w| {
            let sum: f64 = convolve(&w[0], &mask, ReduceOp::Sum, |t| t.coef * t.value as f64)?;
            Ok(truncate_to_u8(sum + 0.5))
        })
        .build()
        .expect("convolution kernel is well formed")
}

pub fn gaussian_graph(boundary: BoundaryMode) -> KernelGraph {
    let k = convolution_kernel("gaussian", "input", "output", gaussian_mask(), boundary);
    build_graph(vec![k], &["input"], &["output"]).expect("single kernel graph")
}

/// 1x1 pass-through.
pub fn identity_graph() -> KernelGraph {
    let k = KernelSpec::builder("identity")
        .input("input", WindowShape::point(), BoundaryMode::Clamp)
        .output("output", 8)
        .ops(0)
        .body(|w| Ok(w[0].center()))
        .build()
        .expect("identity kernel");
    build_graph(vec![k], &["input"], &["output"]).expect("single kernel graph")
}
