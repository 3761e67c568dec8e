//! Matchers expressed as kernel graphs, so they can be lowered to streams.

use super::cost::{census_cost, census_vector, min_index, sad_cost, CensusVector};
use super::reference::{CostFunction, DisparityMap, MatchConfig};
use super::MatchError;
use crate::dsl::{build_graph, DslError, KernelGraph, KernelSpec, LoopBound, StaticBound, WindowShape};
use crate::image::{BoundaryMode, Image};
use crate::stream::{lower, simulate, CycleStats};

pub const LEFT_STREAM: &str = "left";
pub const RIGHT_STREAM: &str = "right";
pub const DISPARITY_STREAM: &str = "disparity";

fn disparity_bits(max_disparity: u32) -> u32 {
    (32 - (max_disparity - 1).leading_zeros()).max(1)
}

fn body_error(kernel: &str, e: MatchError) -> DslError {
    DslError::InvalidKernel {
        kernel: kernel.to_string(),
        reason: e.to_string(),
    }
}

/// Target window spanning every candidate block: `D - 1` extra columns to
/// the left of the reference position.
fn search_window(rows: usize, cols: usize, max_disparity: u32) -> Result<WindowShape, MatchError> {
    let extra = max_disparity as usize - 1;
    Ok(WindowShape::anchored(rows, cols + extra, rows / 2, extra + cols / 2)?)
}

/// One kernel comparing the reference block with all `D` target blocks.
pub fn build_sad_pipeline(cfg: &MatchConfig) -> Result<KernelGraph, MatchError> {
    cfg.validate()?;
    let (br, bc, d) = (cfg.block_rows, cfg.block_cols, cfg.max_disparity);
    let cells = (br * bc) as u64;
    let k = KernelSpec::builder("sad")
        .input(LEFT_STREAM, WindowShape::centered(br, bc)?, BoundaryMode::Clamp)
        .input(RIGHT_STREAM, search_window(br, bc, d)?, BoundaryMode::Clamp)
        .output(DISPARITY_STREAM, disparity_bits(d))
        // subtract, absolute value and accumulate per cell, then the min tree
        .ops(u64::from(d) * cells * 3 + u64::from(d - 1))
        .body(move |w| {
            let reference = w[0].sub(0, 0, br, bc);
            let mut costs = Vec::with_capacity(d as usize);
            for cand in 0..d as usize {
                let target = w[1].sub(0, d as usize - 1 - cand, br, bc);
                costs.push(sad_cost(&reference, &target).map_err(|e| body_error("sad", e))?);
            }
            let (_, idx) = min_index(&costs).map_err(|e| body_error("sad", e))?;
            Ok(idx as u64)
        })
        .build()?;
    Ok(build_graph(vec![k], &[LEFT_STREAM, RIGHT_STREAM], &[DISPARITY_STREAM])?)
}

fn census_kernel(name: &str, input: &str, rows: usize, cols: usize) -> Result<KernelSpec, MatchError> {
    let bits = (rows * cols - 1) as u32;
    Ok(KernelSpec::builder(name)
        .input(input, WindowShape::centered(rows, cols)?, BoundaryMode::Clamp)
        .output(name, bits.max(1))
        .ops(u64::from(bits))
        .body(move |w| {
            census_vector(&w[0])
                .map(|v| v.bits())
                .map_err(|e| DslError::InvalidKernel {
                    kernel: "census".into(),
                    reason: e.to_string(),
                })
        })
        .build()?)
}

/// Census transform of both views, then a Hamming-distance comparator
/// reading `D` consecutive target vectors.
pub fn build_census_pipeline(cfg: &MatchConfig) -> Result<KernelGraph, MatchError> {
    cfg.validate()?;
    let (br, bc, d) = (cfg.block_rows, cfg.block_cols, cfg.max_disparity);
    let bits = (br * bc - 1) as u32;
    let vec_left = census_kernel("vec_left", LEFT_STREAM, br, bc)?;
    let vec_right = census_kernel("vec_right", RIGHT_STREAM, br, bc)?;

    let mut cmp = KernelSpec::builder("cmp")
        .input("vec_left", WindowShape::point(), BoundaryMode::Clamp)
        .input(
            "vec_right",
            WindowShape::anchored(1, d as usize, 0, d as usize - 1)?,
            BoundaryMode::Clamp,
        )
        .output(DISPARITY_STREAM, disparity_bits(d))
        // one XOR per candidate, then the min tree
        .ops(u64::from(d) + u64::from(d - 1));
    if let Ok(bound) = StaticBound::new(bits) {
        // clear-lowest-bit, compare, increment in every candidate's counter
        cmp = cmp.bounded_loop(LoopBound::Static(bound), 3 * u64::from(d));
    }
    let cmp = cmp
        .body(move |w| {
            let err = |e| body_error("cmp", e);
            let a = CensusVector::new(w[0].center(), bits).map_err(err)?;
            let mut costs = Vec::with_capacity(d as usize);
            for cand in 0..d as usize {
                let b = CensusVector::new(w[1].cell(0, d as usize - 1 - cand), bits).map_err(err)?;
                costs.push(census_cost(a, b).map_err(err)?);
            }
            let (_, idx) = min_index(&costs).map_err(err)?;
            Ok(idx as u64)
        })
        .build()?;
    Ok(build_graph(
        vec![vec_left, vec_right, cmp],
        &[LEFT_STREAM, RIGHT_STREAM],
        &[DISPARITY_STREAM],
    )?)
}

pub fn build_pipeline(cfg: &MatchConfig) -> Result<KernelGraph, MatchError> {
    match cfg.cost {
        CostFunction::Sad => build_sad_pipeline(cfg),
        CostFunction::Census => build_census_pipeline(cfg),
    }
}

/// Runs the streaming matcher on one stereo pair at II = 1.
pub fn match_streaming(
    left: &Image,
    right: &Image,
    cfg: &MatchConfig,
) -> Result<(DisparityMap, CycleStats), MatchError> {
    cfg.check_images(left, right)?;
    let graph = build_pipeline(cfg)?;
    let plan = lower(&graph, left.width(), left.height())?;
    let (mut out, stats) = simulate(&plan, &[left.clone(), right.clone()])?;
    let img = out.pop().expect("one sink");
    let values = img.pixels().iter().map(|&d| d as u16).collect();
    Ok((
        DisparityMap::new(left.width(), left.height(), cfg.max_disparity, values)?,
        stats,
    ))
}
