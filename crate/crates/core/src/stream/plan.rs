use thiserror::Error;

use crate::dsl::{KernelGraph, Producer};
use crate::image::BoundaryMode;

/// Register stage added by every kernel.
pub const STAGE_OVERHEAD: u64 = 1;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LowerError {
    #[error("kernel '{kernel}' needs a {rows}x{cols} window but the image is {width}x{height}")]
    ImageTooSmall {
        kernel: String,
        rows: usize,
        cols: usize,
        width: usize,
        height: usize,
    },
    #[error("kernel '{kernel}' reads '{stream}' with repeat boundaries over a {rows}x{cols} window; wrap-around needs pixels that have not been streamed yet")]
    NonCausalBoundary {
        kernel: String,
        stream: String,
        rows: usize,
        cols: usize,
    },
    #[error("initiation interval must be at least 1")]
    ZeroIi,
}

/// Storage attached to one kernel input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputBuffer {
    pub stream: String,
    pub bits: u32,
    pub window_rows: usize,
    pub window_cols: usize,
    /// Full-width rows held in line buffers (`window_rows - 1`).
    pub line_buffer_rows: usize,
    /// Stream elements retained, line buffers plus window span.
    pub retained: usize,
    /// Elements behind the output position that must stay available.
    pub(crate) back: usize,
}

impl InputBuffer {
    pub fn register_bits(&self) -> u64 {
        (self.window_rows * self.window_cols) as u64 * u64::from(self.bits)
    }
}

/// One kernel after lowering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stage {
    pub kernel: String,
    pub window_rows: usize,
    pub window_cols: usize,
    pub line_buffer_rows: usize,
    pub line_buffer_width: usize,
    pub window_registers: usize,
    /// Input elements that must arrive beyond output position `k` before
    /// output `k` can be computed.
    pub lag: usize,
    /// Cycles this stage adds to the pipeline fill.
    pub fill_cycles: u64,
    pub inputs: Vec<InputBuffer>,
}

/// A kernel graph lowered to a streaming pipeline for fixed image extents.
#[derive(Debug, Clone)]
pub struct StreamPlan {
    graph: KernelGraph,
    width: usize,
    height: usize,
    ii: u32,
    stages: Vec<Stage>,
    stream_offsets: Vec<u64>,
}

fn effective_reach(window: crate::dsl::WindowShape, mode: BoundaryMode) -> (usize, usize, usize, usize) {
    let (up, down, left, right) = (
        window.reach_up(),
        window.reach_down(),
        window.reach_left(),
        window.reach_right(),
    );
    match mode {
        // mirrored reads land at most one cell short of the opposite reach
        BoundaryMode::Mirror => (
            up.max(down.saturating_sub(1)),
            down.max(up.saturating_sub(1)),
            left.max(right.saturating_sub(1)),
            right.max(left.saturating_sub(1)),
        ),
        _ => (up, down, left, right),
    }
}

/// Replaces every stream of `graph` with a line-buffered stream for a
/// `width` x `height` frame at II = 1.
pub fn lower(graph: &KernelGraph, width: usize, height: usize) -> Result<StreamPlan, LowerError> {
    let mut stages = Vec::with_capacity(graph.kernels().len());
    for (ki, k) in graph.kernels().iter().enumerate() {
        let (rows, cols) = k.window_extent();
        for inp in k.inputs() {
            let w = inp.window;
            if w.rows() > height || w.cols() > width {
                return Err(LowerError::ImageTooSmall {
                    kernel: k.name().to_string(),
                    rows: w.rows(),
                    cols: w.cols(),
                    width,
                    height,
                });
            }
            if inp.boundary == BoundaryMode::Repeat && w.cells() > 1 {
                return Err(LowerError::NonCausalBoundary {
                    kernel: k.name().to_string(),
                    stream: inp.stream.clone(),
                    rows: w.rows(),
                    cols: w.cols(),
                });
            }
        }
        let mut lag = (rows - 1) / 2 * width + (cols - 1) / 2;
        let reaches: Vec<_> = k
            .inputs()
            .iter()
            .map(|i| effective_reach(i.window, i.boundary))
            .collect();
        for &(_, down, _, right) in &reaches {
            lag = lag.max(down * width + right);
        }
        let inputs = k
            .inputs()
            .iter()
            .zip(&reaches)
            .zip(graph.kernel_inputs(ki))
            .map(|((inp, &(up, _, left, _)), &si)| {
                let back = up * width + left;
                InputBuffer {
                    stream: inp.stream.clone(),
                    bits: graph.streams()[si].bits,
                    window_rows: inp.window.rows(),
                    window_cols: inp.window.cols(),
                    line_buffer_rows: inp.window.rows() - 1,
                    retained: back + lag + 1,
                    back,
                }
            })
            .collect();
        stages.push(Stage {
            kernel: k.name().to_string(),
            window_rows: rows,
            window_cols: cols,
            line_buffer_rows: rows - 1,
            line_buffer_width: width,
            window_registers: rows * cols,
            lag,
            fill_cycles: 0,
            inputs,
        });
    }
    let mut plan = StreamPlan {
        graph: graph.clone(),
        width,
        height,
        ii: 1,
        stages,
        stream_offsets: Vec::new(),
    };
    plan.recompute_fill();
    Ok(plan)
}

impl StreamPlan {
    /// Same pipeline at a different initiation interval.
    pub fn with_ii(mut self, ii: u32) -> Result<Self, LowerError> {
        if ii == 0 {
            return Err(LowerError::ZeroIi);
        }
        self.ii = ii;
        self.recompute_fill();
        Ok(self)
    }

    fn recompute_fill(&mut self) {
        let g = &self.graph;
        let mut offsets = vec![0u64; g.streams().len()];
        for (ki, stage) in self.stages.iter_mut().enumerate() {
            stage.fill_cycles = stage.lag as u64 * u64::from(self.ii) + STAGE_OVERHEAD;
            let start = g.kernel_inputs(ki).iter().map(|&si| offsets[si]).max().unwrap_or(0);
            offsets[g.kernel_output(ki)] = start + stage.fill_cycles;
        }
        self.stream_offsets = offsets;
    }

    pub fn graph(&self) -> &KernelGraph {
        &self.graph
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> u64 {
        (self.width * self.height) as u64
    }

    pub fn ii(&self) -> u32 {
        self.ii
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    /// Cycles before the first output leaves the slowest sink: the sum of
    /// per-stage fill along the longest source-to-sink path.
    pub fn fill_cycles(&self) -> u64 {
        self.graph
            .sink_streams()
            .iter()
            .map(|&si| self.stream_offsets[si])
            .max()
            .unwrap_or(0)
    }

    /// Longest fill over every stream, including kernels that feed no sink.
    pub(crate) fn max_stream_fill(&self) -> u64 {
        self.stream_offsets.iter().copied().max().unwrap_or(0)
    }

    /// Cycles to stream one full frame through the pipeline.
    pub fn total_cycles(&self) -> u64 {
        self.pixels() * u64::from(self.ii) + self.fill_cycles()
    }

    /// Number of kernels on the longest source-to-sink path.
    pub fn depth(&self) -> usize {
        let g = &self.graph;
        let mut depth = vec![0usize; g.streams().len()];
        for ki in 0..g.kernels().len() {
            let d = g.kernel_inputs(ki).iter().map(|&s| depth[s]).max().unwrap_or(0);
            depth[g.kernel_output(ki)] = d + 1;
        }
        g.sink_streams().iter().map(|&s| depth[s]).max().unwrap_or(0)
    }

    pub fn max_window_rows(&self) -> usize {
        self.stages.iter().map(|s| s.window_rows).max().unwrap_or(1)
    }

    pub(crate) fn is_source(&self, stream: usize) -> Option<usize> {
        match self.graph.streams()[stream].producer {
            Producer::Source(i) => Some(i),
            Producer::Kernel(_) => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::library::{gaussian_graph, identity_graph};
    use crate::dsl::{build_graph, KernelSpec, WindowShape};

    #[test]
    fn gaussian_fill() {
        let plan = lower(&gaussian_graph(BoundaryMode::Clamp), 450, 375).unwrap();
        let s = &plan.stages()[0];
        assert_eq!(s.line_buffer_rows, 2);
        assert_eq!(s.line_buffer_width, 450);
        assert_eq!(s.window_registers, 9);
        assert_eq!(plan.fill_cycles(), 450 + 1 + 1);
        assert_eq!(plan.total_cycles(), 168_750 + 452);
    }

    #[test]
    fn identity_fill() {
        let plan = lower(&identity_graph(), 8, 8).unwrap();
        assert_eq!(plan.stages()[0].line_buffer_rows, 0);
        assert_eq!(plan.fill_cycles(), 1);
    }

    #[test]
    fn ii_scales_lag() {
        let plan = lower(&gaussian_graph(BoundaryMode::Clamp), 10, 10)
            .unwrap()
            .with_ii(3)
            .unwrap();
        assert_eq!(plan.fill_cycles(), 11 * 3 + 1);
        assert_eq!(plan.total_cycles(), 300 + 34);
        assert!(lower(&identity_graph(), 4, 4).unwrap().with_ii(0).is_err());
    }

    #[test]
    fn too_small_and_repeat() {
        assert!(matches!(
            lower(&gaussian_graph(BoundaryMode::Clamp), 2, 10),
            Err(LowerError::ImageTooSmall { .. })
        ));
        assert!(matches!(
            lower(&gaussian_graph(BoundaryMode::Repeat), 10, 10),
            Err(LowerError::NonCausalBoundary { .. })
        ));
    }

    #[test]
    fn anchored_window_lag_covers_reach() {
        // window reaching three columns right of its anchor
        let k = KernelSpec::builder("skew")
            .input("in", WindowShape::anchored(1, 4, 0, 0).unwrap(), BoundaryMode::Clamp)
            .output("out", 8)
            .body(|w| Ok(w[0].cell(0, 3)))
            .build()
            .unwrap();
        let g = build_graph(vec![k], &["in"], &["out"]).unwrap();
        let plan = lower(&g, 10, 2).unwrap();
        assert_eq!(plan.stages()[0].lag, 3);
    }
}
