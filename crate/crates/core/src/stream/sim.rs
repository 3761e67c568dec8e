//! Cycle-stepped simulation of a lowered pipeline.
//!
//! Sources emit one pixel every II cycles. Each stage keeps a ring of the
//! most recent stream elements per input (its line buffers plus window
//! registers), pulls at most one element per input per cycle, and emits one
//! output every II cycles once the element `lag` positions ahead has arrived.
//! Outputs become visible to consumers `STAGE_OVERHEAD` cycles later.

use std::fmt;

use super::plan::{StreamPlan, STAGE_OVERHEAD};
use crate::dsl::{ExecError, Window};
use crate::image::Image;

/// Cycle accounting of one simulated frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CycleStats {
    pub outputs_produced: u64,
    pub ii: u32,
    pub fill_cycles: u64,
    pub total_cycles: u64,
}

impl CycleStats {
    pub const CSV_HEADER: &'static str = "pixels,ii,fill_cycles,total_cycles";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{}",
            self.outputs_produced, self.ii, self.fill_cycles, self.total_cycles
        )
    }
}

impl fmt::Display for CycleStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "pixels={} ii={} fill_cycles={} total_cycles={}",
            self.outputs_produced, self.ii, self.fill_cycles, self.total_cycles
        )
    }
}

struct StreamState {
    values: Vec<u64>,
    visible_at: Vec<u64>,
}

struct InputState {
    stream: usize,
    ring: Vec<u64>,
    received: usize,
}

impl InputState {
    #[inline]
    fn holds(&self, idx: usize) -> bool {
        idx < self.received && idx + self.ring.len() >= self.received
    }
}

struct StageState {
    inputs: Vec<InputState>,
    next_out: usize,
    last_emit: Option<u64>,
}

/// Streams `sources` through `plan`. Returns the sink images and the cycle
/// statistics of the run.
pub fn simulate(plan: &StreamPlan, sources: &[Image<u8>]) -> Result<(Vec<Image<u64>>, CycleStats), ExecError> {
    let graph = plan.graph();
    let dims = graph.check_sources(sources)?;
    let (width, height) = (plan.width(), plan.height());
    if dims != (width, height) {
        return Err(ExecError::DimensionMismatch {
            stream: graph.sources()[0].clone(),
            expected: (width, height),
            found: dims,
        });
    }
    let n = width * height;
    let ii = u64::from(plan.ii());

    let mut streams: Vec<StreamState> = graph
        .streams()
        .iter()
        .enumerate()
        .map(|(si, _)| match plan.is_source(si) {
            Some(i) => StreamState {
                values: sources[i].pixels().iter().map(|&p| u64::from(p)).collect(),
                visible_at: (1..=n as u64).map(|j| j * ii).collect(),
            },
            None => StreamState {
                values: Vec::with_capacity(n),
                visible_at: Vec::with_capacity(n),
            },
        })
        .collect();

    let mut stages: Vec<StageState> = plan
        .stages()
        .iter()
        .enumerate()
        .map(|(ki, st)| StageState {
            inputs: st
                .inputs
                .iter()
                .zip(graph.kernel_inputs(ki))
                .map(|(buf, &si)| InputState {
                    stream: si,
                    ring: vec![0; buf.retained],
                    received: 0,
                })
                .collect(),
            next_out: 0,
            last_emit: None,
        })
        .collect();

    let mut cells: Vec<Vec<u64>> = Vec::new();
    let limit = (n as u64 + 1) * ii + plan.max_stream_fill() * 2 + 16;
    let mut t = 0u64;
    while stages.iter().any(|s| s.next_out < n) {
        t += 1;
        if t > limit {
            return Err(ExecError::Internal(format!("pipeline stalled after {t} cycles")));
        }
        for (ki, (stage, state)) in plan.stages().iter().zip(stages.iter_mut()).enumerate() {
            if state.next_out >= n {
                continue;
            }
            let need = (state.next_out + stage.lag).min(n - 1) + 1;
            for inp in state.inputs.iter_mut() {
                if inp.received < need {
                    let src = &streams[inp.stream];
                    if src.visible_at.len() > inp.received && src.visible_at[inp.received] <= t {
                        let slot = inp.received % inp.ring.len();
                        inp.ring[slot] = src.values[inp.received];
                        inp.received += 1;
                    }
                }
            }
            let ready =
                state.inputs.iter().all(|i| i.received >= need) && state.last_emit.is_none_or(|last| t >= last + ii);
            if !ready {
                continue;
            }

            let kernel = &graph.kernels()[ki];
            let k = state.next_out;
            let (x, y) = (k % width, k / width);
            cells.resize(kernel.inputs().len(), Vec::new());
            for ((inp, st), buf) in kernel.inputs().iter().zip(&state.inputs).zip(cells.iter_mut()) {
                let mut missing = None;
                inp.window.gather(
                    x,
                    y,
                    width,
                    height,
                    inp.boundary,
                    |sx, sy| {
                        let idx = sy * width + sx;
                        if st.holds(idx) {
                            st.ring[idx % st.ring.len()]
                        } else {
                            missing.get_or_insert(idx);
                            0
                        }
                    },
                    buf,
                );
                if let Some(idx) = missing {
                    return Err(ExecError::Internal(format!(
                        "kernel '{}' needed element {idx} of '{}' for output {k}, which is not buffered",
                        kernel.name(),
                        inp.stream
                    )));
                }
            }
            let windows: Vec<Window<'_>> = kernel
                .inputs()
                .iter()
                .zip(&cells)
                .map(|(inp, buf)| Window::new_unchecked(inp.window, buf))
                .collect();
            let value = kernel.eval(&windows)?;
            let out = &mut streams[graph.kernel_output(ki)];
            out.values.push(value);
            out.visible_at.push(t + STAGE_OVERHEAD);
            state.next_out += 1;
            state.last_emit = Some(t);
        }
    }

    let sink_streams = graph.sink_streams();
    let total_cycles = sink_streams
        .iter()
        .map(|&si| *streams[si].visible_at.last().expect("frame is non-empty"))
        .max()
        .unwrap_or(0);
    let fill_cycles = sink_streams
        .iter()
        .map(|&si| streams[si].visible_at[0] - ii)
        .max()
        .unwrap_or(0);
    let images = sink_streams
        .iter()
        .map(|&si| Image::from_vec(width, height, streams[si].values.clone()).expect("full frame produced"))
        .collect();
    Ok((
        images,
        CycleStats {
            outputs_produced: n as u64,
            ii: plan.ii(),
            fill_cycles,
            total_cycles,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::execute_buffered;
    use crate::dsl::library::{gaussian_graph, identity_graph};
    use crate::image::BoundaryMode;
    use crate::stream::lower;

    #[test]
    fn identity_stream() {
        let img = Image::from_fn(9, 4, |x, y| (x * 17 + y) as u8).unwrap();
        let plan = lower(&identity_graph(), 9, 4).unwrap();
        let (out, stats) = simulate(&plan, std::slice::from_ref(&img)).unwrap();
        assert_eq!(out[0].to_gray().unwrap(), img);
        assert_eq!(stats.outputs_produced, 36);
        assert_eq!(stats.fill_cycles, 1);
        assert_eq!(stats.total_cycles, 37);
    }

    #[test]
    fn gaussian_constant_450x375() {
        let img = Image::filled(450, 375, 77u8).unwrap();
        let plan = lower(&gaussian_graph(BoundaryMode::Clamp), 450, 375).unwrap();
        let (out, stats) = simulate(&plan, std::slice::from_ref(&img)).unwrap();
        assert_eq!(out[0].to_gray().unwrap(), img);
        assert_eq!(stats.fill_cycles, 452);
        assert_eq!(stats.total_cycles, 168_750 + 452);
        assert_eq!(stats.fill_cycles, plan.fill_cycles());
    }

    #[test]
    fn mirror_matches_buffered_with_ii() {
        let img = Image::from_fn(11, 7, |x, y| ((x * 37) ^ (y * 11)) as u8).unwrap();
        let g = gaussian_graph(BoundaryMode::Mirror);
        let want = execute_buffered(&g, std::slice::from_ref(&img)).unwrap();
        for ii in [1, 2, 5] {
            let plan = lower(&g, 11, 7).unwrap().with_ii(ii).unwrap();
            let (got, stats) = simulate(&plan, std::slice::from_ref(&img)).unwrap();
            assert_eq!(got, want);
            assert_eq!(stats.total_cycles - stats.fill_cycles, 77 * u64::from(ii));
            assert_eq!(stats.fill_cycles, plan.fill_cycles());
        }
    }

    #[test]
    fn rejects_wrong_dims() {
        let plan = lower(&identity_graph(), 9, 4).unwrap();
        let img = Image::filled(4, 9, 0u8).unwrap();
        assert!(matches!(
            simulate(&plan, &[img]),
            Err(ExecError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn csv_row() {
        let s = CycleStats {
            outputs_produced: 168_750,
            ii: 1,
            fill_cycles: 933,
            total_cycles: 169_683,
        };
        assert_eq!(CycleStats::CSV_HEADER, "pixels,ii,fill_cycles,total_cycles");
        assert_eq!(s.csv_row(), "168750,1,933,169683");
        assert!(s.to_string().starts_with("pixels=168750 ii=1 "));
    }
}
