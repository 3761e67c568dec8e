//! Kernel graphs and the buffer-wise reference executor.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use super::kernel::KernelSpec;
use super::window::Window;
use super::DslError;
use crate::image::Image;

/// Bit width of every source stream.
pub const SOURCE_BITS: u32 = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("stream '{stream}' has more than one producer")]
    DuplicateProducer { stream: String },
    #[error("kernel '{kernel}' reads stream '{stream}' which nothing produces")]
    DanglingInput { kernel: String, stream: String },
    #[error("sink '{stream}' is not produced by any source or kernel")]
    UnknownSink { stream: String },
    #[error("sink '{stream}' is not reachable from any source")]
    UnreachableSink { stream: String },
    #[error("cycle through kernels {kernels:?}")]
    Cycle { kernels: Vec<String> },
    #[error("graph has no sinks")]
    NoSinks,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExecError {
    #[error("expected {expected} source images, got {found}")]
    SourceCount { expected: usize, found: usize },
    #[error("stream '{stream}' is {found:?} but the pipeline runs at {expected:?}")]
    DimensionMismatch {
        stream: String,
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error(transparent)]
    Kernel(#[from] DslError),
    #[error("{0}")]
    Internal(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Producer {
    Source(usize),
    Kernel(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StreamInfo {
    pub name: String,
    pub bits: u32,
    pub producer: Producer,
    /// Kernel indices reading this stream.
    pub consumers: Vec<usize>,
}

/// Validated DAG of kernels, stored in topological order.
#[derive(Debug, Clone)]
pub struct KernelGraph {
    kernels: Vec<KernelSpec>,
    sources: Vec<String>,
    sinks: Vec<String>,
    streams: Vec<StreamInfo>,
    kernel_inputs: Vec<Vec<usize>>,
    kernel_output: Vec<usize>,
    sink_streams: Vec<usize>,
}

/// Validates kernels, sources and sinks into a [`KernelGraph`].
///
/// Kernels are re-ordered topologically (stable with respect to the given
/// order). Streams that are produced by one kernel and consumed by another
/// become internal streams.
pub fn build_graph(kernels: Vec<KernelSpec>, sources: &[&str], sinks: &[&str]) -> Result<KernelGraph, GraphError> {
    if sinks.is_empty() {
        return Err(GraphError::NoSinks);
    }
    let mut producer: HashMap<&str, Producer> = HashMap::new();
    for (i, s) in sources.iter().enumerate() {
        if producer.insert(s, Producer::Source(i)).is_some() {
            return Err(GraphError::DuplicateProducer { stream: s.to_string() });
        }
    }
    for (i, k) in kernels.iter().enumerate() {
        if producer.insert(k.output(), Producer::Kernel(i)).is_some() {
            return Err(GraphError::DuplicateProducer {
                stream: k.output().to_string(),
            });
        }
    }
    for k in &kernels {
        for inp in k.inputs() {
            if !producer.contains_key(inp.stream.as_str()) {
                return Err(GraphError::DanglingInput {
                    kernel: k.name().to_string(),
                    stream: inp.stream.clone(),
                });
            }
        }
    }
    for s in sinks {
        if !producer.contains_key(s) {
            return Err(GraphError::UnknownSink { stream: s.to_string() });
        }
    }

    // Kahn's algorithm, always taking the lowest original index that is ready.
    let n = kernels.len();
    let mut pending: Vec<usize> = kernels
        .iter()
        .map(|k| {
            k.inputs()
                .iter()
                .filter(|i| matches!(producer[i.stream.as_str()], Producer::Kernel(_)))
                .count()
        })
        .collect();
    let mut placed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        let Some(next) = (0..n).find(|&i| !placed[i] && pending[i] == 0) else {
            let kernels = (0..n)
                .filter(|&i| !placed[i])
                .map(|i| kernels[i].name().to_string())
                .collect();
            return Err(GraphError::Cycle { kernels });
        };
        placed[next] = true;
        order.push(next);
        let out = kernels[next].output();
        for (j, k) in kernels.iter().enumerate() {
            pending[j] -= k.inputs().iter().filter(|i| i.stream == out).count();
        }
    }

    let mut slots: Vec<Option<KernelSpec>> = kernels.into_iter().map(Some).collect();
    let kernels: Vec<KernelSpec> = order.iter().map(|&i| slots[i].take().unwrap()).collect();
    assemble(
        kernels,
        sources.iter().map(|s| s.to_string()).collect(),
        sinks.iter().map(|s| s.to_string()).collect(),
    )
}

/// Builds stream tables for kernels already in topological order.
fn assemble(kernels: Vec<KernelSpec>, sources: Vec<String>, sinks: Vec<String>) -> Result<KernelGraph, GraphError> {
    let mut streams: Vec<StreamInfo> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    for (i, s) in sources.iter().enumerate() {
        index.insert(s.clone(), streams.len());
        streams.push(StreamInfo {
            name: s.clone(),
            bits: SOURCE_BITS,
            producer: Producer::Source(i),
            consumers: Vec::new(),
        });
    }
    let mut kernel_inputs = Vec::with_capacity(kernels.len());
    let mut kernel_output = Vec::with_capacity(kernels.len());
    for (ki, k) in kernels.iter().enumerate() {
        let mut ins = Vec::new();
        for inp in k.inputs() {
            let Some(&si) = index.get(&inp.stream) else {
                return Err(GraphError::DanglingInput {
                    kernel: k.name().to_string(),
                    stream: inp.stream.clone(),
                });
            };
            streams[si].consumers.push(ki);
            ins.push(si);
        }
        kernel_inputs.push(ins);
        if index.contains_key(k.output()) {
            return Err(GraphError::DuplicateProducer {
                stream: k.output().to_string(),
            });
        }
        index.insert(k.output().to_string(), streams.len());
        kernel_output.push(streams.len());
        streams.push(StreamInfo {
            name: k.output().to_string(),
            bits: k.output_bits(),
            producer: Producer::Kernel(ki),
            consumers: Vec::new(),
        });
    }

    let mut reachable = vec![false; streams.len()];
    for (si, s) in streams.iter().enumerate() {
        reachable[si] = match s.producer {
            Producer::Source(_) => true,
            Producer::Kernel(k) => kernel_inputs[k].iter().any(|&i| reachable[i]),
        };
    }
    let mut sink_streams = Vec::with_capacity(sinks.len());
    for s in &sinks {
        let Some(&si) = index.get(s) else {
            return Err(GraphError::UnknownSink { stream: s.clone() });
        };
        if !reachable[si] {
            return Err(GraphError::UnreachableSink { stream: s.clone() });
        }
        sink_streams.push(si);
    }

    Ok(KernelGraph {
        kernels,
        sources,
        sinks,
        streams,
        kernel_inputs,
        kernel_output,
        sink_streams,
    })
}

impl KernelGraph {
    pub fn kernels(&self) -> &[KernelSpec] {
        &self.kernels
    }

    pub fn sources(&self) -> &[String] {
        &self.sources
    }

    pub fn sinks(&self) -> &[String] {
        &self.sinks
    }

    pub fn streams(&self) -> &[StreamInfo] {
        &self.streams
    }

    /// Stream indices read by kernel `k`, in input order.
    pub fn kernel_inputs(&self, k: usize) -> &[usize] {
        &self.kernel_inputs[k]
    }

    pub fn kernel_output(&self, k: usize) -> usize {
        self.kernel_output[k]
    }

    pub fn sink_streams(&self) -> &[usize] {
        &self.sink_streams
    }

    /// Streams written by one kernel and read by another.
    pub fn internal_streams(&self) -> Vec<&StreamInfo> {
        self.streams
            .iter()
            .filter(|s| matches!(s.producer, Producer::Kernel(_)) && !s.consumers.is_empty())
            .collect()
    }

    /// Re-runs validation on the stored parts.
    pub fn validate(&self) -> Result<(), GraphError> {
        let sources: Vec<&str> = self.sources.iter().map(String::as_str).collect();
        let sinks: Vec<&str> = self.sinks.iter().map(String::as_str).collect();
        let rebuilt = build_graph(self.kernels.clone(), &sources, &sinks)?;
        let same_order = rebuilt
            .kernels
            .iter()
            .zip(&self.kernels)
            .all(|(a, b)| a.name() == b.name());
        if same_order {
            Ok(())
        } else {
            Err(GraphError::Cycle {
                kernels: self.kernels.iter().map(|k| k.name().to_string()).collect(),
            })
        }
    }

    pub(crate) fn check_sources(&self, sources: &[Image<u8>]) -> Result<(usize, usize), ExecError> {
        if sources.len() != self.sources.len() {
            return Err(ExecError::SourceCount {
                expected: self.sources.len(),
                found: sources.len(),
            });
        }
        let dims = sources[0].dims();
        for (name, img) in self.sources.iter().zip(sources) {
            if img.dims() != dims {
                return Err(ExecError::DimensionMismatch {
                    stream: name.clone(),
                    expected: dims,
                    found: img.dims(),
                });
            }
        }
        Ok(dims)
    }
}

impl fmt::Display for KernelGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "sources: {}", self.sources.join(", "))?;
        for k in &self.kernels {
            let ins: Vec<String> = k
                .inputs()
                .iter()
                .map(|i| format!("{}[{} {:?}]", i.stream, i.window, i.boundary))
                .collect();
            let (r, c) = k.window_extent();
            writeln!(
                f,
                "kernel {} window {}x{}: {} -> {} ({} bits)",
                k.name(),
                r,
                c,
                ins.join(", "),
                k.output(),
                k.output_bits()
            )?;
        }
        write!(f, "sinks: {}", self.sinks.join(", "))
    }
}

/// Runs each kernel to completion over the whole image before the next one
/// starts, materialising every intermediate stream.
pub fn execute_buffered(graph: &KernelGraph, sources: &[Image<u8>]) -> Result<Vec<Image<u64>>, ExecError> {
    let (width, height) = graph.check_sources(sources)?;
    let mut buffers: Vec<Option<Image<u64>>> = vec![None; graph.streams.len()];
    for (i, img) in sources.iter().enumerate() {
        buffers[i] = Some(img.to_stream());
    }

    for (ki, kernel) in graph.kernels.iter().enumerate() {
        let inputs: Vec<&Image<u64>> = graph.kernel_inputs[ki]
            .iter()
            .map(|&si| buffers[si].as_ref().expect("topological order"))
            .collect();
        let mut cells: Vec<Vec<u64>> = vec![Vec::new(); inputs.len()];
        let mut out = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                for ((inp, img), buf) in kernel.inputs().iter().zip(&inputs).zip(cells.iter_mut()) {
                    inp.window
                        .gather(x, y, width, height, inp.boundary, |sx, sy| img.get(sx, sy), buf);
                }
                let windows: Vec<Window<'_>> = kernel
                    .inputs()
                    .iter()
                    .zip(&cells)
                    .map(|(inp, buf)| Window::new_unchecked(inp.window, buf))
                    .collect();
                out.push(kernel.eval(&windows)?);
            }
        }
        buffers[graph.kernel_output[ki]] = Some(Image::from_vec(width, height, out).expect("dims checked"));
    }

    Ok(graph
        .sink_streams
        .iter()
        .map(|&si| buffers[si].clone().expect("sinks are produced"))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::window::WindowShape;
    use crate::image::BoundaryMode;

    fn pass(name: &str, from: &str, to: &str) -> KernelSpec {
        KernelSpec::builder(name)
            .input(from, WindowShape::point(), BoundaryMode::Clamp)
            .output(to, 8)
            .body(|w| Ok(w[0].center()))
            .build()
            .unwrap()
    }

    #[test]
    fn single_node() {
        let g = build_graph(vec![pass("id", "in", "out")], &["in"], &["out"]).unwrap();
        assert_eq!(g.kernels().len(), 1);
        assert!(g.internal_streams().is_empty());
        g.validate().unwrap();
    }

    #[test]
    fn reorders_topologically() {
        let g = build_graph(vec![pass("b", "mid", "out"), pass("a", "in", "mid")], &["in"], &["out"]).unwrap();
        let names: Vec<_> = g.kernels().iter().map(|k| k.name()).collect();
        assert_eq!(names, ["a", "b"]);
        assert_eq!(g.internal_streams().len(), 1);
        g.validate().unwrap();
    }

    #[test]
    fn construction_errors() {
        assert!(matches!(
            build_graph(vec![pass("loop", "x", "x")], &["in"], &["x"]),
            Err(GraphError::Cycle { .. })
        ));
        assert!(matches!(
            build_graph(vec![pass("a", "y", "x"), pass("b", "x", "y")], &["in"], &["x"]),
            Err(GraphError::Cycle { .. })
        ));
        assert!(matches!(
            build_graph(vec![pass("a", "in", "x"), pass("b", "in", "x")], &["in"], &["x"]),
            Err(GraphError::DuplicateProducer { .. })
        ));
        assert!(matches!(
            build_graph(vec![pass("a", "in", "in")], &["in"], &["in"]),
            Err(GraphError::DuplicateProducer { .. })
        ));
        assert!(matches!(
            build_graph(vec![pass("a", "nope", "x")], &["in"], &["x"]),
            Err(GraphError::DanglingInput { .. })
        ));
        assert!(matches!(
            build_graph(vec![pass("a", "in", "x")], &["in"], &["y"]),
            Err(GraphError::UnknownSink { .. })
        ));
        assert_eq!(
            build_graph(vec![pass("a", "in", "x")], &["in"], &[]).unwrap_err(),
            GraphError::NoSinks
        );
    }

    #[test]
    fn identity_buffered() {
        let g = build_graph(vec![pass("id", "in", "out")], &["in"], &["out"]).unwrap();
        let img = Image::from_fn(7, 5, |x, y| (x * 9 + y * 31) as u8).unwrap();
        let out = execute_buffered(&g, std::slice::from_ref(&img)).unwrap();
        assert_eq!(out[0].to_gray().unwrap(), img);
    }

    #[test]
    fn source_dimension_mismatch() {
        let k = KernelSpec::builder("add")
            .input("a", WindowShape::point(), BoundaryMode::Clamp)
            .input("b", WindowShape::point(), BoundaryMode::Clamp)
            .output("s", 9)
            .body(|w| Ok(w[0].center() + w[1].center()))
            .build()
            .unwrap();
        let g = build_graph(vec![k], &["a", "b"], &["s"]).unwrap();
        let a = Image::filled(4, 4, 1u8).unwrap();
        let b = Image::filled(4, 3, 1u8).unwrap();
        assert!(matches!(
            execute_buffered(&g, &[a.clone(), b]),
            Err(ExecError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            execute_buffered(&g, &[a]),
            Err(ExecError::SourceCount { expected: 2, found: 1 })
        ));
    }

    #[test]
    fn text_listing() {
        let g = build_graph(vec![pass("id", "in", "out")], &["in"], &["out"]).unwrap();
        let s = g.to_string();
        assert!(s.contains("kernel id window 1x1: in[1x1 Clamp] -> out (8 bits)"), "{s}");
    }
}
