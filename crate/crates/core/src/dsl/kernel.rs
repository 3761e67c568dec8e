use std::fmt;
use std::sync::Arc;

use super::ops::{Domain, Mask, StaticBound};
use super::window::{Window, WindowShape};
use super::DslError;
use crate::image::BoundaryMode;

/// Per-pixel compute function. It only sees the window views of its inputs,
/// so identical windows always yield identical outputs.
pub type KernelBody = Arc<dyn Fn(&[Window<'_>]) -> Result<u64, DslError> + Send + Sync>;

/// One input stream of a kernel together with how it is windowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelInput {
    pub stream: String,
    pub window: WindowShape,
    pub boundary: BoundaryMode,
}

/// Loop bound declared by a kernel body.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoopBound {
    Static(StaticBound),
    /// Trip count only known at run time. Cannot be pipelined, so kernel
    /// construction rejects it.
    Dynamic,
}

/// Datapath size annotations consumed by synthesis cost models.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct KernelCost {
    /// Integer/logic operations per output (adds, compares, XORs, ...).
    pub ops: u64,
    /// Real-valued multiplies per output.
    pub real_mults: u64,
    /// Operations inside bounded loops, charged at the worst-case trip count.
    pub loop_ops: u64,
}

impl KernelCost {
    pub fn total_ops(&self) -> u64 {
        self.ops + self.loop_ops
    }
}

/// A validated local-operator kernel.
#[derive(Clone)]
pub struct KernelSpec {
    name: String,
    inputs: Vec<KernelInput>,
    output: String,
    output_bits: u32,
    cost: KernelCost,
    body: KernelBody,
}

impl KernelSpec {
    pub fn builder(name: impl Into<String>) -> KernelBuilder {
        KernelBuilder::new(name)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn inputs(&self) -> &[KernelInput] {
        &self.inputs
    }

    pub fn output(&self) -> &str {
        &self.output
    }

    pub fn output_bits(&self) -> u32 {
        self.output_bits
    }

    pub fn cost(&self) -> KernelCost {
        self.cost
    }

    /// Largest extents over all inputs.
    pub fn window_extent(&self) -> (usize, usize) {
        self.inputs
            .iter()
            .fold((1, 1), |(r, c), i| (r.max(i.window.rows()), c.max(i.window.cols())))
    }

    /// Evaluates the body, rejecting values wider than the output stream.
    pub fn eval(&self, windows: &[Window<'_>]) -> Result<u64, DslError> {
        let v = (self.body)(windows)?;
        if self.output_bits < 64 && v >> self.output_bits != 0 {
            return Err(DslError::OutputOverflow {
                kernel: self.name.clone(),
                value: v,
                bits: self.output_bits,
            });
        }
        Ok(v)
    }
}

impl fmt::Debug for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KernelSpec")
            .field("name", &self.name)
            .field("inputs", &self.inputs)
            .field("output", &self.output)
            .field("output_bits", &self.output_bits)
            .field("cost", &self.cost)
            .finish_non_exhaustive()
    }
}

enum Check {
    Mask(usize, usize, usize),
    Domain(usize, usize, usize),
}

/// Incremental constructor for [`KernelSpec`]; all checks run in `build`.
pub struct KernelBuilder {
    name: String,
    inputs: Vec<KernelInput>,
    output: Option<(String, u32)>,
    cost: KernelCost,
    cost_set: bool,
    loops: Vec<(LoopBound, u64)>,
    checks: Vec<Check>,
    body: Option<KernelBody>,
}

impl KernelBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            inputs: Vec::new(),
            output: None,
            cost: KernelCost::default(),
            cost_set: false,
            loops: Vec::new(),
            checks: Vec::new(),
            body: None,
        }
    }

    pub fn input(mut self, stream: impl Into<String>, window: WindowShape, boundary: BoundaryMode) -> Self {
        self.inputs.push(KernelInput {
            stream: stream.into(),
            window,
            boundary,
        });
        self
    }

    pub fn output(mut self, stream: impl Into<String>, bits: u32) -> Self {
        self.output = Some((stream.into(), bits));
        self
    }

    /// Declares that the body convolves input `input` with `mask`.
    pub fn uses_mask(mut self, input: usize, mask: &Mask) -> Self {
        self.checks.push(Check::Mask(input, mask.rows(), mask.cols()));
        self
    }

    /// Declares that the body reduces input `input` over `domain`.
    pub fn uses_domain(mut self, input: usize, domain: &Domain) -> Self {
        self.checks.push(Check::Domain(input, domain.rows(), domain.cols()));
        self
    }

    pub fn ops(mut self, ops: u64) -> Self {
        self.cost.ops = ops;
        self.cost_set = true;
        self
    }

    pub fn real_mults(mut self, mults: u64) -> Self {
        self.cost.real_mults = mults;
        self
    }

    /// Declares a loop in the body with `ops_per_step` operations per trip.
    pub fn bounded_loop(mut self, bound: LoopBound, ops_per_step: u64) -> Self {
        self.loops.push((bound, ops_per_step));
        self
    }

    pub fn body<F>(mut self, f: F) -> Self
    where
        F: Fn(&[Window<'_>]) -> Result<u64, DslError> + Send + Sync + 'static,
    {
        self.body = Some(Arc::new(f));
        self
    }

    pub fn build(self) -> Result<KernelSpec, DslError> {
        let name = self.name;
        if name.is_empty() {
            return Err(DslError::InvalidKernel {
                kernel: name,
                reason: "empty name".into(),
            });
        }
        if self.inputs.is_empty() {
            return Err(DslError::InvalidKernel {
                kernel: name,
                reason: "a kernel needs at least one input".into(),
            });
        }
        let Some((output, output_bits)) = self.output else {
            return Err(DslError::InvalidKernel {
                kernel: name,
                reason: "no output stream".into(),
            });
        };
        if !(1..=64).contains(&output_bits) {
            return Err(DslError::InvalidKernel {
                kernel: name,
                reason: format!("output width {output_bits} bits is outside 1..=64"),
            });
        }
        let Some(body) = self.body else {
            return Err(DslError::InvalidKernel {
                kernel: name,
                reason: "no body".into(),
            });
        };
        for check in &self.checks {
            let (input, rows, cols) = match *check {
                Check::Mask(i, r, c) | Check::Domain(i, r, c) => (i, r, c),
            };
            let Some(inp) = self.inputs.get(input) else {
                return Err(DslError::InvalidKernel {
                    kernel: name,
                    reason: format!("mask/domain bound to missing input {input}"),
                });
            };
            if inp.window.rows() != rows || inp.window.cols() != cols {
                return Err(DslError::ExtentMismatch {
                    expected: (inp.window.rows(), inp.window.cols()),
                    found: (rows, cols),
                });
            }
        }
        let mut cost = self.cost;
        if !self.cost_set {
            cost.ops = self.inputs.iter().map(|i| i.window.cells() as u64).sum();
        }
        for (bound, per_step) in &self.loops {
            match bound {
                LoopBound::Static(b) => cost.loop_ops += u64::from(b.get()) * per_step,
                LoopBound::Dynamic => return Err(DslError::DynamicBound { kernel: name }),
            }
        }
        Ok(KernelSpec {
            name,
            inputs: self.inputs,
            output,
            output_bits,
            cost,
            body,
        })
    }
}
