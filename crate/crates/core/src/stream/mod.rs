//! Lowering of kernel graphs to line-buffered streaming pipelines and their
//! cycle-level simulation.

mod latency;
mod plan;
mod sim;

pub use latency::{total_latency_seconds, total_latency_with_fill_seconds, NonPositiveClock};
pub use plan::{lower, InputBuffer, LowerError, Stage, StreamPlan, STAGE_OVERHEAD};
pub use sim::{simulate, CycleStats};
