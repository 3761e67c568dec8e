//! Synthesis reports, device budgets and the backend contract.
//!
//! A backend turns a lowered [`StreamPlan`] and a target clock period into a
//! [`SynthesisReport`]. [`MockBackend`] is a deterministic cost model. An
//! adapter for an external HLS tool implements [`SynthesisBackend`] by
//! emitting code for the plan, invoking the tool with the target period and
//! parsing its utilization and timing report into a [`SynthesisReport`].

mod budget;
mod fixtures;
mod mock;
mod report;

use thiserror::Error;

use crate::stream::StreamPlan;

pub use budget::{constraints_met, resource_fraction, Constraints, ResourceBudget, ResourceFractions};
pub use fixtures::{table1_fixtures, NamedReport};
pub use mock::{mock_synthesize, MockBackend, MockModelParams};
pub use report::{read_reports_csv, write_reports_csv, SynthesisReport, BRAM_BLOCK_BITS};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthesisError {
    #[error("target period must be positive and finite, got {0} ns")]
    InvalidPeriod(f64),
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),
    #[error("invalid budget: {0}")]
    InvalidBudget(String),
    #[error("invalid constraints: {0}")]
    InvalidConstraints(String),
    #[error("invalid report: {0}")]
    InvalidReport(String),
    #[error("report csv: {0}")]
    Csv(String),
    #[error("backend '{backend}' failed: {diagnostics}")]
    Backend { backend: String, diagnostics: String },
}

/// Produces a synthesis report for a plan at a target clock period.
///
/// Implementations must be deterministic: the same plan and period give the
/// same report. Unmet timing is reported through
/// [`SynthesisReport::achieved_period_ns`], not as an error.
pub trait SynthesisBackend {
    fn name(&self) -> &str;

    /// Whether `synthesize` may be called from several threads at once.
    fn concurrent(&self) -> bool {
        false
    }

    fn synthesize(&self, plan: &StreamPlan, target_period_ns: f64) -> Result<SynthesisReport, SynthesisError>;
}

pub(crate) fn check_period(target_period_ns: f64) -> Result<(), SynthesisError> {
    if target_period_ns.is_finite() && target_period_ns > 0.0 {
        Ok(())
    } else {
        Err(SynthesisError::InvalidPeriod(target_period_ns))
    }
}
