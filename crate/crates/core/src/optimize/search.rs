use std::fmt;

use super::OptimizeError;
use crate::stream::StreamPlan;
use crate::synth::{
    constraints_met, resource_fraction, Constraints, ResourceBudget, SynthesisBackend, SynthesisReport,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    /// Doubling until the constraints are met.
    Bound,
    /// Bisection between the default and the first feasible value.
    Bisect,
}

impl Phase {
    pub fn number(self) -> u8 {
        match self {
            Phase::Bound => 1,
            Phase::Bisect => 2,
        }
    }

    pub fn from_number(n: u8) -> Option<Self> {
        match n {
            1 => Some(Phase::Bound),
            2 => Some(Phase::Bisect),
            _ => None,
        }
    }
}

/// Which quantity the search varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum SearchDirection {
    /// Target clock period in ns, relaxed by doubling.
    #[default]
    Period,
    /// Target clock frequency in MHz, relaxed by halving.
    Frequency,
}

impl SearchDirection {
    fn relax(self, x: f64) -> f64 {
        match self {
            SearchDirection::Period => x * 2.0,
            SearchDirection::Frequency => x / 2.0,
        }
    }

    fn period_ns(self, x: f64) -> f64 {
        match self {
            SearchDirection::Period => x,
            SearchDirection::Frequency => 1000.0 / x,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizeOptions {
    /// Bisection stops once the interval is no wider than this, in units of
    /// the searched quantity.
    pub step: f64,
    /// Starting value; never synthesized itself.
    pub default_low: f64,
    pub max_doublings: u32,
    pub direction: SearchDirection,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        Self {
            step: 0.005,
            default_low: 1.0,
            max_doublings: 32,
            direction: SearchDirection::Period,
        }
    }
}

impl OptimizeOptions {
    pub fn validate(&self) -> Result<(), OptimizeError> {
        if !(self.step.is_finite() && self.step > 0.0) {
            return Err(OptimizeError::InvalidOptions(format!("step {} must be > 0", self.step)));
        }
        if !(self.default_low.is_finite() && self.default_low > 0.0) {
            return Err(OptimizeError::InvalidOptions(format!(
                "default low {} must be > 0",
                self.default_low
            )));
        }
        if self.max_doublings == 0 {
            return Err(OptimizeError::InvalidOptions("doubling cap must be at least 1".into()));
        }
        Ok(())
    }
}

/// One synthesis run of the search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignPoint {
    /// 1-based evaluation order.
    pub iteration: usize,
    pub phase: Phase,
    pub target_period_ns: f64,
    pub report: SynthesisReport,
    /// Largest per-resource utilization, in percent.
    pub max_resource_pct: f64,
    pub met: bool,
}

impl DesignPoint {
    pub fn achieved_freq_mhz(&self) -> f64 {
        self.report.achieved_freq_mhz()
    }
}

impl fmt::Display for DesignPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "#{} phase {} target {} ns -> {:.3} ns ({:.2} MHz), {:.3}% resources, {}",
            self.iteration,
            self.phase.number(),
            self.target_period_ns,
            self.report.achieved_period_ns,
            self.achieved_freq_mhz(),
            self.max_resource_pct,
            if self.met { "met" } else { "not met" }
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    pub points: Vec<DesignPoint>,
    /// Index into `points` of the fastest point meeting the constraints.
    pub best: Option<usize>,
    pub synthesis_calls: usize,
    pub doublings: u32,
    /// Bisection interval at the start of phase 2, `(tight, loose)`.
    pub interval: (f64, f64),
}

impl OptimizationResult {
    pub fn best_point(&self) -> Option<&DesignPoint> {
        self.best.map(|i| &self.points[i])
    }

    pub fn phase2(&self) -> impl Iterator<Item = &DesignPoint> {
        self.points.iter().filter(|p| p.phase == Phase::Bisect)
    }
}

/// Finds the fastest design meeting `constraints`.
///
/// Phase 1 relaxes the searched value from `default_low` until a synthesis
/// run meets the constraints. Phase 2 bisects between `default_low` and that
/// value. Every run is kept and the best is picked by achieved frequency
/// among all feasible runs, not just the last one.
pub fn optimize<B: SynthesisBackend + ?Sized>(
    plan: &StreamPlan,
    constraints: &Constraints,
    budget: &ResourceBudget,
    backend: &B,
    options: &OptimizeOptions,
) -> Result<OptimizationResult, OptimizeError> {
    options.validate()?;
    constraints.validate()?;
    budget.validate()?;
    let dir = options.direction;
    let mut points: Vec<DesignPoint> = Vec::new();
    let run = |x: f64, phase: Phase, points: &mut Vec<DesignPoint>| -> Result<bool, OptimizeError> {
        let target = dir.period_ns(x);
        let report = backend.synthesize(plan, target)?;
        report.validate()?;
        let met = constraints_met(&report, constraints, budget);
        points.push(DesignPoint {
            iteration: points.len() + 1,
            phase,
            target_period_ns: target,
            max_resource_pct: resource_fraction(&report, budget).max_pct(),
            report,
            met,
        });
        Ok(met)
    };

    let mut tight = options.default_low;
    let mut loose = tight;
    let mut doublings = 0;
    loop {
        if doublings == options.max_doublings {
            return Err(OptimizeError::Infeasible { doublings, points });
        }
        loose = dir.relax(loose);
        doublings += 1;
        if run(loose, Phase::Bound, &mut points)? {
            break;
        }
    }
    let interval = (tight, loose);

    while (loose - tight).abs() > options.step {
        let pivot = (tight + loose) / 2.0;
        if run(pivot, Phase::Bisect, &mut points)? {
            loose = pivot;
        } else {
            tight = pivot;
        }
    }

    let mut best: Option<usize> = None;
    for (i, p) in points.iter().enumerate() {
        if p.met && best.is_none_or(|b| p.achieved_freq_mhz() > points[b].achieved_freq_mhz()) {
            best = Some(i);
        }
    }
    Ok(OptimizationResult {
        synthesis_calls: points.len(),
        points,
        best,
        doublings,
        interval,
    })
}
