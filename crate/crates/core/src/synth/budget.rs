use super::{SynthesisError, SynthesisReport, BRAM_BLOCK_BITS};

/// Device capacities.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResourceBudget {
    pub lut_total: u64,
    pub ff_total: u64,
    pub dsp_total: u64,
    pub bram_blocks_total: u64,
}

impl ResourceBudget {
    pub fn new(lut: u64, ff: u64, dsp: u64, bram_blocks: u64) -> Result<Self, SynthesisError> {
        let b = Self {
            lut_total: lut,
            ff_total: ff,
            dsp_total: dsp,
            bram_blocks_total: bram_blocks,
        };
        b.validate()?;
        Ok(b)
    }

    /// Zynq 7100: 277,400 LUTs, 554,800 FFs, 2,020 DSP slices and 3,020 kB
    /// of block RAM.
    pub fn zynq_7100() -> Self {
        Self {
            lut_total: 277_400,
            ff_total: 554_800,
            dsp_total: 2_020,
            bram_blocks_total: 3_020 * 8 * 1024 / BRAM_BLOCK_BITS,
        }
    }

    pub fn validate(&self) -> Result<(), SynthesisError> {
        if self.lut_total == 0 || self.ff_total == 0 || self.dsp_total == 0 || self.bram_blocks_total == 0 {
            return Err(SynthesisError::InvalidBudget(format!(
                "all capacities must be positive: {self:?}"
            )));
        }
        Ok(())
    }
}

impl Default for ResourceBudget {
    fn default() -> Self {
        Self::zynq_7100()
    }
}

/// Upper limits an acceptable design must respect.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constraints {
    pub max_ii: u32,
    /// Limit on the largest per-resource utilization, in percent.
    pub max_resource_pct: f64,
    pub min_freq_mhz: Option<f64>,
}

impl Constraints {
    pub fn new(max_ii: u32, max_resource_pct: f64, min_freq_mhz: Option<f64>) -> Result<Self, SynthesisError> {
        let c = Self {
            max_ii,
            max_resource_pct,
            min_freq_mhz,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), SynthesisError> {
        if self.max_ii == 0 {
            return Err(SynthesisError::InvalidConstraints("max II must be at least 1".into()));
        }
        if !(self.max_resource_pct > 0.0 && self.max_resource_pct <= 100.0) {
            return Err(SynthesisError::InvalidConstraints(format!(
                "resource limit {}% is outside (0, 100]",
                self.max_resource_pct
            )));
        }
        if let Some(f) = self.min_freq_mhz {
            if !(f.is_finite() && f > 0.0) {
                return Err(SynthesisError::InvalidConstraints(format!(
                    "minimum frequency {f} MHz is not positive"
                )));
            }
        }
        Ok(())
    }
}

impl Default for Constraints {
    fn default() -> Self {
        Self {
            max_ii: 1,
            max_resource_pct: 100.0,
            min_freq_mhz: None,
        }
    }
}

/// Utilization of each resource as a fraction of the budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResourceFractions {
    pub lut: f64,
    pub ff: f64,
    pub dsp: f64,
    pub bram: f64,
}

impl ResourceFractions {
    pub fn max(&self) -> f64 {
        self.lut.max(self.ff).max(self.dsp).max(self.bram)
    }

    pub fn max_pct(&self) -> f64 {
        self.max() * 100.0
    }
}

pub fn resource_fraction(report: &SynthesisReport, budget: &ResourceBudget) -> ResourceFractions {
    let f = |used: u64, total: u64| used as f64 / total as f64;
    ResourceFractions {
        lut: f(report.lut, budget.lut_total),
        ff: f(report.ff, budget.ff_total),
        dsp: f(report.dsp, budget.dsp_total),
        bram: f(report.bram_blocks, budget.bram_blocks_total),
    }
}

/// Resources are compared as `used * 100 <= pct * total` so that a count
/// sitting exactly on the limit is accepted.
pub fn constraints_met(report: &SynthesisReport, constraints: &Constraints, budget: &ResourceBudget) -> bool {
    if report.ii > constraints.max_ii {
        return false;
    }
    let pct = constraints.max_resource_pct;
    let within = |used: u64, total: u64| used as f64 * 100.0 <= pct * total as f64;
    if !(within(report.lut, budget.lut_total)
        && within(report.ff, budget.ff_total)
        && within(report.dsp, budget.dsp_total)
        && within(report.bram_blocks, budget.bram_blocks_total))
    {
        return false;
    }
    constraints.min_freq_mhz.is_none_or(|f| report.achieved_freq_mhz() >= f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn report(lut: u64, ff: u64, dsp: u64, bram: u64, ii: u32) -> SynthesisReport {
        SynthesisReport {
            ii,
            latency_cycles: 0,
            bram_blocks: bram,
            dsp,
            ff,
            lut,
            achieved_period_ns: 4.0,
        }
    }

    fn six_pct() -> Constraints {
        Constraints::new(1, 6.0, None).unwrap()
    }

    #[test]
    fn zynq_budget() {
        let b = ResourceBudget::zynq_7100();
        assert_eq!(b.bram_blocks_total, 1_342);
        assert!(ResourceBudget::new(1, 1, 0, 1).is_err());
    }

    #[test]
    fn fraction_examples() {
        let b = ResourceBudget::zynq_7100();
        let census = report(23_144, 54_016, 0, 8, 1);
        assert!((resource_fraction(&census, &b).lut * 100.0 - 8.343).abs() < 0.001);
        assert_eq!(resource_fraction(&report(0, 0, 0, 0, 1), &b).max(), 0.0);
        let full = report(b.lut_total, b.ff_total, b.dsp_total, b.bram_blocks_total, 1);
        assert_eq!(resource_fraction(&full, &b).max(), 1.0);
        assert!(constraints_met(&full, &Constraints::default(), &b));
    }

    #[test]
    fn constraint_examples() {
        let b = ResourceBudget::new(10_000, 10_000, 10_000, 10_000).unwrap();
        assert!(constraints_met(&report(590, 0, 0, 0, 1), &six_pct(), &b));
        assert!(constraints_met(&report(600, 0, 0, 0, 1), &six_pct(), &b));
        assert!(!constraints_met(&report(601, 0, 0, 0, 1), &six_pct(), &b));
        assert!(!constraints_met(&report(0, 0, 0, 0, 2), &six_pct(), &b));
        let fast = Constraints::new(1, 100.0, Some(300.0)).unwrap();
        assert!(!constraints_met(&report(0, 0, 0, 0, 1), &fast, &b));
        let slow = Constraints::new(1, 100.0, Some(250.0)).unwrap();
        assert!(constraints_met(&report(0, 0, 0, 0, 1), &slow, &b));
        assert!(Constraints::new(0, 6.0, None).is_err());
        assert!(Constraints::new(1, 0.0, None).is_err());
        assert!(Constraints::new(1, 100.5, None).is_err());
    }

    proptest! {
        #[test]
        fn antitone(
            lut in 0u64..2_000, ff in 0u64..2_000, dsp in 0u64..2_000, bram in 0u64..2_000,
            ii in 1u32..4, bump in 0u64..500, which in 0usize..5,
        ) {
            let b = ResourceBudget::new(20_000, 20_000, 20_000, 20_000).unwrap();
            let c = Constraints::new(2, 6.0, None).unwrap();
            let base = report(lut, ff, dsp, bram, ii);
            let mut worse = base;
            match which {
                0 => worse.lut += bump,
                1 => worse.ff += bump,
                2 => worse.dsp += bump,
                3 => worse.bram_blocks += bump,
                _ => worse.ii += bump as u32 % 3,
            }
            prop_assert!(!constraints_met(&worse, &c, &b) || constraints_met(&base, &c, &b));
        }
    }
}
