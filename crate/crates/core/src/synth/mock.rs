use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{check_period, SynthesisBackend, SynthesisError, SynthesisReport, BRAM_BLOCK_BITS};
use crate::stream::StreamPlan;

/// Coefficients of the mock cost model.
///
/// Logic is charged per window-register bit, per line-buffer row and per
/// datapath operation, then inflated by `1 + retiming_k_ns / period` for
/// the extra pipeline registers a tighter clock needs. The achieved period
/// is `max(floor, timing_ratio * target + noise)`, where the noise is drawn
/// from a generator keyed by the target's bit pattern and `noise_seed`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MockModelParams {
    pub lut_per_register_bit: f64,
    pub lut_per_line_buffer_row: f64,
    pub lut_per_op: f64,
    pub ff_per_register_bit: f64,
    pub ff_per_line_buffer_row: f64,
    pub ff_per_op: f64,
    pub retiming_k_ns: f64,
    pub combinational_floor_ns: f64,
    pub timing_ratio: f64,
    pub noise_amplitude_ns: f64,
    pub noise_seed: u64,
}

impl Default for MockModelParams {
    fn default() -> Self {
        Self {
            lut_per_register_bit: 1.0,
            lut_per_line_buffer_row: 16.0,
            lut_per_op: 2.0,
            ff_per_register_bit: 2.0,
            ff_per_line_buffer_row: 32.0,
            ff_per_op: 4.0,
            retiming_k_ns: 3.8,
            combinational_floor_ns: 2.0,
            timing_ratio: 0.75,
            noise_amplitude_ns: 0.0,
            noise_seed: 0,
        }
    }
}

impl MockModelParams {
    pub fn with_noise(mut self, amplitude_ns: f64, seed: u64) -> Self {
        self.noise_amplitude_ns = amplitude_ns;
        self.noise_seed = seed;
        self
    }

    pub fn validate(&self) -> Result<(), SynthesisError> {
        let costs = [
            ("lut_per_register_bit", self.lut_per_register_bit),
            ("lut_per_line_buffer_row", self.lut_per_line_buffer_row),
            ("lut_per_op", self.lut_per_op),
            ("ff_per_register_bit", self.ff_per_register_bit),
            ("ff_per_line_buffer_row", self.ff_per_line_buffer_row),
            ("ff_per_op", self.ff_per_op),
            ("retiming_k_ns", self.retiming_k_ns),
            ("noise_amplitude_ns", self.noise_amplitude_ns),
        ];
        for (name, v) in costs {
            if !(v.is_finite() && v >= 0.0) {
                return Err(SynthesisError::InvalidParams(format!("{name} = {v} must be >= 0")));
            }
        }
        if !(self.combinational_floor_ns.is_finite() && self.combinational_floor_ns > 0.0) {
            return Err(SynthesisError::InvalidParams(format!(
                "combinational floor {} ns must be > 0",
                self.combinational_floor_ns
            )));
        }
        if !(self.timing_ratio.is_finite() && self.timing_ratio > 0.0) {
            return Err(SynthesisError::InvalidParams(format!(
                "timing ratio {} must be > 0",
                self.timing_ratio
            )));
        }
        Ok(())
    }

    fn noise(&self, target_period_ns: f64) -> f64 {
        if self.noise_amplitude_ns == 0.0 {
            return 0.0;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(target_period_ns.to_bits() ^ self.noise_seed);
        rng.gen_range(-self.noise_amplitude_ns..=self.noise_amplitude_ns)
    }
}

struct Totals {
    register_bits: f64,
    line_buffer_rows: f64,
    ops: f64,
    bram: u64,
    dsp: u64,
}

fn totals(plan: &StreamPlan) -> Totals {
    let mut t = Totals {
        register_bits: 0.0,
        line_buffer_rows: 0.0,
        ops: 0.0,
        bram: 0,
        dsp: 0,
    };
    for (stage, kernel) in plan.stages().iter().zip(plan.graph().kernels()) {
        let cost = kernel.cost();
        t.ops += cost.total_ops() as f64;
        t.dsp += cost.real_mults;
        for inp in &stage.inputs {
            t.register_bits += inp.register_bits() as f64;
            t.line_buffer_rows += inp.line_buffer_rows as f64;
            let bits = (inp.line_buffer_rows * stage.line_buffer_width) as u64 * u64::from(inp.bits);
            t.bram += bits.div_ceil(BRAM_BLOCK_BITS);
        }
    }
    t
}

/// Deterministic synthesis estimate for `plan` at `target_period_ns`.
pub fn mock_synthesize(
    plan: &StreamPlan,
    target_period_ns: f64,
    params: &MockModelParams,
) -> Result<SynthesisReport, SynthesisError> {
    check_period(target_period_ns)?;
    params.validate()?;
    let t = totals(plan);
    let retime = 1.0 + params.retiming_k_ns / target_period_ns;
    let lut = (params.lut_per_register_bit * t.register_bits
        + params.lut_per_line_buffer_row * t.line_buffer_rows
        + params.lut_per_op * t.ops)
        * retime;
    let ff = (params.ff_per_register_bit * t.register_bits
        + params.ff_per_line_buffer_row * t.line_buffer_rows
        + params.ff_per_op * t.ops)
        * retime;
    let achieved =
        (params.timing_ratio * target_period_ns + params.noise(target_period_ns)).max(params.combinational_floor_ns);
    Ok(SynthesisReport {
        ii: plan.ii(),
        latency_cycles: plan.total_cycles(),
        bram_blocks: t.bram,
        dsp: t.dsp,
        ff: ff.round() as u64,
        lut: lut.round() as u64,
        achieved_period_ns: achieved,
    })
}

/// [`mock_synthesize`] behind the backend contract.
#[derive(Debug, Clone, Default)]
pub struct MockBackend {
    params: MockModelParams,
}

impl MockBackend {
    pub fn new(params: MockModelParams) -> Result<Self, SynthesisError> {
        params.validate()?;
        Ok(Self { params })
    }

    pub fn params(&self) -> &MockModelParams {
        &self.params
    }
}

impl SynthesisBackend for MockBackend {
    fn name(&self) -> &str {
        "mock"
    }

    fn concurrent(&self) -> bool {
        true
    }

    fn synthesize(&self, plan: &StreamPlan, target_period_ns: f64) -> Result<SynthesisReport, SynthesisError> {
        mock_synthesize(plan, target_period_ns, &self.params)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::library::gaussian_graph;
    use crate::image::BoundaryMode;
    use crate::matcher::{build_census_pipeline, MatchConfig};
    use crate::stream::lower;
    use crate::synth::{resource_fraction, ResourceBudget};
    use proptest::prelude::*;

    fn gaussian_plan() -> StreamPlan {
        lower(&gaussian_graph(BoundaryMode::Clamp), 450, 375).unwrap()
    }

    fn census_plan() -> StreamPlan {
        lower(&build_census_pipeline(&MatchConfig::default()).unwrap(), 450, 375).unwrap()
    }

    #[test]
    fn gaussian_bram_and_dsp() {
        let r = mock_synthesize(&gaussian_plan(), 5.0, &MockModelParams::default()).unwrap();
        assert_eq!(r.bram_blocks, (2u64 * 450 * 8).div_ceil(18_432));
        assert_eq!(r.bram_blocks, 1);
        assert_eq!(r.dsp, 9);
        assert_eq!(r.ii, 1);
        assert_eq!(r.latency_cycles, 168_750 + 452);
    }

    #[test]
    fn zero_retiming_is_flat() {
        let p = MockModelParams {
            retiming_k_ns: 0.0,
            ..Default::default()
        };
        let plan = census_plan();
        let a = mock_synthesize(&plan, 2.5, &p).unwrap();
        let b = mock_synthesize(&plan, 40.0, &p).unwrap();
        assert_eq!((a.lut, a.ff, a.bram_blocks, a.dsp), (b.lut, b.ff, b.bram_blocks, b.dsp));
    }

    #[test]
    fn unmet_timing_is_reported() {
        let r = mock_synthesize(&gaussian_plan(), 0.5, &MockModelParams::default()).unwrap();
        assert!(r.achieved_period_ns > 0.5);
        assert_eq!(r.achieved_period_ns, 2.0);
    }

    #[test]
    fn census_calibration() {
        // within 2x of LUT 23,144 and FF 54,016 at 289.52 MHz
        let r = mock_synthesize(&census_plan(), 1000.0 / 289.52, &MockModelParams::default()).unwrap();
        assert!((11_572..=46_288).contains(&r.lut), "lut {}", r.lut);
        assert!((27_008..=108_032).contains(&r.ff), "ff {}", r.ff);
        // a 6% limit binds somewhere between the doubling probes
        let budget = ResourceBudget::zynq_7100();
        let tight = mock_synthesize(&census_plan(), 4.0, &MockModelParams::default()).unwrap();
        let loose = mock_synthesize(&census_plan(), 16.0, &MockModelParams::default()).unwrap();
        assert!(resource_fraction(&tight, &budget).max_pct() > 6.0);
        assert!(resource_fraction(&loose, &budget).max_pct() < 6.0);
    }

    #[test]
    fn invalid_inputs() {
        let plan = gaussian_plan();
        let p = MockModelParams::default();
        assert!(matches!(
            mock_synthesize(&plan, 0.0, &p),
            Err(SynthesisError::InvalidPeriod(_))
        ));
        assert!(matches!(
            mock_synthesize(&plan, f64::NAN, &p),
            Err(SynthesisError::InvalidPeriod(_))
        ));
        let bad = MockModelParams {
            combinational_floor_ns: 0.0,
            ..p
        };
        assert!(MockBackend::new(bad).is_err());
        let bad = MockModelParams { lut_per_op: -1.0, ..p };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn noise_is_keyed_by_period() {
        let plan = census_plan();
        let p = MockModelParams::default().with_noise(1.0, 7);
        let a = mock_synthesize(&plan, 12.735, &p).unwrap();
        let b = mock_synthesize(&plan, 12.735, &p).unwrap();
        let c = mock_synthesize(&plan, 12.730, &p).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.achieved_period_ns, c.achieved_period_ns);
        assert!((a.achieved_period_ns - 0.75 * 12.735).abs() <= 1.0);
    }

    proptest! {
        #[test]
        fn monotone_in_period(p1 in 0.5f64..50.0, dp in 0.0f64..50.0, amp in 0.0f64..2.0, seed: u64) {
            let plan = census_plan();
            let params = MockModelParams::default().with_noise(amp, seed);
            let a = mock_synthesize(&plan, p1, &params).unwrap();
            let b = mock_synthesize(&plan, p1 + dp, &params).unwrap();
            prop_assert!(a.lut >= b.lut && a.ff >= b.ff);
            prop_assert!(a.bram_blocks >= b.bram_blocks && a.dsp >= b.dsp);
            prop_assert_eq!(a.latency_cycles, plan.total_cycles());
        }

        #[test]
        fn deterministic(p in 0.5f64..50.0, amp in 0.0f64..2.0, seed: u64) {
            let plan = gaussian_plan();
            let params = MockModelParams::default().with_noise(amp, seed);
            prop_assert_eq!(
                mock_synthesize(&plan, p, &params).unwrap(),
                mock_synthesize(&plan, p, &params).unwrap()
            );
        }
    }
}
