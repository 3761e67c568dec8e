use super::SynthesisReport;

/// A report tagged with the design it describes.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedReport {
    pub algorithm: &'static str,
    pub implementation: &'static str,
    pub report: SynthesisReport,
}

impl NamedReport {
    pub fn name(&self) -> String {
        format!("{}/{}", self.algorithm, self.implementation)
    }
}

#[allow(clippy::too_many_arguments)]
fn row(
    algorithm: &'static str,
    implementation: &'static str,
    latency_cycles: u64,
    bram_blocks: u64,
    dsp: u64,
    ff: u64,
    lut: u64,
    freq_mhz: f64,
) -> NamedReport {
    NamedReport {
        algorithm,
        implementation,
        report: SynthesisReport {
            ii: 1,
            latency_cycles,
            bram_blocks,
            dsp,
            ff,
            lut,
            achieved_period_ns: 1000.0 / freq_mhz,
        },
    }
}

/// Published SAD and census block-matching results for a 450x375 image on
/// a Zynq 7100, for generated and handwritten designs.
pub fn table1_fixtures() -> Vec<NamedReport> {
    vec![
        row("SAD", "HIPAcc", 181_797, 8, 2, 140_228, 66_185, 182.38),
        row("SAD", "handwritten", 170_565, 4, 0, 29_288, 37_940, 271.59),
        row("Census", "HIPAcc", 180_090, 8, 0, 54_016, 23_144, 289.52),
        row("Census", "handwritten", 170_561, 4, 0, 9_978, 19_247, 319.18),
    ]
}
