use std::fmt;
use std::io;

use serde::{Deserialize, Serialize};

use super::SynthesisError;

/// Bits in one block RAM.
pub const BRAM_BLOCK_BITS: u64 = 18_432;

/// Outcome of one synthesis run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthesisReport {
    pub ii: u32,
    pub latency_cycles: u64,
    pub bram_blocks: u64,
    pub dsp: u64,
    pub ff: u64,
    pub lut: u64,
    pub achieved_period_ns: f64,
}

impl SynthesisReport {
    pub fn achieved_freq_mhz(&self) -> f64 {
        1000.0 / self.achieved_period_ns
    }

    pub fn validate(&self) -> Result<(), SynthesisError> {
        if self.ii == 0 {
            return Err(SynthesisError::InvalidReport("ii must be at least 1".into()));
        }
        if !(self.achieved_period_ns.is_finite() && self.achieved_period_ns > 0.0) {
            return Err(SynthesisError::InvalidReport(format!(
                "achieved period {} ns is not positive",
                self.achieved_period_ns
            )));
        }
        Ok(())
    }
}

impl fmt::Display for SynthesisReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "II            {}", self.ii)?;
        writeln!(f, "latency       {} cycles", self.latency_cycles)?;
        writeln!(f, "BRAM (18 kb)  {}", self.bram_blocks)?;
        writeln!(f, "DSP           {}", self.dsp)?;
        writeln!(f, "FF            {}", self.ff)?;
        writeln!(f, "LUT           {}", self.lut)?;
        write!(
            f,
            "clock         {} ns ({:.2} MHz)",
            self.achieved_period_ns,
            self.achieved_freq_mhz()
        )
    }
}

#[derive(Serialize, Deserialize)]
struct Row {
    design: String,
    ii: u32,
    latency_cycles: u64,
    bram: u64,
    dsp: u64,
    ff: u64,
    lut: u64,
    achieved_period_ns: f64,
    achieved_freq_mhz: f64,
}

/// Writes named reports as CSV, one row per report.
pub fn write_reports_csv<W: io::Write>(out: W, reports: &[(String, SynthesisReport)]) -> Result<(), SynthesisError> {
    let mut w = csv::Writer::from_writer(out);
    for (design, r) in reports {
        w.serialize(Row {
            design: design.clone(),
            ii: r.ii,
            latency_cycles: r.latency_cycles,
            bram: r.bram_blocks,
            dsp: r.dsp,
            ff: r.ff,
            lut: r.lut,
            achieved_period_ns: r.achieved_period_ns,
            achieved_freq_mhz: r.achieved_freq_mhz(),
        })
        .map_err(|e| SynthesisError::Csv(e.to_string()))?;
    }
    w.flush().map_err(|e| SynthesisError::Csv(e.to_string()))
}

pub fn read_reports_csv<R: io::Read>(input: R) -> Result<Vec<(String, SynthesisReport)>, SynthesisError> {
    let mut rd = csv::Reader::from_reader(input);
    let mut out = Vec::new();
    for row in rd.deserialize::<Row>() {
        let row = row.map_err(|e| SynthesisError::Csv(e.to_string()))?;
        let r = SynthesisReport {
            ii: row.ii,
            latency_cycles: row.latency_cycles,
            bram_blocks: row.bram,
            dsp: row.dsp,
            ff: row.ff,
            lut: row.lut,
            achieved_period_ns: row.achieved_period_ns,
        };
        r.validate()?;
        out.push((row.design, r));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SynthesisReport {
        SynthesisReport {
            ii: 1,
            latency_cycles: 169_683,
            bram_blocks: 2,
            dsp: 0,
            ff: 40_001,
            lut: 21_000,
            achieved_period_ns: 1000.0 / 3.0,
        }
    }

    #[test]
    fn csv_round_trip() {
        let rows = vec![("a".to_string(), sample()), ("b,c".to_string(), sample())];
        let mut buf = Vec::new();
        write_reports_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("design,ii,latency_cycles,bram,dsp,ff,lut,achieved_period_ns,achieved_freq_mhz\n"));
        assert_eq!(read_reports_csv(buf.as_slice()).unwrap(), rows);
    }

    #[test]
    fn rejects_bad_rows() {
        let text =
            "design,ii,latency_cycles,bram,dsp,ff,lut,achieved_period_ns,achieved_freq_mhz\nx,0,1,0,0,0,0,1.0,1000\n";
        assert!(matches!(
            read_reports_csv(text.as_bytes()),
            Err(SynthesisError::InvalidReport(_))
        ));
        let text = "design,ii\nx,one\n";
        assert!(matches!(read_reports_csv(text.as_bytes()), Err(SynthesisError::Csv(_))));
    }

    #[test]
    fn human_block() {
        let s = sample().to_string();
        assert!(s.contains("LUT           21000"));
        assert!(s.contains("(3.00 MHz)"));
    }
}
