use std::io;

use serde::{Deserialize, Serialize};

use super::{DesignPoint, OptimizeError, Phase};
use crate::synth::SynthesisReport;

pub const DESIGN_POINT_HEADER: &str = "iteration,phase,target_period_ns,achieved_period_ns,achieved_freq_mhz,ii,latency_cycles,bram,dsp,ff,lut,max_resource_pct,met";

#[derive(Serialize, Deserialize)]
struct Row {
    iteration: usize,
    phase: u8,
    target_period_ns: f64,
    achieved_period_ns: f64,
    achieved_freq_mhz: f64,
    ii: u32,
    latency_cycles: u64,
    bram: u64,
    dsp: u64,
    ff: u64,
    lut: u64,
    max_resource_pct: f64,
    met: bool,
}

fn csv_error(e: csv::Error) -> OptimizeError {
    let line = e.position().map_or(0, |p| p.line());
    OptimizeError::Csv {
        line,
        message: e.to_string(),
    }
}

pub fn write_design_points<W: io::Write>(out: W, points: &[DesignPoint]) -> Result<(), OptimizeError> {
    let mut w = csv::Writer::from_writer(out);
    if points.is_empty() {
        w.write_record(DESIGN_POINT_HEADER.split(',')).map_err(csv_error)?;
    }
    for p in points {
        w.serialize(Row {
            iteration: p.iteration,
            phase: p.phase.number(),
            target_period_ns: p.target_period_ns,
            achieved_period_ns: p.report.achieved_period_ns,
            achieved_freq_mhz: p.achieved_freq_mhz(),
            ii: p.report.ii,
            latency_cycles: p.report.latency_cycles,
            bram: p.report.bram_blocks,
            dsp: p.report.dsp,
            ff: p.report.ff,
            lut: p.report.lut,
            max_resource_pct: p.max_resource_pct,
            met: p.met,
        })
        .map_err(csv_error)?;
    }
    w.flush().map_err(|e| OptimizeError::Csv {
        line: 0,
        message: e.to_string(),
    })
}

/// Reads points written by [`write_design_points`]. The frequency column
/// is recomputed from the period and not read back.
pub fn read_design_points<R: io::Read>(input: R) -> Result<Vec<DesignPoint>, OptimizeError> {
    let mut rd = csv::Reader::from_reader(input);
    let headers = rd.headers().map_err(csv_error)?.clone();
    if headers.iter().collect::<Vec<_>>().join(",") != DESIGN_POINT_HEADER {
        return Err(OptimizeError::Csv {
            line: 1,
            message: format!("expected header '{DESIGN_POINT_HEADER}'"),
        });
    }
    let mut out = Vec::new();
    for rec in rd.records() {
        let rec = rec.map_err(csv_error)?;
        let line = rec.position().map_or(0, |p| p.line());
        let row: Row = rec.deserialize(Some(&headers)).map_err(csv_error)?;
        let bad = |message: String| OptimizeError::Csv { line, message };
        let phase = Phase::from_number(row.phase).ok_or_else(|| bad(format!("phase {} is not 1 or 2", row.phase)))?;
        let report = SynthesisReport {
            ii: row.ii,
            latency_cycles: row.latency_cycles,
            bram_blocks: row.bram,
            dsp: row.dsp,
            ff: row.ff,
            lut: row.lut,
            achieved_period_ns: row.achieved_period_ns,
        };
        report.validate().map_err(|e| bad(e.to_string()))?;
        out.push(DesignPoint {
            iteration: row.iteration,
            phase,
            target_period_ns: row.target_period_ns,
            report,
            max_resource_pct: row.max_resource_pct,
            met: row.met,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Vec<DesignPoint> {
        (1..=3)
            .map(|i| DesignPoint {
                iteration: i,
                phase: if i == 1 { Phase::Bound } else { Phase::Bisect },
                target_period_ns: 12.735 + i as f64 / 3.0,
                report: SynthesisReport {
                    ii: 1,
                    latency_cycles: 169_683,
                    bram_blocks: 2,
                    dsp: 0,
                    ff: 30_000 + i as u64,
                    lut: 15_000,
                    achieved_period_ns: 8.121 + i as f64 / 7.0,
                },
                max_resource_pct: 5.4 + i as f64 / 9.0,
                met: i != 2,
            })
            .collect()
    }

    #[test]
    fn round_trip() {
        let pts = sample();
        let mut buf = Vec::new();
        write_design_points(&mut buf, &pts).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().next().unwrap(), DESIGN_POINT_HEADER);
        assert_eq!(read_design_points(buf.as_slice()).unwrap(), pts);
    }

    #[test]
    fn empty_has_header() {
        let mut buf = Vec::new();
        write_design_points(&mut buf, &[]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().trim_end(), DESIGN_POINT_HEADER);
    }

    #[test]
    fn errors_carry_line() {
        let mut buf = Vec::new();
        write_design_points(&mut buf, &sample()).unwrap();
        let mut text = String::from_utf8(buf).unwrap();
        text.push_str("4,2,abc,1,1,1,1,1,1,1,1,1,true\n");
        match read_design_points(text.as_bytes()) {
            Err(OptimizeError::Csv { line, .. }) => assert_eq!(line, 5),
            other => panic!("{other:?}"),
        }
        let bad_phase = format!("{DESIGN_POINT_HEADER}\n1,3,1,1,1000,1,1,0,0,0,0,1,true\n");
        assert!(matches!(
            read_design_points(bad_phase.as_bytes()),
            Err(OptimizeError::Csv { line: 2, .. })
        ));
        assert!(matches!(
            read_design_points("a,b\n1,2\n".as_bytes()),
            Err(OptimizeError::Csv { line: 1, .. })
        ));
    }
}
