use thiserror::Error;

#[derive(Debug, Error, Clone, Copy, PartialEq)]
#[error("clock frequency must be positive, got {0} MHz")]
pub struct NonPositiveClock(pub f64);

/// Steady-state frame latency, `pixels * ii / f`, ignoring pipeline fill.
pub fn total_latency_seconds(pixels: u64, ii: u32, clk_mhz: f64) -> Result<f64, NonPositiveClock> {
    if clk_mhz <= 0.0 || !clk_mhz.is_finite() {
        return Err(NonPositiveClock(clk_mhz));
    }
    Ok(pixels as f64 * f64::from(ii) / (clk_mhz * 1e6))
}

/// Frame latency including the fill cycles.
pub fn total_latency_with_fill_seconds(
    pixels: u64,
    ii: u32,
    fill_cycles: u64,
    clk_mhz: f64,
) -> Result<f64, NonPositiveClock> {
    let steady = total_latency_seconds(pixels, ii, clk_mhz)?;
    Ok(steady + fill_cycles as f64 / (clk_mhz * 1e6))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let t = total_latency_seconds(168_750, 1, 289.52).unwrap();
        assert!((t * 1e6 - 582.86).abs() < 0.01, "{t}");
        assert_eq!(total_latency_seconds(0, 1, 100.0).unwrap(), 0.0);
        let t = total_latency_seconds(1_000, 2, 100.0).unwrap();
        assert!((t - 20e-6).abs() < 1e-15);
        assert!(total_latency_seconds(1, 1, 0.0).is_err());
        assert!(total_latency_seconds(1, 1, -5.0).is_err());
        assert!(total_latency_seconds(1, 1, f64::NAN).is_err());
        let with_fill = total_latency_with_fill_seconds(1_000, 1, 100, 100.0).unwrap();
        assert!((with_fill - 11e-6).abs() < 1e-15);
    }
}
