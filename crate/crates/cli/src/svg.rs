//! Minimal SVG scatter plot of design points.

use std::fmt::Write;

use hlsloop::optimize::DesignPoint;

const W: f64 = 640.0;
const H: f64 = 420.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 24.0;
const BOTTOM: f64 = 52.0;

fn span(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    let pad = ((hi - lo) * 0.08).max(hi.abs() * 0.02).max(1e-6);
    (lo - pad, hi + pad)
}

/// x: achieved frequency, y: peak resource utilization. Feasible points are
/// filled, infeasible ones hollow, Pareto points ringed, and the resource
/// limit drawn as a dashed line.
pub fn scatter(points: &[DesignPoint], front: &[DesignPoint], limit_pct: f64) -> String {
    let (x0, x1) = span(points.iter().map(|p| p.achieved_freq_mhz()));
    let (y0, y1) = span(points.iter().map(|p| p.max_resource_pct).chain([limit_pct]));
    let px = |f: f64| LEFT + (f - x0) / (x1 - x0) * (W - LEFT - RIGHT);
    let py = |r: f64| H - BOTTOM - (r - y0) / (y1 - y0) * (H - TOP - BOTTOM);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let (ax0, ax1, ay0, ay1) = (LEFT, W - RIGHT, TOP, H - BOTTOM);
    let _ = writeln!(
        s,
        r#"<path d="M{ax0} {ay0} L{ax0} {ay1} L{ax1} {ay1}" fill="none" stroke="black"/>"#
    );
    for i in 0..=4 {
        let f = x0 + (x1 - x0) * f64::from(i) / 4.0;
        let r = y0 + (y1 - y0) * f64::from(i) / 4.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="middle">{f:.0}</text>"#,
            px(f),
            ay1 + 16.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="end">{r:.2}</text>"#,
            ax0 - 6.0,
            py(r) + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" font-size="12" text-anchor="middle">achieved frequency [MHz]</text>"#,
        (ax0 + ax1) / 2.0,
        H - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.1}" font-size="12" text-anchor="middle" transform="rotate(-90 16 {:.1})">resource usage [%]</text>"#,
        (ay0 + ay1) / 2.0,
        (ay0 + ay1) / 2.0
    );
    let ly = py(limit_pct);
    let _ = writeln!(
        s,
        r#"<line class="constraint" x1="{ax0}" y1="{ly:.1}" x2="{ax1}" y2="{ly:.1}" stroke="gray" stroke-dasharray="6 4"/>"#
    );
    for p in points {
        let fill = if p.met { "black" } else { "none" };
        let _ = writeln!(
            s,
            r#"<circle class="point" cx="{:.1}" cy="{:.1}" r="3" fill="{fill}" stroke="black"><title>#{} target {} ns</title></circle>"#,
            px(p.achieved_freq_mhz()),
            py(p.max_resource_pct),
            p.iteration,
            p.target_period_ns
        );
    }
    for p in front {
        let _ = writeln!(
            s,
            r#"<circle class="pareto" cx="{:.1}" cy="{:.1}" r="6" fill="none" stroke="blue" stroke-width="2"/>"#,
            px(p.achieved_freq_mhz()),
            py(p.max_resource_pct)
        );
    }
    s.push_str("</svg>\n");
    s
}
