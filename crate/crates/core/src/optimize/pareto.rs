use std::cmp::Ordering;

use super::DesignPoint;

/// Points not dominated under (higher achieved frequency, lower peak
/// utilization), sorted by frequency descending. Of several identical
/// points only the earliest in `points` is kept.
pub fn pareto_front(points: &[DesignPoint]) -> Vec<DesignPoint> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        let (pa, pb) = (&points[a], &points[b]);
        pb.achieved_freq_mhz()
            .total_cmp(&pa.achieved_freq_mhz())
            .then(pa.max_resource_pct.total_cmp(&pb.max_resource_pct))
            .then(a.cmp(&b))
    });
    let mut front = Vec::new();
    let mut lowest = f64::INFINITY;
    for i in order {
        let p = points[i];
        if p.max_resource_pct.total_cmp(&lowest) == Ordering::Less {
            lowest = p.max_resource_pct;
            front.push(p);
        }
    }
    front
}
