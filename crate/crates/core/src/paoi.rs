//! Handover rate, handover delay and the peak age of information.

use std::f64::consts::PI;

use crate::correlation::{JointGrid, JointModel, MobilityGrids};
use crate::error::{Error, Result};
use crate::SystemParams;

/// Mean number of cell-boundary crossings per unit time at speed `v`.
pub fn handover_rate(p: &SystemParams, v: f64) -> f64 {
    4.0 * v * p.lambda().sqrt() / PI
}

/// Fraction of time lost to handover interruptions, capped at one.
pub fn delay_fraction(p: &SystemParams, v: f64) -> f64 {
    (p.handover_delay / p.slot_duration * handover_rate(p, v)).min(1.0)
}

/// Distribution of the peak age of information.
#[derive(Debug, Clone, PartialEq)]
pub struct PaoiResult {
    pub times: Vec<f64>,
    pub cdf: Vec<f64>,
    pub handover_weight: f64,
    pub no_handover_weight: f64,
    /// Requested `(q, time)` pairs.
    pub percentiles: Vec<(f64, f64)>,
    pub total_mass: f64,
}

impl PaoiResult {
    pub fn percentile(&self, q: f64) -> Result<f64> {
        percentile(self, q)
    }

    /// CDF at `t`, linearly interpolated on the time grid.
    pub fn cdf_at(&self, t: f64) -> f64 {
        let k = self.times.partition_point(|x| *x < t);
        if k == 0 {
            return 0.0;
        }
        if k >= self.times.len() {
            return *self.cdf.last().unwrap();
        }
        let (t0, t1) = (self.times[k - 1], self.times[k]);
        let (f0, f1) = (self.cdf[k - 1], self.cdf[k]);
        f0 + (f1 - f0) * (t - t0) / (t1 - t0)
    }
}

/// Number of sub-samples per lattice axis used to resolve `1/γ` inside a cell.
const SUBSAMPLES: usize = 4;
const TIME_POINTS: usize = 400;

/// Point masses of the age `1/γ0 + 1/γ1 + offset` spread over each cell.
fn atoms(grid: &JointGrid, offset: f64, weight: f64, out: &mut Vec<(f64, f64)>) {
    let n = grid.cells;
    let sub = SUBSAMPLES as f64;
    let inv: Vec<f64> = (0..n * SUBSAMPLES)
        .map(|k| 1.0 / ((k as f64 + 0.5) / sub * grid.step))
        .collect();
    for i in 0..n {
        for j in 0..n {
            let m = grid.mass(i, j) * weight / (sub * sub);
            if m == 0.0 {
                continue;
            }
            for a in 0..SUBSAMPLES {
                for b in 0..SUBSAMPLES {
                    out.push((inv[i * SUBSAMPLES + a] + inv[j * SUBSAMPLES + b] + offset, m));
                }
            }
        }
    }
}

/// CDF of the peak age for a pair of branch lattices.
///
/// Without handover the age is `1/γ0 + 1/γ1 + t_tra`; with handover the
/// transfer term is stretched to `t_tra / (1 - D_HO)`. When `times` is
/// `None` a geometric grid of 400 points from `2 + t_tra` up to the 99.9%
/// point of the distribution is used.
pub fn paoi_cdf(
    grids: &MobilityGrids,
    transfer_time: f64,
    delay: f64,
    times: Option<&[f64]>,
    quantiles: &[f64],
) -> Result<PaoiResult> {
    if !(delay < 1.0) || delay < 0.0 {
        return Err(Error::domain(
            "paoi_cdf",
            format!("handover delay fraction {delay} must lie in [0, 1)"),
        ));
    }
    if !(transfer_time > 0.0) {
        return Err(Error::domain("paoi_cdf", "transfer time must be positive"));
    }
    let ph = grids.handover_probability;
    let mut pts = Vec::new();
    atoms(&grids.no_handover, transfer_time, 1.0 - ph, &mut pts);
    atoms(&grids.handover, transfer_time / (1.0 - delay), ph, &mut pts);
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut cumulative = Vec::with_capacity(pts.len());
    let mut acc = 0.0;
    for (_, m) in &pts {
        acc += m;
        cumulative.push(acc);
    }
    let total = acc;
    let floor = 2.0 + transfer_time;

    let grid: Vec<f64> = match times {
        Some(t) => t.to_vec(),
        None => {
            let k = cumulative.partition_point(|c| *c < 0.999 * total);
            let top = pts.get(k).map(|p| p.0).unwrap_or(floor * 10.0).max(floor * 1.01) * 1.01;
            let ratio = (top / floor).powf(1.0 / (TIME_POINTS - 1) as f64);
            (0..TIME_POINTS).map(|i| floor * ratio.powi(i as i32)).collect()
        }
    };
    let cdf: Vec<f64> = grid
        .iter()
        .map(|t| {
            let k = pts.partition_point(|p| p.0 < *t);
            if k == 0 {
                0.0
            } else {
                cumulative[k - 1]
            }
        })
        .collect();
    let mut result = PaoiResult {
        times: grid,
        cdf,
        handover_weight: ph,
        no_handover_weight: 1.0 - ph,
        percentiles: Vec::new(),
        total_mass: total,
    };
    for q in quantiles {
        let t = percentile(&result, *q)?;
        result.percentiles.push((*q, t));
    }
    Ok(result)
}

/// Peak-age distribution of a model at velocity `v`. The interval between
/// the two observations is the mean inter-arrival time `1/λ_a`.
pub fn paoi_distribution(model: &dyn JointModel, v: f64, quantiles: &[f64]) -> Result<PaoiResult> {
    let p = model.params();
    let t = p.transfer_time();
    let grids = MobilityGrids::build(model, v, t)?;
    paoi_cdf(&grids, t, delay_fraction(p, v), None, quantiles)
}

/// Smallest time at which the CDF reaches `q`, interpolated linearly
/// between the bracketing grid points.
pub fn percentile(result: &PaoiResult, q: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&q) {
        return Err(Error::domain("percentile", format!("q = {q} outside [0, 1)")));
    }
    if q == 0.0 {
        return Ok(result.times[0]);
    }
    let k = result.cdf.partition_point(|f| *f < q);
    if k >= result.cdf.len() {
        return Err(Error::domain(
            "percentile",
            format!("q = {q} exceeds the largest CDF value {}", result.cdf.last().unwrap_or(&0.0)),
        ));
    }
    if k == 0 {
        return Ok(result.times[0]);
    }
    let (t0, t1) = (result.times[k - 1], result.times[k]);
    let (f0, f1) = (result.cdf[k - 1], result.cdf[k]);
    if f1 == f0 {
        return Ok(t1);
    }
    Ok(t0 + (t1 - t0) * (q - f0) / (f1 - f0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rate_and_delay_examples() {
        let p = SystemParams::default();
        assert_eq!(handover_rate(&p, 0.0), 0.0);
        assert_eq!(delay_fraction(&p, 0.0), 0.0);
        let expected = 0.35 * 4.0 * 10.0 / (1000.0 * PI);
        assert!((delay_fraction(&p, 10.0) - expected).abs() < 1e-15);
        assert_eq!(delay_fraction(&p, 1e6), 1.0);
    }

    #[test]
    fn percentile_of_a_step() {
        let r = PaoiResult {
            times: vec![1.0, 2.0, 3.0, 4.0],
            cdf: vec![0.0, 0.0, 0.7, 0.7],
            handover_weight: 0.0,
            no_handover_weight: 1.0,
            percentiles: vec![],
            total_mass: 0.7,
        };
        assert_eq!(percentile(&r, 0.0).unwrap(), 1.0);
        assert!(percentile(&r, 0.9).is_err());
        let t = percentile(&r, 0.35).unwrap();
        assert!(t > 2.0 && t <= 3.0);
    }
}
