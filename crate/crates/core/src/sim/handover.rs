//! Geometric handover checks that need only the BS point process.

use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;

use super::index::brute_nearest;
use super::{trial_rng, EstimatorOutput};
use crate::channel::SystemParams;

fn poisson_points<R: Rng + ?Sized>(density: f64, radius: f64, rng: &mut R) -> Vec<[f64; 2]> {
    use rand_distr::{Distribution, Poisson};
    let mean = density * PI * radius * radius;
    let n = Poisson::new(mean).expect("positive mean").sample(rng) as usize;
    (0..n)
        .map(|_| {
            let r = radius * rng.gen::<f64>().sqrt();
            let phi = 2.0 * PI * rng.gen::<f64>();
            [r * phi.cos(), r * phi.sin()]
        })
        .collect()
}

/// Fraction of trials in which a user at the origin changes its nearest BS
/// after moving a distance `d` in a uniform direction.
pub fn estimate_handover_probability(p: &SystemParams, d: f64, trials: usize, seed: u64) -> EstimatorOutput {
    let scale = p.lambda().powf(-0.5);
    let hits: usize = (0..trials as u64)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(seed, trial);
            let mut radius = 4.0 * scale + 2.0 * d;
            loop {
                let bs = poisson_points(p.lambda(), radius, &mut rng);
                let Some((b0, d2)) = brute_nearest(&bs, [0.0, 0.0]) else {
                    radius *= 2.0;
                    continue;
                };
                // Every BS that can beat the old one lies within r0 + 2d.
                if d2.sqrt() + 2.0 * d > radius {
                    radius *= 2.0;
                    continue;
                }
                let phi = 2.0 * PI * rng.gen::<f64>();
                let (b1, _) = brute_nearest(&bs, [d * phi.cos(), d * phi.sin()]).expect("non-empty");
                return usize::from(b0 != b1);
            }
        })
        .sum();
    EstimatorOutput::proportion(hits, trials, seed)
}

/// Cell-boundary crossings per unit time along straight paths of duration
/// `duration` at speed `v`, counted exactly from perpendicular bisectors.
pub fn estimate_handover_rate(p: &SystemParams, v: f64, duration: f64, trials: usize, seed: u64) -> EstimatorOutput {
    let scale = p.lambda().powf(-0.5);
    let length = v * duration;
    let rates: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(seed, trial);
            let bs = poisson_points(p.lambda(), 0.5 * length + 6.0 * scale, &mut rng);
            let phi = 2.0 * PI * rng.gen::<f64>();
            let u = [phi.cos(), phi.sin()];
            let x0 = [-0.5 * length * u[0], -0.5 * length * u[1]];
            let Some((mut b, _)) = brute_nearest(&bs, x0) else { return 0.0 };
            let mut s = 0.0;
            let mut crossings = 0usize;
            loop {
                let pb = bs[b];
                let nb = pb[0] * pb[0] + pb[1] * pb[1];
                let mut next = (usize::MAX, f64::INFINITY);
                for (c, pc) in bs.iter().enumerate() {
                    if c == b {
                        continue;
                    }
                    let diff = [pc[0] - pb[0], pc[1] - pb[1]];
                    let denom = 2.0 * (u[0] * diff[0] + u[1] * diff[1]);
                    if denom <= 0.0 {
                        continue;
                    }
                    let nc = pc[0] * pc[0] + pc[1] * pc[1];
                    let sc = (nc - nb - 2.0 * (x0[0] * diff[0] + x0[1] * diff[1])) / denom;
                    if sc > s && sc < next.1 {
                        next = (c, sc);
                    }
                }
                if next.1 > length {
                    break;
                }
                crossings += 1;
                b = next.0;
                s = next.1;
            }
            crossings as f64 / duration
        })
        .collect();
    EstimatorOutput::mean(&rates, seed)
}
