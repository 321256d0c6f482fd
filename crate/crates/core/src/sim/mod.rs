//! Monte Carlo reference simulator.
//!
//! Every trial draws an independent network from its own ChaCha stream
//! keyed by `(seed, trial)`, so estimates do not depend on thread count or
//! scheduling order.

mod estimators;
mod handover;
mod index;
mod realization;
mod success;

use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

pub use estimators::{
    estimate_joint_and_correlation, estimate_meta, estimate_paoi, meta_from_samples, EmpiricalPaoi, JointSample,
    TrialPair,
};
pub use handover::{estimate_handover_probability, estimate_handover_rate};
pub use index::BsIndex;
pub use realization::{Interferer, NetworkRealization, Simulator};
pub use success::LinkBudget;

/// Ground users or aerial users at the configured altitude.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UserKind {
    Ground,
    Aerial,
}

impl UserKind {
    pub fn name(self) -> &'static str {
        match self {
            UserKind::Ground => "ground",
            UserKind::Aerial => "aerial",
        }
    }
}

/// Where the typical UE is placed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Placement {
    /// Uniformly inside the cell of a BS added at the origin.
    Cell,
    /// At the origin, served by its nearest BS.
    Origin,
}

/// Whether LoS/NLoS labels are redrawn at the second instant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelMode {
    Redraw,
    /// Labels persist unless a handover happens.
    Persistent,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub placement: Placement,
    pub labels: LabelMode,
    /// Window radius in units of `λ^(-1/2)`; `None` picks 10 for ground and
    /// 20 for aerial users.
    pub window_factor: Option<f64>,
    /// Adds the mean interference from beyond the window to the noise.
    pub tail_compensation: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            placement: Placement::Cell,
            labels: LabelMode::Redraw,
            window_factor: None,
            tail_compensation: true,
        }
    }
}

/// Point estimate with a 95% normal-approximation confidence half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorOutput {
    pub estimate: f64,
    pub half_width: f64,
    pub trials: usize,
    pub seed: u64,
}

const Z95: f64 = 1.959963984540054;

impl EstimatorOutput {
    pub fn proportion(hits: usize, trials: usize, seed: u64) -> Self {
        if trials == 0 {
            return EstimatorOutput { estimate: f64::NAN, half_width: f64::NAN, trials, seed };
        }
        let p = hits as f64 / trials as f64;
        EstimatorOutput {
            estimate: p,
            half_width: Z95 * (p * (1.0 - p) / trials as f64).sqrt(),
            trials,
            seed,
        }
    }

    pub fn mean(samples: &[f64], seed: u64) -> Self {
        let n = samples.len() as f64;
        let m = samples.iter().sum::<f64>() / n;
        let var = samples.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
        EstimatorOutput {
            estimate: m,
            half_width: Z95 * (var / n).sqrt(),
            trials: samples.len(),
            seed,
        }
    }
}

pub(crate) fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::SystemParams;

    #[test]
    fn identical_seeds_give_identical_realizations() {
        let sim = Simulator::new(&SystemParams::default(), UserKind::Ground, SimConfig::default()).unwrap();
        let a = sim.realize(&mut trial_rng(5, 17));
        let b = sim.realize(&mut trial_rng(5, 17));
        assert_eq!(a.bs, b.bs);
        assert_eq!(a.ues, b.ues);
        assert_eq!(a.interferers, b.interferers);
        let c = sim.realize(&mut trial_rng(5, 18));
        assert_ne!(a.bs, c.bs);
    }

    #[test]
    fn zero_velocity_keeps_geometry() {
        let sim = Simulator::new(&SystemParams::default(), UserKind::Aerial, SimConfig::default()).unwrap();
        let mut rng = trial_rng(1, 0);
        let r = sim.realize(&mut rng);
        let (s, handover) = sim.displace(&r, 0.0, &mut rng);
        assert!(!handover);
        assert_eq!(s.typical, r.typical);
        let moved: Vec<_> = s.interferers.iter().map(|i| i.position).collect();
        let before: Vec<_> = r.interferers.iter().map(|i| i.position).collect();
        assert_eq!(moved, before);
    }

    #[test]
    fn interferers_come_from_other_cells() {
        let sim = Simulator::new(&SystemParams::default(), UserKind::Ground, SimConfig::default()).unwrap();
        let r = sim.realize(&mut trial_rng(2, 3));
        assert!(r.interferers.len() < r.bs.len());
        assert_eq!(r.serving, 0);
        assert_eq!(r.nearest_bs(r.typical), 0);
        for i in &r.interferers {
            assert_ne!(i.cell, r.serving);
            assert_eq!(r.nearest_bs(i.position), i.cell);
        }
    }

    #[test]
    fn tiny_threshold_always_succeeds() {
        let p = SystemParams::default().with_threshold(1e-15);
        let sim = Simulator::new(&p, UserKind::Ground, SimConfig::default()).unwrap();
        let est = estimate_meta(&sim, &[0.5, 0.9], 200, 4);
        assert!(est.iter().all(|e| e.estimate == 1.0));
    }
}
