//! Estimators of the meta distribution, the joint law at two instants,
//! the correlation coefficient and the peak age of information.

use rayon::prelude::*;

use super::realization::Simulator;
use super::{trial_rng, EstimatorOutput};
use crate::correlation::Branch;
use crate::paoi::delay_fraction;

/// Conditional success probabilities at two instants of one trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialPair {
    pub p0: f64,
    pub p1: f64,
    pub handover: bool,
}

impl Simulator {
    /// One conditional success probability per trial.
    pub fn success_samples(&self, trials: usize, seed: u64) -> Vec<f64> {
        (0..trials as u64)
            .into_par_iter()
            .map(|trial| {
                let mut rng = trial_rng(seed, trial);
                let r = self.realize(&mut rng);
                self.conditional_success(&r)
            })
            .collect()
    }

    /// Success probabilities before and after moving for `t` at speed `v`.
    pub fn pair_samples(&self, v: f64, t: f64, trials: usize, seed: u64) -> Vec<TrialPair> {
        (0..trials as u64)
            .into_par_iter()
            .map(|trial| {
                let mut rng = trial_rng(seed, trial);
                let r0 = self.realize(&mut rng);
                let p0 = self.conditional_success(&r0);
                let (r1, handover) = self.displace(&r0, v * t, &mut rng);
                TrialPair {
                    p0,
                    p1: self.conditional_success(&r1),
                    handover,
                }
            })
            .collect()
    }
}

/// Empirical `P(P_s > γ)` at each `γ`.
pub fn meta_from_samples(samples: &[f64], gammas: &[f64], seed: u64) -> Vec<EstimatorOutput> {
    gammas
        .iter()
        .map(|g| EstimatorOutput::proportion(samples.iter().filter(|s| **s > *g).count(), samples.len(), seed))
        .collect()
}

pub fn estimate_meta(sim: &Simulator, gammas: &[f64], trials: usize, seed: u64) -> Vec<EstimatorOutput> {
    meta_from_samples(&sim.success_samples(trials, seed), gammas, seed)
}

/// Pair samples with the statistics built on them.
#[derive(Debug, Clone)]
pub struct JointSample {
    pub pairs: Vec<TrialPair>,
    pub seed: u64,
}

impl JointSample {
    fn branch(&self, branch: Option<Branch>) -> impl Iterator<Item = &TrialPair> {
        self.pairs.iter().filter(move |t| match branch {
            None => true,
            Some(Branch::Handover) => t.handover,
            Some(Branch::NoHandover) => !t.handover,
        })
    }

    pub fn handover_fraction(&self) -> EstimatorOutput {
        EstimatorOutput::proportion(self.pairs.iter().filter(|t| t.handover).count(), self.pairs.len(), self.seed)
    }

    /// `P(P_s(t0) > γ0, P_s(t1) > γ1)`, optionally within one branch.
    pub fn joint_ccdf(&self, gamma0: f64, gamma1: f64, branch: Option<Branch>) -> EstimatorOutput {
        let (mut hits, mut n) = (0, 0);
        for t in self.branch(branch) {
            n += 1;
            if t.p0 > gamma0 && t.p1 > gamma1 {
                hits += 1;
            }
        }
        EstimatorOutput::proportion(hits, n, self.seed)
    }

    /// Marginal `P(P_s(t_k) > γ)` for `k = 0` or `1`.
    pub fn marginal(&self, gamma: f64, instant: usize) -> EstimatorOutput {
        let hits = self
            .pairs
            .iter()
            .filter(|t| if instant == 0 { t.p0 > gamma } else { t.p1 > gamma })
            .count();
        EstimatorOutput::proportion(hits, self.pairs.len(), self.seed)
    }

    /// Pearson correlation of the pair sample.
    pub fn correlation(&self) -> f64 {
        let n = self.pairs.len() as f64;
        let m0 = self.pairs.iter().map(|t| t.p0).sum::<f64>() / n;
        let m1 = self.pairs.iter().map(|t| t.p1).sum::<f64>() / n;
        let (mut c, mut v0, mut v1) = (0.0, 0.0, 0.0);
        for t in &self.pairs {
            let (a, b) = (t.p0 - m0, t.p1 - m1);
            c += a * b;
            v0 += a * a;
            v1 += b * b;
        }
        c / (v0 * v1).sqrt()
    }

    pub fn mean_success(&self) -> EstimatorOutput {
        let s: Vec<f64> = self.pairs.iter().map(|t| t.p0).collect();
        EstimatorOutput::mean(&s, self.seed)
    }
}

pub fn estimate_joint_and_correlation(sim: &Simulator, v: f64, t: f64, trials: usize, seed: u64) -> JointSample {
    JointSample {
        pairs: sim.pair_samples(v, t, trials, seed),
        seed,
    }
}

/// Empirical peak-age distribution.
#[derive(Debug, Clone)]
pub struct EmpiricalPaoi {
    /// Sorted ages; trials with zero success probability give `+∞`.
    pub ages: Vec<f64>,
    pub seed: u64,
}

impl EmpiricalPaoi {
    pub fn from_pairs(pairs: &[TrialPair], transfer_time: f64, delay: f64, seed: u64) -> Self {
        let mut ages: Vec<f64> = pairs
            .iter()
            .map(|t| {
                let transfer = if t.handover { transfer_time / (1.0 - delay) } else { transfer_time };
                1.0 / t.p0 + 1.0 / t.p1 + transfer
            })
            .collect();
        ages.sort_by(|a, b| a.total_cmp(b));
        EmpiricalPaoi { ages, seed }
    }

    pub fn cdf_at(&self, t: f64) -> f64 {
        self.ages.partition_point(|a| *a <= t) as f64 / self.ages.len() as f64
    }

    /// Empirical `q`-quantile, linearly interpolated between order statistics.
    pub fn percentile(&self, q: f64) -> f64 {
        let n = self.ages.len();
        let pos = q * (n - 1) as f64;
        let k = pos.floor() as usize;
        if k + 1 >= n {
            return self.ages[n - 1];
        }
        let f = pos - k as f64;
        self.ages[k] + f * (self.ages[k + 1] - self.ages[k])
    }
}

/// Peak-age sample with the interval between observations set to `1/λ_a`.
pub fn estimate_paoi(sim: &Simulator, v: f64, trials: usize, seed: u64) -> EmpiricalPaoi {
    let p = sim.params();
    let t = p.transfer_time();
    let pairs = sim.pair_samples(v, t, trials, seed);
    EmpiricalPaoi::from_pairs(&pairs, t, delay_fraction(p, v), seed)
}
