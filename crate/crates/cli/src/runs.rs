//! Scenario runs that pair an analytical curve with its simulated reference.

use velopaoi_core::correlation::MobilityGrids;
use velopaoi_core::distances::handover_probability_at;
use velopaoi_core::paoi::{delay_fraction, paoi_cdf};
use velopaoi_core::sim::{estimate_handover_probability, EmpiricalPaoi, JointSample};
use velopaoi_core::{AerialSuccessContext, GroundSuccessContext, JointModel, Simulator, UserKind};

use crate::config::{CorrelationForm, Scenario};
use crate::error::Context;
use crate::output::{CurvePair, CurveSeries};
use crate::CliError;

const Z95: f64 = 1.959963984540054;

/// Analytical model for either user kind.
pub enum Analysis {
    Ground(GroundSuccessContext),
    Aerial(Box<AerialSuccessContext>),
}

impl Analysis {
    pub fn new(s: &Scenario) -> Result<Self, CliError> {
        Ok(match s.kind {
            UserKind::Ground => {
                Analysis::Ground(GroundSuccessContext::new(&s.params).context("ground analysis")?.with_law(s.serving_law))
            }
            UserKind::Aerial => Analysis::Aerial(Box::new(
                AerialSuccessContext::new(&s.params).context("aerial analysis")?.with_law(s.serving_law),
            )),
        })
    }

    pub fn model(&self) -> &dyn JointModel {
        match self {
            Analysis::Ground(c) => c,
            Analysis::Aerial(c) => c.as_ref(),
        }
    }

    pub fn meta(&self, gamma: f64) -> Result<f64, CliError> {
        match self {
            Analysis::Ground(c) => c.meta_distribution(gamma),
            Analysis::Aerial(c) => c.meta_distribution(gamma),
        }
        .context("meta distribution")
    }

    /// `P(P_s(t0) > γ0, P_s(t1) > γ1)` after moving a distance `d`, mixing
    /// both mobility branches.
    pub fn joint(&self, gamma0: f64, gamma1: f64, d: f64) -> Result<f64, CliError> {
        let ph = handover_probability_at(self.model().params(), d).context("handover probability")?;
        let (nh, ho) = match self {
            Analysis::Ground(c) => (c.joint_no_handover(gamma0, gamma1, d), c.joint_handover(gamma0, gamma1, d)),
            Analysis::Aerial(c) => (c.joint_no_handover(gamma0, gamma1, d), c.joint_handover(gamma0, gamma1, d)),
        };
        Ok((1.0 - ph) * nh.context("joint law without handover")? + ph * ho.context("joint law with handover")?)
    }

    pub fn grids(&self, v: f64, t: f64) -> Result<MobilityGrids, CliError> {
        MobilityGrids::build(self.model(), v, t).context("joint lattice")
    }

    pub fn correlation(&self, grids: &MobilityGrids, form: CorrelationForm) -> Result<f64, CliError> {
        match form {
            CorrelationForm::Lattice => grids.correlation(),
            CorrelationForm::ModelMoments => {
                let (m1, m2) = self.model().moments().context("success moments")?;
                grids.correlation_with_moments(m1, m2)
            }
        }
        .context("correlation coefficient")
    }
}

pub fn simulator(s: &Scenario) -> Result<Simulator, CliError> {
    Simulator::new(&s.params, s.kind, s.sim.clone()).context("simulator")
}

/// Half-width of the 95% Fisher-z interval of a sample correlation.
pub fn correlation_ci(rho: f64, n: usize) -> f64 {
    if n <= 3 || !rho.is_finite() || rho.abs() >= 1.0 {
        return 0.0;
    }
    let z = rho.atanh();
    let h = Z95 / ((n - 3) as f64).sqrt();
    0.5 * ((z + h).tanh() - (z - h).tanh())
}

/// Half-width of the distribution-free 95% interval of a sample quantile.
pub fn percentile_ci(ages: &[f64], q: f64) -> f64 {
    let n = ages.len() as f64;
    if ages.is_empty() {
        return f64::NAN;
    }
    let spread = Z95 * (n * q * (1.0 - q)).sqrt();
    let at = |k: f64| ages[(k.max(0.0) as usize).min(ages.len() - 1)];
    0.5 * (at((n * q + spread).ceil()) - at((n * q - spread).floor()))
}

/// γ grid of the meta-distribution curves: 0.01, 0.02, ..., 0.99.
pub fn meta_gammas() -> Vec<f64> {
    (1..=99).map(|k| k as f64 / 100.0).collect()
}

/// Meta distribution. Agreement is the largest absolute gap over
/// γ ∈ [0.05, 0.95].
pub fn run_meta(s: &Scenario) -> Result<CurvePair, CliError> {
    let analysis_model = Analysis::new(s)?;
    let sim = simulator(s)?;
    let gammas = meta_gammas();
    let samples = sim.success_samples(s.trials, s.seed);
    let simulated = velopaoi_core::sim::meta_from_samples(&samples, &gammas, s.seed);
    let mut analysis = CurveSeries::new("gamma", "1", "P(P_s > gamma)", s);
    let mut simulation = analysis.clone();
    let mut deviation: f64 = 0.0;
    for (g, est) in gammas.iter().zip(&simulated) {
        let a = analysis_model.meta(*g)?;
        analysis.push(*g, a, None);
        simulation.push(*g, est.estimate, Some(est.half_width));
        if (0.05 - 1e-12..=0.95 + 1e-12).contains(g) {
            deviation = deviation.max((a - est.estimate).abs());
        }
    }
    Ok(CurvePair { analysis, simulation, deviation, tolerance: s.tolerance })
}

/// Correlation coefficient against velocity.
pub fn run_correlation(s: &Scenario) -> Result<CurvePair, CliError> {
    let model = Analysis::new(s)?;
    let sim = simulator(s)?;
    let mut analysis = CurveSeries::new("v", "m/unit time", "rho", s);
    let mut simulation = analysis.clone();
    let mut deviation: f64 = 0.0;
    for &v in &sorted(&s.velocities) {
        let grids = model.grids(v, s.interval)?;
        let a = model.correlation(&grids, s.correlation_form)?;
        let sample = JointSample { pairs: sim.pair_samples(v, s.interval, s.trials, s.seed), seed: s.seed };
        let r = sample.correlation();
        analysis.push(v, a, None);
        simulation.push(v, r, Some(correlation_ci(r, s.trials)));
        deviation = deviation.max((a - r).abs());
    }
    Ok(CurvePair { analysis, simulation, deviation, tolerance: s.tolerance })
}

/// Joint success probability `P(P_s(t0) > γ0, P_s(t1) > γ1)` against velocity.
pub fn run_joint(s: &Scenario, gamma0: f64, gamma1: f64) -> Result<CurvePair, CliError> {
    let model = Analysis::new(s)?;
    let sim = simulator(s)?;
    let label = format!("P(P_s(t0) > {gamma0}, P_s(t1) > {gamma1})");
    let mut analysis = CurveSeries::new("v", "m/unit time", &label, s);
    analysis.metadata.insert("gamma0".into(), gamma0.to_string());
    analysis.metadata.insert("gamma1".into(), gamma1.to_string());
    let mut simulation = analysis.clone();
    let mut deviation: f64 = 0.0;
    for &v in &sorted(&s.velocities) {
        let a = model.joint(gamma0, gamma1, v * s.interval)?;
        let sample = JointSample { pairs: sim.pair_samples(v, s.interval, s.trials, s.seed), seed: s.seed };
        let est = sample.joint_ccdf(gamma0, gamma1, None);
        analysis.push(v, a, None);
        simulation.push(v, est.estimate, Some(est.half_width));
        deviation = deviation.max((a - est.estimate).abs());
    }
    Ok(CurvePair { analysis, simulation, deviation, tolerance: s.tolerance })
}

/// `q`-percentile of the peak age against velocity. Observations are
/// `1/λ_a` apart. Agreement is the largest relative gap.
pub fn run_paoi(s: &Scenario, q: f64) -> Result<CurvePair, CliError> {
    if !(q > 0.0 && q < 1.0) {
        return Err(CliError::Config(format!("percentile {q} outside (0, 1)")));
    }
    let model = Analysis::new(s)?;
    let sim = simulator(s)?;
    let p = &s.params;
    let t = p.transfer_time();
    let mut analysis = CurveSeries::new("v", "m/unit time", &format!("PAoI {q}-percentile"), s);
    analysis.metadata.insert("percentile".into(), q.to_string());
    let mut simulation = analysis.clone();
    let mut deviation: f64 = 0.0;
    for &v in &sorted(&s.velocities) {
        let delay = delay_fraction(p, v);
        let grids = model.grids(v, t)?;
        let a = paoi_cdf(&grids, t, delay, None, &[])
            .and_then(|r| r.percentile(q))
            .context("peak-age distribution")?;
        let empirical = EmpiricalPaoi::from_pairs(&sim.pair_samples(v, t, s.trials, s.seed), t, delay, s.seed);
        let e = empirical.percentile(q);
        analysis.push(v, a, None);
        simulation.push(v, e, Some(percentile_ci(&empirical.ages, q)));
        deviation = deviation.max(((a - e) / e).abs());
    }
    Ok(CurvePair { analysis, simulation, deviation, tolerance: s.tolerance })
}

/// Handover probability after moving for one interval, against velocity.
pub fn run_handover_check(s: &Scenario) -> Result<CurvePair, CliError> {
    let mut analysis = CurveSeries::new("v", "m/unit time", "P(handover)", s);
    let mut simulation = analysis.clone();
    let mut deviation: f64 = 0.0;
    for &v in &sorted(&s.velocities) {
        let d = v * s.interval;
        let a = handover_probability_at(&s.params, d).context("handover probability")?;
        let est = estimate_handover_probability(&s.params, d, s.trials, s.seed);
        analysis.push(v, a, None);
        simulation.push(v, est.estimate, Some(est.half_width));
        deviation = deviation.max((a - est.estimate).abs());
    }
    Ok(CurvePair { analysis, simulation, deviation, tolerance: s.tolerance })
}

fn sorted(v: &[f64]) -> Vec<f64> {
    let mut v = v.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fisher_interval_shrinks_with_trials() {
        assert!(correlation_ci(0.5, 10_000) < correlation_ci(0.5, 100));
        assert_eq!(correlation_ci(1.0, 100), 0.0);
    }

    #[test]
    fn quantile_interval_brackets_uniform_sample() {
        let ages: Vec<f64> = (0..1000).map(|k| k as f64).collect();
        let h = percentile_ci(&ages, 0.5);
        assert!(h > 20.0 && h < 40.0, "{h}");
    }
}
