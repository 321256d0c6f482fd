//! Dominant-interferer analysis for ground users.
//!
//! The strongest interferer is kept exact and everything beyond it is
//! replaced by its mean. The conditional success probability then depends on
//! the serving distance `r0` and the dominant-interferer distance `r1` only,
//! and the threshold distance `K(r1, γ)` turns every event `P_s > γ` into a
//! distance event `r0 < K`.

use std::f64::consts::PI;

use crate::correlation::{Branch, JointModel};
use crate::distances::{
    displaced_cdf_clamped, interferer_ccdf, interferer_quantile, law_of_cosines,
    nearest_bs_quantile, serving_cdf, serving_pdf, serving_quantile, truncated_nearest_cdf, ServingLaw,
};
use crate::error::{Error, Result};
use crate::math::{gauss_legendre, integrate_1d, lambert_w0_exp, upper_incomplete_gamma, CompositeRule, QuadratureSpec};
use crate::SystemParams;

/// Mean power of all interferers beyond the dominant one at distance `r1`.
pub fn residual_interference(p: &SystemParams, r1: f64) -> f64 {
    let lambda = p.lambda();
    if r1.is_infinite() || lambda == 0.0 {
        return 0.0;
    }
    let alpha = p.ground_pathloss;
    let z = lambda * PI * r1 * r1;
    let head = 2.0 * PI * lambda * p.tx_power * r1.powf(2.0 - alpha) / (alpha - 2.0);
    let gamma = upper_incomplete_gamma(1.0 - 0.5 * alpha, z).unwrap_or(f64::NAN);
    let tail = p.tx_power * (lambda * PI).powf(0.5 * alpha) * gamma;
    (head - tail).max(0.0)
}

/// Ground analysis for one parameter set and threshold.
#[derive(Debug, Clone)]
pub struct GroundSuccessContext {
    params: SystemParams,
    theta: f64,
    law: ServingLaw,
}

/// Quadrature resolution of the lattice builders.
const Z_PANELS: usize = 96;
const R_PANELS: usize = 96;
const PANEL_ORDER: usize = 4;
const ANGLE_NODES: usize = 32;
const TABLE_CELLS: usize = 512;

impl GroundSuccessContext {
    pub fn new(params: &SystemParams) -> Result<Self> {
        params.validate()?;
        Ok(GroundSuccessContext {
            params: params.clone(),
            theta: params.sinr_threshold,
            law: ServingLaw::default(),
        })
    }

    pub fn with_law(mut self, law: ServingLaw) -> Self {
        self.law = law;
        self
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Mass of the serving-distance density in use.
    fn law_mass(&self) -> f64 {
        match self.law {
            ServingLaw::Printed => 1.0 / self.params.fit_factor,
            ServingLaw::Normalized => 1.0,
        }
    }

    pub fn residual_interference(&self, r1: f64) -> f64 {
        residual_interference(&self.params, r1)
    }

    /// `θ (I' + σ²) / p_t`, the interference-limited exponent scale.
    fn noise_scale(&self, r1: f64) -> f64 {
        self.theta * (self.residual_interference(r1) + self.params.noise) / self.params.tx_power
    }

    pub fn cond_success(&self, r0: f64, r1: f64) -> f64 {
        let alpha = self.params.ground_pathloss;
        let y = r0.powf(alpha);
        let ratio = if r1.is_infinite() { 0.0 } else { (r0 / r1).powf(alpha) };
        (-self.noise_scale(r1) * y).exp() / (1.0 + self.theta * ratio)
    }

    /// Serving distance at which the conditional success probability equals `γ`.
    ///
    /// Writing `y = r0^α`, the condition reads `s y + ln(1 + c y) = -ln γ`
    /// with `c = θ r1^(-α)`. Its closed-form Lambert-W solution seeds a few
    /// Newton steps on the same equation, which keeps full precision when the
    /// W argument overflows or the noise term is negligible.
    pub fn k_threshold(&self, r1: f64, gamma: f64) -> f64 {
        if gamma <= 0.0 {
            return f64::INFINITY;
        }
        if gamma >= 1.0 {
            return 0.0;
        }
        let alpha = self.params.ground_pathloss;
        let target = -gamma.ln();
        let s = self.noise_scale(r1);
        if r1.is_infinite() {
            return if s > 0.0 { (target / s).powf(1.0 / alpha) } else { f64::INFINITY };
        }
        let c = self.theta * r1.powf(-alpha);
        let u = s / c;
        let mut psi = if u > 0.0 {
            let w = lambert_w0_exp(u.ln() + u + target).unwrap_or(target);
            (w / u - 1.0).max(0.0)
        } else {
            target.exp_m1()
        };
        for _ in 0..50 {
            let f = u * psi + psi.ln_1p() - target;
            let df = u + 1.0 / (1.0 + psi);
            let step = f / df;
            psi = (psi - step).max(0.0);
            if step.abs() <= 1e-15 * psi.max(1e-300) {
                break;
            }
        }
        (psi / c).powf(1.0 / alpha)
    }

    /// Dominant-interferer distance above which `P_s(r0, ·) > γ`.
    fn interferer_threshold(&self, r0: f64, gamma: f64) -> f64 {
        if gamma <= 0.0 {
            return 0.0;
        }
        if self.cond_success(r0, f64::INFINITY) <= gamma {
            return f64::INFINITY;
        }
        let mut hi = r0.max(1.0);
        while self.cond_success(r0, hi) <= gamma {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.cond_success(r0, mid) > gamma {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 1e-12 * hi {
                break;
            }
        }
        hi
    }

    /// `P(P_s > γ)` by integrating over the dominant-interferer distance.
    pub fn meta_distribution(&self, gamma: f64) -> Result<f64> {
        if gamma <= 0.0 {
            return Ok(1.0);
        }
        if gamma >= 1.0 {
            return Ok(0.0);
        }
        let p = &self.params;
        let value = integrate_1d(
            |u| serving_cdf(p, self.k_threshold(interferer_quantile(p, u), gamma)),
            0.0,
            1.0,
            &QuadratureSpec::standard(),
        )?;
        Ok(value)
    }

    /// `P(P_s > γ)` by integrating over the serving distance instead.
    ///
    /// This route integrates the serving density, so under
    /// [`ServingLaw::Printed`] it carries that density's mass deficit.
    pub fn meta_distribution_by_serving(&self, gamma: f64) -> Result<f64> {
        if gamma <= 0.0 {
            return Ok(self.law_mass());
        }
        if gamma >= 1.0 {
            return Ok(0.0);
        }
        let p = &self.params;
        integrate_1d(
            |r0| serving_pdf(p, r0, self.law) * interferer_ccdf(p, self.interferer_threshold(r0, gamma)),
            0.0,
            f64::INFINITY,
            &QuadratureSpec::standard(),
        )
    }

    /// `P(R0 < a, R0' < b)` for the serving distance `R0` and its value
    /// `R0'` after a displacement `d` in a uniform direction.
    fn serving_pair_cdf(&self, a: f64, b: f64, d: f64, spec: &QuadratureSpec) -> Result<f64> {
        let p = &self.params;
        let ua = serving_cdf(p, a);
        if ua <= 0.0 {
            return Ok(0.0);
        }
        if d == 0.0 {
            return Ok(ua.min(serving_cdf(p, b)) * self.law_mass());
        }
        let v = integrate_1d(
            |u| displaced_cdf_clamped(serving_quantile(p, u), b, d),
            0.0,
            ua,
            spec,
        )?;
        Ok(v * self.law_mass())
    }

    /// `P(P_s(t0) > γ0, P_s(t1) > γ1)` when the serving BS is kept.
    ///
    /// Serving distance and dominant interferer are both displaced by `d`
    /// in independent uniform directions.
    pub fn joint_no_handover(&self, gamma0: f64, gamma1: f64, d: f64) -> Result<f64> {
        let p = &self.params;
        let spec = QuadratureSpec::nested();
        let inner_spec = QuadratureSpec::nested().with_tol(1e-7, 1e-6);
        let mut failure = None;
        let value = integrate_1d(
            |uz| {
                let z = interferer_quantile(p, uz);
                let a = self.k_threshold(z, gamma0);
                let r = integrate_1d(
                    |k| {
                        let b = self.k_threshold(law_of_cosines(z, d, k), gamma1);
                        match self.serving_pair_cdf(a, b, d, &inner_spec) {
                            Ok(v) => v,
                            Err(e) => {
                                failure.get_or_insert(e);
                                0.0
                            }
                        }
                    },
                    0.0,
                    PI,
                    &spec,
                );
                match r {
                    Ok(v) => v / PI,
                    Err(e) => {
                        failure.get_or_insert(e);
                        0.0
                    }
                }
            },
            0.0,
            1.0,
            &spec,
        )?;
        match failure {
            Some(e) => Err(e),
            None => Ok(value),
        }
    }

    /// Complementary form of [`Self::joint_no_handover`]:
    /// `P(P_s(t0) ≤ γ0, P_s(t1) ≤ γ1)` integrated directly over the failure
    /// region.
    pub fn joint_no_handover_failure(&self, gamma0: f64, gamma1: f64, d: f64) -> Result<f64> {
        let p = &self.params;
        let spec = QuadratureSpec::nested();
        let inner_spec = QuadratureSpec::nested().with_tol(1e-7, 1e-6);
        let mut failure = None;
        let mass = self.law_mass();
        let value = integrate_1d(
            |uz| {
                let z = interferer_quantile(p, uz);
                let ua = serving_cdf(p, self.k_threshold(z, gamma0));
                let r = integrate_1d(
                    |k| {
                        let b = self.k_threshold(law_of_cosines(z, d, k), gamma1);
                        let tail = integrate_1d(
                            |u| 1.0 - displaced_cdf_clamped(serving_quantile(p, u), b, d),
                            ua,
                            1.0,
                            &inner_spec,
                        );
                        match tail {
                            Ok(v) => v * mass,
                            Err(e) => {
                                failure.get_or_insert(e);
                                0.0
                            }
                        }
                    },
                    0.0,
                    PI,
                    &spec,
                );
                match r {
                    Ok(v) => v / PI,
                    Err(e) => {
                        failure.get_or_insert(e);
                        0.0
                    }
                }
            },
            0.0,
            1.0,
            &spec,
        )?;
        match failure {
            Some(e) => Err(e),
            None => Ok(value),
        }
    }

    /// Probability that the interferer-limited condition at `t0` holds for
    /// a serving distance `r0`: `P(K(R1, γ) > r0)`.
    fn survival_given_serving(&self, r0: f64, gamma: f64) -> f64 {
        interferer_ccdf(&self.params, self.interferer_threshold(r0, gamma))
    }

    /// `E[F_trunc(K(R1, γ); r_d)]` over a fresh dominant interferer.
    fn fresh_success_below(&self, r_d: f64, gamma: f64, spec: &QuadratureSpec) -> Result<f64> {
        let p = &self.params;
        integrate_1d(
            |u| truncated_nearest_cdf(p, self.k_threshold(interferer_quantile(p, u), gamma), r_d),
            0.0,
            1.0,
            spec,
        )
    }

    /// `P(P_s(t0) > γ0, P_s(t1) > γ1)` when the serving BS changes.
    ///
    /// After handover the dominant interferer is redrawn and the new serving
    /// distance follows the nearest-BS law truncated below the distance to
    /// the old BS.
    pub fn joint_handover(&self, gamma0: f64, gamma1: f64, d: f64) -> Result<f64> {
        let p = &self.params;
        let spec = QuadratureSpec::nested();
        let inner_spec = QuadratureSpec::nested().with_tol(1e-7, 1e-6);
        let mass = self.law_mass();
        let mut failure = None;
        let value = integrate_1d(
            |u| {
                let r0 = serving_quantile(p, u);
                let first = self.survival_given_serving(r0, gamma0);
                if first == 0.0 {
                    return 0.0;
                }
                let r = integrate_1d(
                    |k| {
                        let r_d = law_of_cosines(r0, d, k);
                        match self.fresh_success_below(r_d, gamma1, &inner_spec) {
                            Ok(v) => v,
                            Err(e) => {
                                failure.get_or_insert(e);
                                0.0
                            }
                        }
                    },
                    0.0,
                    PI,
                    &spec,
                );
                match r {
                    Ok(v) => first * v / PI,
                    Err(e) => {
                        failure.get_or_insert(e);
                        0.0
                    }
                }
            },
            0.0,
            1.0,
            &spec,
        )?;
        match failure {
            Some(e) => Err(e),
            None => Ok(value * mass),
        }
    }

    /// First and second moments of the conditional success probability.
    ///
    /// The serving distance is uniform in the disc bounded by the dominant
    /// interferer, whose distance has density `2(πλ)² r³ exp(-πλr²)`.
    pub fn moments(&self) -> Result<(f64, f64)> {
        let pl = PI * self.params.lambda();
        let mut out = [0.0; 2];
        for (k, slot) in out.iter_mut().enumerate() {
            let power = (k + 1) as i32;
            let mut failure = None;
            // Outer variable x = πλ r1², which is Gamma(2, 1) distributed.
            let v = integrate_1d(
                |x| {
                    let r1 = (x / pl).sqrt();
                    // Inner variable w = (r0 / r1)², uniform on [0, 1].
                    let inner = integrate_1d(
                        |w| self.cond_success(r1 * w.sqrt(), r1).powi(power),
                        0.0,
                        1.0,
                        &QuadratureSpec::standard(),
                    );
                    match inner {
                        Ok(i) => x * (-x).exp() * i,
                        Err(e) => {
                            failure.get_or_insert(e);
                            0.0
                        }
                    }
                },
                0.0,
                f64::INFINITY,
                &QuadratureSpec::standard().with_map(crate::math::SemiInfiniteMap::Exponential),
            )?;
            if let Some(e) = failure {
                return Err(e);
            }
            *slot = v;
        }
        Ok((out[0], out[1]))
    }

    /// Survival lattice `S[i][j] = P(P_s(t0) > i/n, P_s(t1) > j/n)`.
    pub fn survival_lattice(&self, d: f64, branch: Branch, n: usize) -> Result<Vec<f64>> {
        if !(d >= 0.0) {
            return Err(Error::domain("survival_lattice", "displacement must be >= 0"));
        }
        let out = match branch {
            Branch::NoHandover => self.lattice_no_handover(d, n),
            Branch::Handover => self.lattice_handover(d, n),
        }?;
        if out.iter().any(|v| !v.is_finite()) {
            return Err(Error::no_converge("ground survival lattice", "non-finite entry"));
        }
        Ok(out)
    }

    fn interferer_rule(&self) -> CompositeRule {
        CompositeRule::new(0.0, 1.0, Z_PANELS, PANEL_ORDER)
    }

    fn lattice_no_handover(&self, d: f64, n: usize) -> Result<Vec<f64>> {
        let p = &self.params;
        let gammas: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
        let rule = self.interferer_rule();
        let mass = self.law_mass();
        let mut s = vec![0.0; (n + 1) * (n + 1)];

        if d == 0.0 {
            for (uz, w) in rule.nodes.iter().zip(&rule.weights) {
                let z = interferer_quantile(p, *uz);
                let ua: Vec<f64> = gammas.iter().map(|g| serving_cdf(p, self.k_threshold(z, *g))).collect();
                for i in 0..=n {
                    for j in 0..=n {
                        s[i * (n + 1) + j] += w * ua[i].min(ua[j]) * mass;
                    }
                }
            }
            return Ok(s);
        }

        let table = ServingPairTable::new(p, d, TABLE_CELLS);
        let (kx, kw) = gauss_legendre(ANGLE_NODES);
        let angles: Vec<(f64, f64)> = kx
            .iter()
            .zip(&kw)
            .map(|(x, w)| (0.5 * PI * (x + 1.0), 0.5 * w))
            .collect();
        let mut ub = vec![0.0; ANGLE_NODES * (n + 1)];
        for (uz, wz) in rule.nodes.iter().zip(&rule.weights) {
            let z = interferer_quantile(p, *uz);
            let ua: Vec<f64> = gammas.iter().map(|g| serving_cdf(p, self.k_threshold(z, *g))).collect();
            for (a, (k, _)) in angles.iter().enumerate() {
                let moved = law_of_cosines(z, d, *k);
                for (j, g) in gammas.iter().enumerate() {
                    ub[a * (n + 1) + j] = serving_cdf(p, self.k_threshold(moved, *g));
                }
            }
            for i in 0..=n {
                if ua[i] == 0.0 {
                    continue;
                }
                let row = &mut s[i * (n + 1)..(i + 1) * (n + 1)];
                for (a, (_, wk)) in angles.iter().enumerate() {
                    let wgt = wz * wk * mass;
                    for j in 0..=n {
                        row[j] += wgt * table.eval(ua[i], ub[a * (n + 1) + j]);
                    }
                }
            }
        }
        Ok(s)
    }

    fn lattice_handover(&self, d: f64, n: usize) -> Result<Vec<f64>> {
        let p = &self.params;
        let gammas: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
        let zrule = self.interferer_rule();
        let mass = self.law_mass();

        // Fresh-interferer success below a truncation radius, tabulated in
        // the nearest-BS CDF coordinate of that radius.
        let cells = TABLE_CELLS;
        let kz: Vec<Vec<f64>> = zrule
            .nodes
            .iter()
            .map(|uz| {
                let z = interferer_quantile(p, *uz);
                gammas.iter().map(|g| self.k_threshold(z, *g)).collect()
            })
            .collect();
        let mut fresh = vec![0.0; (cells + 1) * (n + 1)];
        for c in 0..=cells {
            let w = c as f64 / cells as f64;
            let row = &mut fresh[c * (n + 1)..(c + 1) * (n + 1)];
            if c == 0 {
                row.iter_mut().for_each(|v| *v = 1.0);
                continue;
            }
            let r_d = nearest_bs_quantile(p, w);
            for (k, wz) in kz.iter().zip(&zrule.weights) {
                for j in 0..=n {
                    row[j] += wz * truncated_nearest_cdf(p, k[j], r_d);
                }
            }
        }
        let lambda_pi = p.lambda() * PI;
        let fresh_at = |r_d: f64, j: usize| {
            let w = -(-lambda_pi * r_d * r_d).exp_m1();
            let pos = w * cells as f64;
            let c = (pos.floor() as usize).min(cells - 1);
            let t = pos - c as f64;
            let a = fresh[c * (n + 1) + j];
            let b = fresh[(c + 1) * (n + 1) + j];
            a + t * (b - a)
        };

        let rrule = CompositeRule::new(0.0, 1.0, R_PANELS, PANEL_ORDER);
        let (kx, kw) = gauss_legendre(ANGLE_NODES);
        let mut s = vec![0.0; (n + 1) * (n + 1)];
        let mut after = vec![0.0; n + 1];
        for (u, wu) in rrule.nodes.iter().zip(&rrule.weights) {
            let r0 = serving_quantile(p, *u);
            let before: Vec<f64> = gammas.iter().map(|g| self.survival_given_serving(r0, *g)).collect();
            after.iter_mut().for_each(|v| *v = 0.0);
            for (x, w) in kx.iter().zip(&kw) {
                let r_d = law_of_cosines(r0, d, 0.5 * PI * (x + 1.0));
                for (j, v) in after.iter_mut().enumerate() {
                    *v += 0.5 * w * fresh_at(r_d, j);
                }
            }
            for i in 0..=n {
                if before[i] == 0.0 {
                    continue;
                }
                let wgt = wu * before[i] * mass;
                let row = &mut s[i * (n + 1)..(i + 1) * (n + 1)];
                for j in 0..=n {
                    row[j] += wgt * after[j];
                }
            }
        }
        Ok(s)
    }
}

/// `Φ(a, b) = P(R0 < a, R0' < b)` tabulated on the serving-CDF coordinates
/// of `a` and `b`, where `R0'` is `R0` displaced by `d` in a uniform
/// direction. Evaluated by bilinear interpolation.
struct ServingPairTable {
    cells: usize,
    values: Vec<f64>,
}

impl ServingPairTable {
    fn new(p: &SystemParams, d: f64, cells: usize) -> Self {
        let (gx, gw) = gauss_legendre(6);
        let mut values = vec![0.0; (cells + 1) * (cells + 1)];
        let inv = |u: f64| serving_quantile(p, u);
        for jb in 0..=cells {
            let wb = jb as f64 / cells as f64;
            let b = if jb == cells { f64::INFINITY } else { inv(wb) };
            // Kinks of the displaced CDF in r0, mapped to the u coordinate.
            let kinks: Vec<f64> = [(b - d).abs(), b + d]
                .iter()
                .filter(|r| r.is_finite())
                .map(|r| serving_cdf(p, *r))
                .collect();
            let mut acc = 0.0;
            values[jb] = 0.0;
            for ia in 0..cells {
                let (lo, hi) = (ia as f64 / cells as f64, (ia + 1) as f64 / cells as f64);
                let mut cuts = vec![lo];
                cuts.extend(kinks.iter().copied().filter(|k| *k > lo && *k < hi));
                cuts.push(hi);
                for seg in cuts.windows(2) {
                    let (s0, s1) = (seg[0], seg[1]);
                    let half = 0.5 * (s1 - s0);
                    let mid = 0.5 * (s0 + s1);
                    for (x, w) in gx.iter().zip(&gw) {
                        let u = mid + half * x;
                        acc += half * w * displaced_cdf_clamped(inv(u), b, d);
                    }
                }
                values[(ia + 1) * (cells + 1) + jb] = acc;
            }
        }
        ServingPairTable { cells, values }
    }

    fn eval(&self, ua: f64, ub: f64) -> f64 {
        let n = self.cells;
        let pa = (ua * n as f64).clamp(0.0, n as f64);
        let pb = (ub * n as f64).clamp(0.0, n as f64);
        let ia = (pa.floor() as usize).min(n - 1);
        let ib = (pb.floor() as usize).min(n - 1);
        let (ta, tb) = (pa - ia as f64, pb - ib as f64);
        let at = |i: usize, j: usize| self.values[i * (n + 1) + j];
        let lo = at(ia, ib) + tb * (at(ia, ib + 1) - at(ia, ib));
        let hi = at(ia + 1, ib) + tb * (at(ia + 1, ib + 1) - at(ia + 1, ib));
        lo + ta * (hi - lo)
    }
}

impl JointModel for GroundSuccessContext {
    fn params(&self) -> &SystemParams {
        &self.params
    }

    fn survival_lattice(&self, d: f64, branch: Branch, n: usize) -> Result<Vec<f64>> {
        GroundSuccessContext::survival_lattice(self, d, branch, n)
    }

    fn moments(&self) -> Result<(f64, f64)> {
        GroundSuccessContext::moments(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> GroundSuccessContext {
        GroundSuccessContext::new(&SystemParams::default()).unwrap()
    }

    #[test]
    fn residual_matches_definition() {
        let p = SystemParams::default();
        let spec = QuadratureSpec::standard().with_tol(1e-30, 1e-12);
        for r1 in [50.0, 500.0, 3000.0] {
            let direct = integrate_1d(
                |z| 2.0 * PI * p.tx_power * p.lambda() * crate::distances::interferer_thinning(&p, z) * z.powf(1.0 - p.ground_pathloss),
                r1,
                f64::INFINITY,
                &spec,
            )
            .unwrap();
            let closed = residual_interference(&p, r1);
            assert!((closed / direct - 1.0).abs() < 1e-9, "{r1}: {closed} vs {direct}");
        }
        assert_eq!(residual_interference(&p, f64::INFINITY), 0.0);
    }

    #[test]
    fn success_examples() {
        let mut p = SystemParams::default();
        p.noise = 0.0;
        p.bs_density_km2 = 1e-12;
        let c = GroundSuccessContext::new(&p).unwrap();
        assert!((c.cond_success(300.0, 300.0) - 0.5).abs() < 1e-6);
        let tiny = GroundSuccessContext::new(&SystemParams::default().with_threshold(1e-12)).unwrap();
        assert!((tiny.cond_success(300.0, 400.0) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn threshold_inverts_success() {
        let c = ctx();
        for r1 in [100.0, 500.0, 2000.0, 20_000.0] {
            let mut last = f64::INFINITY;
            for g in 1..10 {
                let gamma = g as f64 / 10.0;
                let k = c.k_threshold(r1, gamma);
                assert!((c.cond_success(k, r1) - gamma).abs() < 1e-12, "r1 {r1} γ {gamma}");
                assert!(k < last);
                last = k;
            }
        }
        assert_eq!(c.k_threshold(500.0, 1.0), 0.0);
        assert!(c.k_threshold(500.0, 1.0 - 1e-12) < 1.0);
    }

    #[test]
    fn meta_routes_agree() {
        let c = ctx();
        for gamma in [0.1, 0.5, 0.9] {
            let a = c.meta_distribution(gamma).unwrap();
            let b = c.meta_distribution_by_serving(gamma).unwrap();
            assert!((a - b).abs() < 1e-6, "γ {gamma}: {a} vs {b}");
        }
    }

    #[test]
    fn lattice_matches_point_evaluators() {
        let c = ctx();
        let n = 10;
        let d = 200.0;
        let nh = c.survival_lattice(d, Branch::NoHandover, n).unwrap();
        let ho = c.survival_lattice(d, Branch::Handover, n).unwrap();
        for (i, j) in [(3, 3), (5, 2), (8, 6)] {
            let (g0, g1) = (i as f64 / n as f64, j as f64 / n as f64);
            let a = c.joint_no_handover(g0, g1, d).unwrap();
            let b = c.joint_handover(g0, g1, d).unwrap();
            assert!((nh[i * (n + 1) + j] - a).abs() < 2e-4, "nh {i},{j}: {} vs {a}", nh[i * (n + 1) + j]);
            assert!((ho[i * (n + 1) + j] - b).abs() < 2e-4, "ho {i},{j}: {} vs {b}", ho[i * (n + 1) + j]);
        }
    }

    #[test]
    fn complement_form_agrees() {
        let c = ctx();
        let (g0, g1, d) = (0.4, 0.6, 150.0);
        let s = c.joint_no_handover(g0, g1, d).unwrap();
        let f = c.joint_no_handover_failure(g0, g1, d).unwrap();
        let m0 = c.meta_distribution(g0).unwrap();
        // Marginal at t1: the displaced geometry has the same law only
        // approximately, so obtain it from the joint at γ0 = 0.
        let m1 = c.joint_no_handover(0.0, g1, d).unwrap();
        assert!((s - (f - 1.0 + m0 + m1)).abs() < 1e-4, "{s} vs {}", f - 1.0 + m0 + m1);
    }

    #[test]
    fn moments_ordered() {
        let (m1, m2) = ctx().moments().unwrap();
        assert!(m2 <= m1 && m1 < 1.0 && m2 > 0.0);
        let tiny = GroundSuccessContext::new(&SystemParams::default().with_threshold(1e-12)).unwrap();
        let (a, b) = tiny.moments().unwrap();
        assert!((a - 1.0).abs() < 1e-6 && (b - 1.0).abs() < 1e-6);
    }
}
