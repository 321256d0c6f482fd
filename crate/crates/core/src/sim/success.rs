//! Fading-averaged success probability for a fixed geometry.

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma};

use crate::math::binomial;

/// Mean received powers at the serving BS with their Nakagami shapes.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkBudget {
    pub signal: f64,
    pub signal_shape: u32,
    /// `(mean power, shape)` of every interferer.
    pub interferers: Vec<(f64, u32)>,
    /// Noise plus any deterministic interference.
    pub noise: f64,
}

impl LinkBudget {
    /// `P(SINR > θ)` over Gamma fading of every link.
    ///
    /// With signal shape `m` and `s = mθ/S`, the probability is
    /// `Σ_{n<m} (-s)^n/n! · L^(n)(s)`, where `L` is the Laplace transform of
    /// interference plus noise. Derivatives follow from `L' = L·ψ`.
    pub fn success_probability(&self, theta: f64) -> f64 {
        if self.signal <= 0.0 {
            return 0.0;
        }
        let m = self.signal_shape.max(1) as usize;
        let s = m as f64 * theta / self.signal;
        let mut ln_l = -s * self.noise;
        for (power, shape) in &self.interferers {
            let mk = *shape as f64;
            ln_l -= mk * (s * power / mk).ln_1p();
        }
        let l = ln_l.exp();
        if m == 1 || l == 0.0 {
            return l;
        }
        // psi[q] is the q-th derivative of ln L.
        let mut psi = vec![0.0; m - 1];
        let mut factorial = 1.0;
        for (q, slot) in psi.iter_mut().enumerate() {
            if q > 0 {
                factorial *= q as f64;
            }
            let sign = if q % 2 == 0 { 1.0 } else { -1.0 };
            let mut acc = if q == 0 { -self.noise } else { 0.0 };
            for (power, shape) in &self.interferers {
                let mk = *shape as f64;
                let a = power / mk;
                acc -= mk * a * sign * factorial * a.powi(q as i32) / (1.0 + s * a).powi(q as i32 + 1);
            }
            *slot = acc;
        }
        let mut ell = vec![1.0; m];
        for n in 1..m {
            ell[n] = (0..n).map(|j| binomial((n - 1) as u32, j as u32) * ell[j] * psi[n - 1 - j]).sum();
        }
        let mut total = 0.0;
        let mut coef = 1.0;
        for (n, e) in ell.iter().enumerate() {
            if n > 0 {
                coef *= -s / n as f64;
            }
            total += coef * e;
        }
        (l * total).clamp(0.0, 1.0)
    }

    /// Fraction of `draws` independent fading states with SINR above `θ`.
    pub fn success_by_draws<R: Rng + ?Sized>(&self, theta: f64, draws: usize, rng: &mut R) -> f64 {
        let gammas: Vec<Option<Gamma<f64>>> = std::iter::once(self.signal_shape)
            .chain(self.interferers.iter().map(|(_, m)| *m))
            .map(|m| (m > 1).then(|| Gamma::new(m as f64, 1.0 / m as f64).expect("positive shape")))
            .collect();
        let sample = |k: usize, rng: &mut R| match &gammas[k] {
            Some(g) => g.sample(rng),
            None => Exp1.sample(rng),
        };
        let mut hits = 0usize;
        for _ in 0..draws {
            let signal = self.signal * sample(0, rng);
            let mut interference = self.noise;
            for (k, (power, _)) in self.interferers.iter().enumerate() {
                interference += power * sample(k + 1, rng);
            }
            if signal > theta * interference {
                hits += 1;
            }
        }
        hits as f64 / draws as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn trivial_cases() {
        let lone = LinkBudget { signal: 1.0, signal_shape: 1, interferers: vec![], noise: 0.0 };
        assert_eq!(lone.success_probability(1.0), 1.0);
        let even = LinkBudget { signal: 1.0, signal_shape: 1, interferers: vec![(1.0, 1)], noise: 0.0 };
        assert!((even.success_probability(1.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn nakagami_signal_matches_draws() {
        let budget = LinkBudget {
            signal: 2.0,
            signal_shape: 3,
            interferers: vec![(0.4, 3), (0.3, 1), (0.15, 1)],
            noise: 0.1,
        };
        let exact = budget.success_probability(1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mc = budget.success_by_draws(1.0, 1_000_000, &mut rng);
        assert!((exact - mc).abs() < 0.003, "{exact} vs {mc}");
    }

    #[test]
    fn shape_two_closed_form() {
        // One Rayleigh interferer of power a, no noise, signal shape 2:
        // P = (1 + sa)^-1 + s·a·(1 + sa)^-2 with s = 2θ/S.
        let budget = LinkBudget { signal: 1.0, signal_shape: 2, interferers: vec![(0.5, 1)], noise: 0.0 };
        let s: f64 = 2.0;
        let a = 0.5;
        let expect = 1.0 / (1.0 + s * a) + s * a / (1.0 + s * a).powi(2);
        assert!((budget.success_probability(1.0) - expect).abs() < 1e-14);
    }
}
