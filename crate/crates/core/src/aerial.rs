//! Dominant-interferer analysis for aerial users with LoS/NLoS links.
//!
//! The serving link and the dominant interferer can each be LoS or NLoS,
//! which gives four link pairs. For each pair the kernel `κ` is the
//! fading-averaged success probability given the serving distance and the
//! dominant-interferer distance, with the remaining interferers replaced by
//! their mean power.

use std::f64::consts::PI;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::OnceLock;

use crate::channel::{alzer_beta, link_gain, link_probability, LinkKind, SystemParams};
use crate::correlation::{Branch, JointModel};
use crate::distances::{
    exclusion_for, interferer_thinning, law_of_cosines, serving_cdf, serving_quantile, NearestLinkLaws, RadialGrid,
    RadialTable, ServingLaw,
};
use crate::error::{Error, Result};
use crate::math::{binomial, gauss_legendre, CompositeRule};

/// Serving-link and dominant-interferer link states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LinkPair {
    pub serving: LinkKind,
    pub dominant: LinkKind,
}

impl LinkPair {
    pub const ALL: [LinkPair; 4] = [
        LinkPair { serving: LinkKind::Los, dominant: LinkKind::Los },
        LinkPair { serving: LinkKind::Los, dominant: LinkKind::Nlos },
        LinkPair { serving: LinkKind::Nlos, dominant: LinkKind::Los },
        LinkPair { serving: LinkKind::Nlos, dominant: LinkKind::Nlos },
    ];
}

const AERIAL: [LinkKind; 2] = [LinkKind::Los, LinkKind::Nlos];

fn slot(kind: LinkKind) -> usize {
    match kind {
        LinkKind::Los => 0,
        _ => 1,
    }
}

fn opposite(kind: LinkKind) -> LinkKind {
    match kind {
        LinkKind::Los => LinkKind::Nlos,
        _ => LinkKind::Los,
    }
}

/// Log-log linear interpolation of a positive curve on a [`RadialGrid`].
#[derive(Debug, Clone)]
struct LogCurve {
    log_min: f64,
    per_decade: f64,
    ln_values: Vec<f64>,
}

impl LogCurve {
    fn new(grid: &RadialGrid, values: impl Fn(f64) -> f64) -> Self {
        let radii = grid.radii();
        let per_decade = (radii.len() - 1) as f64 / (grid.r_max() / grid.r_min()).log10();
        LogCurve {
            log_min: grid.r_min().log10(),
            per_decade,
            ln_values: radii.iter().map(|r| values(*r).max(1e-300).ln()).collect(),
        }
    }

    fn at(&self, r: f64) -> f64 {
        let pos = ((r.max(1e-300).log10() - self.log_min) * self.per_decade).max(0.0);
        let last = self.ln_values.len() - 2;
        let k = (pos.floor() as usize).min(last);
        let t = (pos - k as f64).min(1.0);
        let (a, b) = (self.ln_values[k], self.ln_values[k + 1]);
        (a + t * (b - a)).exp()
    }
}

/// Resolution of the serving-distance tables.
const SERVING_CELLS: usize = 1024;
const ANGLE_NODES: usize = 32;
const TRUNCATION_PANELS: usize = 8;
const BISECTION_STEPS: usize = 48;

/// Aerial analysis for one parameter set and threshold.
#[derive(Debug)]
pub struct AerialSuccessContext {
    params: SystemParams,
    theta: f64,
    law: ServingLaw,
    laws: NearestLinkLaws,
    /// `∫_x^∞ λ_i(r) P(r) (r² + h²)^(-α/2) r dr` per link kind.
    interference_tail: [RadialTable; 2],
    /// Residual interference `s_j(z)` per dominant kind.
    residual: [LogCurve; 2],
    /// `∫_z^∞ f_j(x) P(no stronger opposite-kind interferer) dx` per kind.
    dominant_tail: [RadialTable; 2],
    /// `∫_0^u P_i(r(u')) du'` on a uniform grid of the serving CDF.
    serving_share: [Vec<f64>; 2],
    success_table: OnceLock<SuccessTable>,
    overshoot: AtomicU64,
}

/// `Q(r, γ) = P(P_s > γ | serving distance r)` on the uniform serving-CDF grid.
#[derive(Debug, Clone)]
struct SuccessTable {
    cells: usize,
    gammas: usize,
    values: Vec<f64>,
}

impl SuccessTable {
    fn row(&self, k: usize) -> &[f64] {
        &self.values[k * (self.gammas + 1)..(k + 1) * (self.gammas + 1)]
    }

    /// Linear interpolation in the serving-CDF coordinate `u`.
    fn at(&self, u: f64, j: usize) -> f64 {
        let pos = (u * self.cells as f64).clamp(0.0, self.cells as f64);
        let k = (pos.floor() as usize).min(self.cells - 1);
        let t = pos - k as f64;
        let a = self.values[k * (self.gammas + 1) + j];
        let b = self.values[(k + 1) * (self.gammas + 1) + j];
        a + t * (b - a)
    }
}

impl AerialSuccessContext {
    pub fn new(params: &SystemParams) -> Result<Self> {
        params.validate()?;
        let p = params;
        let laws = NearestLinkLaws::new(p);
        let grid = laws.grid().clone();
        let lambda = p.lambda();

        let interference_tail = AERIAL.map(|kind| {
            let alpha = p.pathloss(kind);
            let far = link_probability(p, kind, f64::INFINITY);
            let beyond = lambda * far * grid.r_max().powf(2.0 - alpha) / (alpha - 2.0);
            grid.tail_table(
                |r| {
                    lambda
                        * interferer_thinning(p, r)
                        * link_probability(p, kind, r)
                        * (r * r + p.altitude * p.altitude).powf(-0.5 * alpha)
                        * r
                },
                beyond,
            )
        });

        let tail_at = |kind: LinkKind, x: f64| -> f64 {
            let t = &interference_tail[slot(kind)];
            if x <= grid.r_min() {
                t.first()
            } else if x >= grid.r_max() {
                let alpha = p.pathloss(kind);
                lambda * link_probability(p, kind, f64::INFINITY) * x.powf(2.0 - alpha) / (alpha - 2.0)
            } else {
                t.at(&grid, x)
            }
        };
        let residual = AERIAL.map(|dominant| {
            LogCurve::new(&grid, |z| {
                let d3 = (z * z + p.altitude * p.altitude).sqrt();
                let other = opposite(dominant);
                let excl = exclusion_for(p, dominant, d3);
                2.0 * PI
                    * p.tx_power
                    * (p.excess(dominant) * tail_at(dominant, z) + p.excess(other) * tail_at(other, excl))
            })
        });

        let dominant_tail = AERIAL.map(|kind| {
            let other = opposite(kind);
            grid.tail_table(
                |x| {
                    let d3 = (x * x + p.altitude * p.altitude).sqrt();
                    laws.pdf(kind, x) * laws.ccdf(other, exclusion_for(p, kind, d3))
                },
                0.0,
            )
        });

        let (gx, gw) = gauss_legendre(4);
        let serving_share = AERIAL.map(|kind| {
            let mut acc = 0.0;
            let mut out = Vec::with_capacity(SERVING_CELLS + 1);
            out.push(0.0);
            for c in 0..SERVING_CELLS {
                let (lo, hi) = (c as f64 / SERVING_CELLS as f64, (c + 1) as f64 / SERVING_CELLS as f64);
                let half = 0.5 * (hi - lo);
                for (x, w) in gx.iter().zip(&gw) {
                    let u = 0.5 * (lo + hi) + half * x;
                    acc += half * w * link_probability(p, kind, serving_quantile(p, u));
                }
                out.push(acc);
            }
            out
        });

        Ok(AerialSuccessContext {
            params: p.clone(),
            theta: p.sinr_threshold,
            law: ServingLaw::default(),
            laws,
            interference_tail,
            residual,
            dominant_tail,
            serving_share,
            success_table: OnceLock::new(),
            overshoot: AtomicU64::new(0),
        })
    }

    pub fn with_law(mut self, law: ServingLaw) -> Self {
        self.law = law;
        self
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    pub fn laws(&self) -> &NearestLinkLaws {
        &self.laws
    }

    fn law_mass(&self) -> f64 {
        match self.law {
            ServingLaw::Printed => 1.0 / self.params.fit_factor,
            ServingLaw::Normalized => 1.0,
        }
    }

    /// Number of kernel evaluations that exceeded one before clamping.
    pub fn overshoot_count(&self) -> u64 {
        self.overshoot.load(Ordering::Relaxed)
    }

    /// Mean interference from interferers of one kind beyond horizontal
    /// distance `x`, per unit transmit power and excess loss.
    pub fn interference_tail(&self, kind: LinkKind, x: f64) -> f64 {
        let grid = self.laws.grid();
        let p = &self.params;
        if x <= grid.r_min() {
            return self.interference_tail[slot(kind)].first();
        }
        if x >= grid.r_max() {
            let alpha = p.pathloss(kind);
            return p.lambda() * link_probability(p, kind, f64::INFINITY) * x.powf(2.0 - alpha) / (alpha - 2.0);
        }
        self.interference_tail[slot(kind)].at(grid, x)
    }

    /// Mean power of all interferers other than a dominant one of kind
    /// `dominant` at horizontal distance `z`.
    pub fn residual_interference(&self, dominant: LinkKind, z: f64) -> f64 {
        self.residual[slot(dominant)].at(z)
    }

    /// Probability that the dominant interferer has kind `j` and lies
    /// beyond horizontal distance `z`.
    pub fn dominant_tail(&self, kind: LinkKind, z: f64) -> f64 {
        let grid = self.laws.grid();
        let t = &self.dominant_tail[slot(kind)];
        if z <= grid.r_min() {
            return t.first();
        }
        if z >= grid.r_max() {
            return 0.0;
        }
        t.at(grid, z)
    }

    /// Success kernel for a link pair at serving distance `r0` and
    /// dominant-interferer distance `rj` (both horizontal).
    pub fn kappa(&self, pair: LinkPair, r0: f64, rj: f64) -> f64 {
        let raw = self.kappa_unclamped(pair, r0, rj);
        if raw > 1.0 + 1e-6 {
            if self.overshoot.fetch_add(1, Ordering::Relaxed) == 0 {
                log::warn!("success kernel {pair:?} overshoots one: {raw} at r0 = {r0}, rj = {rj}");
            }
        }
        raw.clamp(0.0, 1.0)
    }

    fn kappa_unclamped(&self, pair: LinkPair, r0: f64, rj: f64) -> f64 {
        let p = &self.params;
        let (i, j) = (pair.serving, pair.dominant);
        let m_i = p.shape(i);
        let m_j = p.shape(j) as f64;
        let beta = alzer_beta(m_i);
        let signal = link_gain(p, i, r0);
        let dominant = if rj.is_infinite() { 0.0 } else { link_gain(p, j, rj) };
        let s = self.residual_interference(j, rj);
        let noise_term = m_i as f64 * beta * self.theta * (s + p.noise) / (p.tx_power * signal);
        let ratio = m_i as f64 * beta * self.theta * dominant / (signal * m_j);
        let mut sum = 0.0;
        for k in 1..=m_i {
            let kf = k as f64;
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            sum += sign * binomial(m_i, k) * (-kf * noise_term).exp() * (1.0 + kf * ratio).powf(-m_j);
        }
        sum
    }

    /// Probability that the serving link has kind `i` at `r0` while the
    /// dominant interferer of kind `j` at `rj` is not outpowered by the
    /// nearest interferer of the other kind.
    pub fn association_probability(&self, pair: LinkPair, r0: f64, rj: f64) -> f64 {
        let p = &self.params;
        let d3 = (rj * rj + p.altitude * p.altitude).sqrt();
        link_probability(p, pair.serving, r0) * self.laws.ccdf(opposite(pair.dominant), exclusion_for(p, pair.dominant, d3))
    }

    /// Smallest dominant distance at which `κ(r0, ·) > γ`, searched in
    /// `log10 z` from `lo_log`.
    fn dominant_boundary(&self, pair: LinkPair, r0: f64, gamma: f64, lo_log: f64) -> f64 {
        let grid = self.laws.grid();
        let (min_log, max_log) = (grid.r_min().log10(), grid.r_max().log10());
        if self.kappa(pair, r0, grid.r_min()) > gamma && lo_log <= min_log {
            return 0.0;
        }
        if self.kappa(pair, r0, grid.r_max()) <= gamma {
            return f64::INFINITY;
        }
        let mut lo = lo_log.max(min_log);
        let mut hi = max_log;
        if self.kappa(pair, r0, 10f64.powf(lo)) > gamma {
            return 10f64.powf(lo);
        }
        for _ in 0..BISECTION_STEPS {
            let mid = 0.5 * (lo + hi);
            if self.kappa(pair, r0, 10f64.powf(mid)) > gamma {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        10f64.powf(hi)
    }

    /// `Q(r, γ)`: success probability above `γ` given the serving distance,
    /// averaged over link states and the dominant interferer.
    pub fn success_given_serving(&self, r0: f64, gamma: f64) -> f64 {
        if gamma <= 0.0 {
            return 1.0;
        }
        if gamma >= 1.0 {
            return 0.0;
        }
        let p = &self.params;
        LinkPair::ALL
            .iter()
            .map(|pair| {
                let z = self.dominant_boundary(*pair, r0, gamma, f64::NEG_INFINITY);
                link_probability(p, pair.serving, r0) * self.dominant_tail(pair.dominant, z)
            })
            .sum()
    }

    /// `P(P_s > γ)` integrating over the serving distance.
    pub fn meta_distribution(&self, gamma: f64) -> Result<f64> {
        if gamma <= 0.0 {
            return Ok(self.law_mass());
        }
        if gamma >= 1.0 {
            return Ok(0.0);
        }
        let rule = CompositeRule::new(0.0, 1.0, 256, 4);
        let p = &self.params;
        Ok(rule.integrate(|u| self.success_given_serving(serving_quantile(p, u), gamma)) * self.law_mass())
    }

    /// Serving share `∫_0^r P_i(x) f_R0(x) dx` from the tabulated values.
    fn serving_share(&self, kind: LinkKind, r: f64) -> f64 {
        let u = serving_cdf(&self.params, r);
        let table = &self.serving_share[slot(kind)];
        let pos = u * SERVING_CELLS as f64;
        let k = (pos.floor() as usize).min(SERVING_CELLS - 1);
        let t = pos - k as f64;
        table[k] + t * (table[k + 1] - table[k])
    }

    /// Largest serving distance with `κ(·, z) > γ`, or `None` when the kernel
    /// is not monotone in the serving distance.
    fn serving_boundary(&self, pair: LinkPair, z: f64, gamma: f64) -> Option<f64> {
        if self.kappa(pair, 0.0, z) <= gamma {
            return Some(0.0);
        }
        let mut hi = 100.0;
        while self.kappa(pair, hi, z) > gamma {
            hi *= 2.0;
            if hi > 1e8 {
                return Some(f64::INFINITY);
            }
        }
        let probes: Vec<f64> = (0..=8).map(|k| self.kappa(pair, hi * k as f64 / 8.0, z)).collect();
        if probes.windows(2).any(|w| w[1] > w[0] + 1e-12) {
            return None;
        }
        let mut lo = 0.0;
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if self.kappa(pair, mid, z) > gamma {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(0.5 * (lo + hi))
    }

    /// `P(P_s > γ)` integrating over the dominant-interferer distance, with
    /// the indicator region closed in the serving distance.
    pub fn meta_distribution_by_dominant(&self, gamma: f64) -> Result<f64> {
        if gamma <= 0.0 {
            return Ok(self.law_mass());
        }
        if gamma >= 1.0 {
            return Ok(0.0);
        }
        let p = &self.params;
        let grid = self.laws.grid();
        let rule = CompositeRule::new(grid.r_min().ln(), grid.r_max().ln(), 400, 4);
        let dense = CompositeRule::new(0.0, 1.0, 500, 4);
        let mut total = 0.0;
        for pair in LinkPair::ALL {
            let other = opposite(pair.dominant);
            total += rule.integrate(|lz| {
                let z = lz.exp();
                let d3 = (z * z + p.altitude * p.altitude).sqrt();
                let weight = self.laws.pdf(pair.dominant, z) * self.laws.ccdf(other, exclusion_for(p, pair.dominant, d3)) * z;
                if weight == 0.0 {
                    return 0.0;
                }
                let share = match self.serving_boundary(pair, z, gamma) {
                    Some(r) if r.is_infinite() => *self.serving_share[slot(pair.serving)].last().unwrap(),
                    Some(r) => self.serving_share(pair.serving, r),
                    None => dense.integrate(|u| {
                        let r = serving_quantile(p, u);
                        if self.kappa(pair, r, z) > gamma {
                            link_probability(p, pair.serving, r)
                        } else {
                            0.0
                        }
                    }),
                };
                weight * share
            });
        }
        Ok(total * self.law_mass())
    }

    /// Expected association probabilities of the four pairs.
    pub fn association_totals(&self) -> [f64; 4] {
        let p = &self.params;
        let rule = CompositeRule::new(0.0, 1.0, 256, 4);
        LinkPair::ALL.map(|pair| {
            let serving = rule.integrate(|u| link_probability(p, pair.serving, serving_quantile(p, u)));
            serving * self.dominant_tail(pair.dominant, 0.0)
        })
    }

    /// First and second moments of the kernel, association weighted.
    pub fn moments(&self) -> Result<(f64, f64)> {
        let p = &self.params;
        let grid = self.laws.grid();
        let zrule = CompositeRule::new(grid.r_min().ln(), grid.r_max().ln(), 200, 4);
        let weights: Vec<[f64; 2]> = zrule
            .nodes
            .iter()
            .zip(&zrule.weights)
            .map(|(lz, w)| {
                let z = lz.exp();
                let d3 = (z * z + p.altitude * p.altitude).sqrt();
                AERIAL.map(|j| w * z * self.laws.pdf(j, z) * self.laws.ccdf(opposite(j), exclusion_for(p, j, d3)))
            })
            .collect();
        let urule = CompositeRule::new(0.0, 1.0, 128, 4);
        let mut m1 = 0.0;
        let mut m2 = 0.0;
        for (u, wu) in urule.nodes.iter().zip(&urule.weights) {
            let r0 = serving_quantile(p, *u);
            for pair in LinkPair::ALL {
                let pi = link_probability(p, pair.serving, r0);
                for (lz, w) in zrule.nodes.iter().zip(&weights) {
                    let wj = w[slot(pair.dominant)];
                    if wj == 0.0 {
                        continue;
                    }
                    let k = self.kappa(pair, r0, lz.exp());
                    m1 += wu * pi * wj * k;
                    m2 += wu * pi * wj * k * k;
                }
            }
        }
        let mass = self.law_mass();
        Ok((m1 * mass, m2 * mass))
    }

    fn success_table(&self, gammas: usize) -> &SuccessTable {
        let table = self.success_table.get_or_init(|| self.build_success_table(gammas));
        table
    }

    fn build_success_table(&self, gammas: usize) -> SuccessTable {
        use rayon::prelude::*;
        let p = &self.params;
        let cells = SERVING_CELLS;
        let rows: Vec<Vec<f64>> = (0..=cells)
            .into_par_iter()
            .map(|k| {
                let mut row = vec![0.0; gammas + 1];
                row[0] = 1.0;
                if k == cells {
                    return row;
                }
                let r0 = serving_quantile(p, k as f64 / cells as f64);
                for pair in LinkPair::ALL {
                    let pi = link_probability(p, pair.serving, r0);
                    let mut lo_log = f64::NEG_INFINITY;
                    for (j, v) in row.iter_mut().enumerate().take(gammas).skip(1) {
                        let z = self.dominant_boundary(pair, r0, j as f64 / gammas as f64, lo_log);
                        if z.is_infinite() {
                            break;
                        }
                        if z > 0.0 {
                            lo_log = z.log10() - 1e-9;
                        }
                        *v += pi * self.dominant_tail(pair.dominant, z);
                    }
                }
                row
            })
            .collect();
        SuccessTable {
            cells,
            gammas,
            values: rows.concat(),
        }
    }

    /// Survival lattice `S[i][j] = P(P_s(t0) > i/n, P_s(t1) > j/n)`.
    ///
    /// Without handover only the serving distance is displaced; the dominant
    /// interferers at the two instants are independent draws. With handover
    /// the new serving distance follows the nearest-BS law truncated below
    /// `r0 + d`.
    pub fn survival_lattice(&self, d: f64, branch: Branch, n: usize) -> Result<Vec<f64>> {
        if !(d >= 0.0) {
            return Err(Error::domain("survival_lattice", "displacement must be >= 0"));
        }
        let p = &self.params;
        let table = self.success_table(n);
        if table.gammas != n {
            return Err(Error::domain("survival_lattice", "lattice size differs from the cached table"));
        }
        let cells = table.cells;
        let lambda_pi = p.lambda() * PI;
        let (kx, kw) = gauss_legendre(ANGLE_NODES);
        let trunc = CompositeRule::new(0.0, 1.0, TRUNCATION_PANELS, 4);

        let mut s = vec![0.0; (n + 1) * (n + 1)];
        let mut later = vec![0.0; n + 1];
        for k in 0..=cells {
            // Trapezoid weights on the uniform serving grid.
            let wu = if k == 0 || k == cells { 0.5 } else { 1.0 } / cells as f64;
            let first = table.row(k);
            if first.iter().skip(1).all(|v| *v == 0.0) && k > 0 {
                // Only the γ0 = 0 row survives; still needs the t1 marginal.
            }
            let r0 = if k == cells { f64::INFINITY } else { serving_quantile(p, k as f64 / cells as f64) };
            later.iter_mut().for_each(|v| *v = 0.0);
            if r0.is_infinite() {
                later[0] = 1.0;
            } else {
                match branch {
                    Branch::NoHandover => {
                        for (x, w) in kx.iter().zip(&kw) {
                            let r1 = law_of_cosines(r0, d, 0.5 * PI * (x + 1.0));
                            let u1 = serving_cdf(p, r1);
                            for (j, v) in later.iter_mut().enumerate() {
                                *v += 0.5 * w * table.at(u1, j);
                            }
                        }
                    }
                    Branch::Handover => {
                        let r_d = r0 + d;
                        let cap = -(-lambda_pi * r_d * r_d).exp_m1();
                        for (x, w) in trunc.nodes.iter().zip(&trunc.weights) {
                            let r1 = (-(-x * cap).ln_1p() / lambda_pi).sqrt();
                            let u1 = serving_cdf(p, r1);
                            for (j, v) in later.iter_mut().enumerate() {
                                *v += w * table.at(u1, j);
                            }
                        }
                    }
                }
            }
            for i in 0..=n {
                let a = first[i];
                if a == 0.0 {
                    continue;
                }
                let row = &mut s[i * (n + 1)..(i + 1) * (n + 1)];
                for j in 0..=n {
                    row[j] += wu * a * later[j];
                }
            }
        }
        let mass = self.law_mass();
        s.iter_mut().for_each(|v| *v *= mass);
        Ok(s)
    }

    /// Joint success probability without handover at one `(γ0, γ1)` point.
    pub fn joint_no_handover(&self, gamma0: f64, gamma1: f64, d: f64) -> Result<f64> {
        let p = &self.params;
        let urule = CompositeRule::new(0.0, 1.0, 128, 4);
        let (kx, kw) = gauss_legendre(ANGLE_NODES);
        let v = urule.integrate(|u| {
            let r0 = serving_quantile(p, u);
            let a = self.success_given_serving(r0, gamma0);
            if a == 0.0 {
                return 0.0;
            }
            let b: f64 = kx
                .iter()
                .zip(&kw)
                .map(|(x, w)| 0.5 * w * self.success_given_serving(law_of_cosines(r0, d, 0.5 * PI * (x + 1.0)), gamma1))
                .sum();
            a * b
        });
        Ok(v * self.law_mass())
    }

    /// Joint success probability with handover at one `(γ0, γ1)` point.
    pub fn joint_handover(&self, gamma0: f64, gamma1: f64, d: f64) -> Result<f64> {
        let p = &self.params;
        let lambda_pi = p.lambda() * PI;
        let urule = CompositeRule::new(0.0, 1.0, 128, 4);
        let trunc = CompositeRule::new(0.0, 1.0, TRUNCATION_PANELS, 4);
        let v = urule.integrate(|u| {
            let r0 = serving_quantile(p, u);
            let a = self.success_given_serving(r0, gamma0);
            if a == 0.0 {
                return 0.0;
            }
            let r_d = r0 + d;
            let cap = -(-lambda_pi * r_d * r_d).exp_m1();
            let b = trunc.integrate(|w| self.success_given_serving((-(-w * cap).ln_1p() / lambda_pi).sqrt(), gamma1));
            a * b
        });
        Ok(v * self.law_mass())
    }
}

impl JointModel for AerialSuccessContext {
    fn params(&self) -> &SystemParams {
        &self.params
    }

    fn survival_lattice(&self, d: f64, branch: Branch, n: usize) -> Result<Vec<f64>> {
        AerialSuccessContext::survival_lattice(self, d, branch, n)
    }

    fn moments(&self) -> Result<(f64, f64)> {
        AerialSuccessContext::moments(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::Environment;
    use crate::ground::GroundSuccessContext;

    #[test]
    fn kernels_vanish_into_one_at_tiny_threshold() {
        let ctx = AerialSuccessContext::new(&SystemParams::default().with_threshold(1e-18)).unwrap();
        for pair in LinkPair::ALL {
            let k = ctx.kappa(pair, 200.0, 400.0);
            assert!((k - 1.0).abs() < 1e-8, "{pair:?}: {k} s={}", ctx.residual_interference(pair.dominant, 400.0));
        }
    }

    #[test]
    fn rayleigh_los_kernel_matches_ground_form() {
        let mut p = SystemParams::default();
        p.los_shape = 1;
        let ctx = AerialSuccessContext::new(&p).unwrap();
        let pair = LinkPair { serving: LinkKind::Los, dominant: LinkKind::Los };
        let (r0, rl) = (150.0, 420.0);
        let s = ctx.residual_interference(LinkKind::Los, rl);
        let sig = link_gain(&p, LinkKind::Los, r0);
        let dom = link_gain(&p, LinkKind::Los, rl);
        let expect = (-p.sinr_threshold * (s + p.noise) / (p.tx_power * sig)).exp() / (1.0 + p.sinr_threshold * dom / sig);
        assert!((ctx.kappa(pair, r0, rl) - expect).abs() < 1e-14);
    }

    #[test]
    fn association_sums_to_one() {
        for env in Environment::PRESETS {
            let ctx = AerialSuccessContext::new(&SystemParams::default().with_environment(env)).unwrap();
            let total: f64 = ctx.association_totals().iter().sum();
            assert!((total - 1.0).abs() < 1e-4, "{env:?}: {total}");
        }
    }

    #[test]
    fn meta_routes_agree() {
        let ctx = AerialSuccessContext::new(&SystemParams::default()).unwrap();
        for gamma in [0.2, 0.5, 0.8] {
            let a = ctx.meta_distribution(gamma).unwrap();
            let b = ctx.meta_distribution_by_dominant(gamma).unwrap();
            assert!((a - b).abs() < 2e-3, "γ {gamma}: {a} vs {b}");
        }
    }

    #[test]
    fn degenerate_channel_reproduces_ground() {
        let mut p = SystemParams::default();
        p.los_shape = 1;
        p.nlos_shape = 1;
        p.nlos_excess = p.los_excess;
        p.los_pathloss = p.ground_pathloss;
        p.nlos_pathloss = p.ground_pathloss;
        p.altitude = 0.0;
        let aerial = AerialSuccessContext::new(&p).unwrap();
        let ground = GroundSuccessContext::new(&p).unwrap();
        for gamma in [0.1, 0.5, 0.9] {
            let a = aerial.meta_distribution(gamma).unwrap();
            let g = ground.meta_distribution(gamma).unwrap();
            assert!((a - g).abs() < 2e-3, "γ {gamma}: {a} vs {g}");
        }
    }

    #[test]
    fn lattice_matches_point_evaluators() {
        let ctx = AerialSuccessContext::new(&SystemParams::default()).unwrap();
        let n = 100;
        let d = 200.0;
        for branch in [Branch::NoHandover, Branch::Handover] {
            let s = ctx.survival_lattice(d, branch, n).unwrap();
            for (i, j) in [(20, 30), (50, 50), (70, 40)] {
                let (g0, g1) = (i as f64 / n as f64, j as f64 / n as f64);
                let point = match branch {
                    Branch::NoHandover => ctx.joint_no_handover(g0, g1, d).unwrap(),
                    Branch::Handover => ctx.joint_handover(g0, g1, d).unwrap(),
                };
                let lat = s[i * (n + 1) + j];
                assert!((lat - point).abs() < 2e-3, "{branch:?} ({g0}, {g1}): {lat} vs {point}");
            }
        }
    }

    #[test]
    fn mobility_grids_are_consistent() {
        use crate::correlation::MobilityGrids;
        let ctx = AerialSuccessContext::new(&SystemParams::default()).unwrap();
        let grids = MobilityGrids::build(&ctx, 10.0, 1.0).unwrap();
        assert!(grids.no_handover.clipped < 1e-4);
        let rho = grids.correlation().unwrap();
        assert!(rho > 0.0 && rho <= 1.0, "{rho}");
        let (m1, _) = ctx.moments().unwrap();
        let mean = grids.moments().mean0;
        assert!((m1 - mean).abs() < 1e-2, "{m1} vs {mean}");
    }
}
