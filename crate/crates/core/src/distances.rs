//! Distance laws and mobility geometry.
//!
//! Serving and interferer distance distributions for ground users, the
//! nearest LoS/NLoS interferer laws for aerial users, the displacement law of
//! a moving user, the averaged handover probability and the LoS/NLoS
//! exclusion distances.

use std::f64::consts::PI;

use crate::channel::{link_probability, LinkKind, SystemParams};
use crate::error::{Error, Result};
use crate::math::{integrate_1d, QuadratureSpec};

/// Which serving-distance density to use.
///
/// The printed density pairs the BS density in its prefactor with the fitted
/// density in the exponent and so integrates to `1 / fit_factor`. The
/// normalized variant uses the fitted density in both places.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ServingLaw {
    Printed,
    #[default]
    Normalized,
}

pub fn serving_pdf(p: &SystemParams, r: f64, law: ServingLaw) -> f64 {
    let lf = p.lambda_fit();
    let pref = match law {
        ServingLaw::Printed => p.lambda(),
        ServingLaw::Normalized => lf,
    };
    2.0 * PI * pref * r * (-lf * PI * r * r).exp()
}

pub fn serving_cdf(p: &SystemParams, r: f64) -> f64 {
    -(-p.lambda_fit() * PI * r * r).exp_m1()
}

pub fn serving_ccdf(p: &SystemParams, r: f64) -> f64 {
    (-p.lambda_fit() * PI * r * r).exp()
}

/// Inverse of [`serving_cdf`].
pub fn serving_quantile(p: &SystemParams, u: f64) -> f64 {
    (-(-u).ln_1p() / (p.lambda_fit() * PI)).sqrt()
}

/// Nearest-BS distance CDF of a user placed independently of the BSs.
pub fn nearest_bs_cdf(p: &SystemParams, r: f64) -> f64 {
    -(-p.lambda() * PI * r * r).exp_m1()
}

pub fn nearest_bs_quantile(p: &SystemParams, u: f64) -> f64 {
    (-(-u).ln_1p() / (p.lambda() * PI)).sqrt()
}

/// Nearest-BS CDF truncated below `r_d` and renormalized to reach 1 there.
pub fn truncated_nearest_cdf(p: &SystemParams, r: f64, r_d: f64) -> f64 {
    if r >= r_d {
        return 1.0;
    }
    let l = p.lambda() * PI;
    ((-l * r * r).exp_m1() / (-l * r_d * r_d).exp_m1()).clamp(0.0, 1.0)
}

/// Density of interfering UEs relative to the BS density at distance `r`
/// from the serving BS, `1 - exp(-πλr²)`.
pub fn interferer_thinning(p: &SystemParams, r: f64) -> f64 {
    -(-p.lambda() * PI * r * r).exp_m1()
}

/// `2πλ ∫_0^r (1 - e^{-πλz²}) z dz = x - (1 - e^{-x})` with `x = πλr²`.
fn interferer_void_measure(p: &SystemParams, r: f64) -> f64 {
    let x = p.lambda() * PI * r * r;
    if x < 1e-3 {
        x * x * (0.5 - x / 6.0 + x * x / 24.0)
    } else {
        x + (-x).exp_m1()
    }
}

pub fn interferer_pdf(p: &SystemParams, r: f64) -> f64 {
    2.0 * PI * p.lambda() * interferer_thinning(p, r) * r * (-interferer_void_measure(p, r)).exp()
}

pub fn interferer_cdf(p: &SystemParams, r: f64) -> f64 {
    -(-interferer_void_measure(p, r)).exp_m1()
}

pub fn interferer_ccdf(p: &SystemParams, r: f64) -> f64 {
    (-interferer_void_measure(p, r)).exp()
}

/// Inverse of [`interferer_cdf`].
pub fn interferer_quantile(p: &SystemParams, u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    if u >= 1.0 {
        return f64::INFINITY;
    }
    // Solve x - 1 + e^{-x} = L for x = πλr².
    let target = -(-u).ln_1p();
    let mut x = if target < 0.5 {
        (2.0 * target).sqrt()
    } else {
        target + 1.0
    };
    for _ in 0..100 {
        let f = if x < 1e-3 {
            x * x * (0.5 - x / 6.0 + x * x / 24.0)
        } else {
            x + (-x).exp_m1()
        } - target;
        let df = -(-x).exp_m1();
        let step = f / df;
        x = (x - step).max(0.5 * x);
        if step.abs() <= 1e-15 * x {
            break;
        }
    }
    (x / (p.lambda() * PI)).sqrt()
}

/// Motion of the typical user over one interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisplacementInput {
    pub r0: f64,
    /// Angle between the direction of motion and the direction of the BS.
    pub direction: f64,
    pub speed: f64,
    pub elapsed: f64,
}

impl DisplacementInput {
    pub fn displacement(&self) -> f64 {
        self.speed * self.elapsed
    }
}

/// Law of cosines: distance after moving `d` at angle `kappa` from the
/// direction of a point at distance `r0`.
pub fn law_of_cosines(r0: f64, d: f64, kappa: f64) -> f64 {
    (d * d + r0 * r0 - 2.0 * d * r0 * kappa.cos()).max(0.0).sqrt()
}

pub fn displaced_distance(input: &DisplacementInput) -> f64 {
    law_of_cosines(input.r0, input.displacement(), input.direction)
}

/// Angle κ in `[0, π]` at which the displaced distance equals `r`.
pub fn displacement_angle(r0: f64, r: f64, d: f64) -> f64 {
    if d == 0.0 || r0 == 0.0 {
        return if r >= r0.max(d) { PI } else { 0.0 };
    }
    let c = (d * d + r0 * r0 - r * r) / (2.0 * d * r0);
    c.clamp(-1.0, 1.0).acos()
}

/// CDF of the displaced distance for a uniform direction, `κ(r0, r) / π`.
///
/// Defined on the support `[|r0 - d|, r0 + d]`; outside it this returns a
/// domain error. See [`displaced_cdf_clamped`] for the total version.
pub fn displaced_cdf(r0: f64, r: f64, d: f64) -> Result<f64> {
    if !(d > 0.0) {
        return Err(Error::domain("displaced_cdf", "displacement must be positive"));
    }
    let lo = (r0 - d).abs();
    let hi = r0 + d;
    let slack = 1e-12 * hi;
    if r < lo - slack || r > hi + slack {
        return Err(Error::domain(
            "displaced_cdf",
            format!("r = {r} outside support [{lo}, {hi}]"),
        ));
    }
    Ok(displacement_angle(r0, r, d) / PI)
}

/// [`displaced_cdf`] extended by 0 below and 1 above the support.
pub fn displaced_cdf_clamped(r0: f64, r: f64, d: f64) -> f64 {
    if d == 0.0 {
        return if r0 < r { 1.0 } else { 0.0 };
    }
    if r <= (r0 - d).abs() {
        0.0
    } else if r >= r0 + d {
        1.0
    } else {
        displacement_angle(r0, r, d) / PI
    }
}

/// Area that must be BS-free for the user to keep its serving BS after
/// moving `d` at angle `kappa`: the new nearest-BS disc minus the old one.
pub fn handover_void_area(r0: f64, kappa: f64, d: f64) -> f64 {
    if d == 0.0 || r0 == 0.0 {
        return 0.0;
    }
    let r1 = law_of_cosines(r0, d, kappa);
    if r1 == 0.0 {
        return 0.0;
    }
    // Angle at the BS between the old and new user positions.
    let at_bs = ((r0 * r0 + r1 * r1 - d * d) / (2.0 * r0 * r1)).clamp(-1.0, 1.0).acos();
    (r1 * r1 * (kappa + at_bs) - r0 * r0 * kappa + r0 * d * kappa.sin()).max(0.0)
}

/// Probability that the serving BS changes after moving a distance `d`.
pub fn handover_probability_at(p: &SystemParams, d: f64) -> Result<f64> {
    if !(d >= 0.0) {
        return Err(Error::domain("handover_probability", "displacement must be >= 0"));
    }
    if d == 0.0 {
        return Ok(0.0);
    }
    let lambda = p.lambda();
    let spec = QuadratureSpec::standard().with_tol(1e-10, 1e-9);
    let outer = |u: f64| {
        let r0 = nearest_bs_quantile(p, u);
        let inner = integrate_1d(
            |k| -(-lambda * handover_void_area(r0, k, d)).exp_m1(),
            0.0,
            PI,
            &spec,
        );
        inner.map(|v| v / PI)
    };
    let mut failure = None;
    let value = integrate_1d(
        |u| match outer(u) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        0.0,
        1.0,
        &spec,
    )?;
    match failure {
        Some(e) => Err(e),
        None => Ok(value.clamp(0.0, 1.0)),
    }
}

/// Handover probability over an interval `t` at the configured velocity.
pub fn handover_probability(p: &SystemParams, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::domain("handover_probability", "elapsed time must be >= 0"));
    }
    handover_probability_at(p, p.velocity * t)
}

/// Horizontal distance at which an NLoS interferer matches the mean power of
/// a LoS dominant interferer at 3-D distance `d3`.
pub fn exclusion_ln(p: &SystemParams, d3: f64) -> f64 {
    let h = p.altitude;
    let equal = (p.nlos_excess / p.los_excess).powf(1.0 / p.nlos_pathloss)
        * d3.powf(p.los_pathloss / p.nlos_pathloss);
    let e = equal.max(h);
    (e * e - h * h).max(0.0).sqrt()
}

/// Horizontal distance at which a LoS interferer matches the mean power of
/// an NLoS dominant interferer at 3-D distance `d3`.
pub fn exclusion_nl(p: &SystemParams, d3: f64) -> f64 {
    let h = p.altitude;
    let equal = (p.los_excess / p.nlos_excess).powf(1.0 / p.los_pathloss)
        * d3.powf(p.nlos_pathloss / p.los_pathloss);
    let e = equal.max(h);
    (e * e - h * h).max(0.0).sqrt()
}

/// Exclusion distance for the link type opposite to `dominant`.
pub fn exclusion_for(p: &SystemParams, dominant: LinkKind, d3: f64) -> f64 {
    match dominant {
        LinkKind::Los => exclusion_ln(p, d3),
        _ => exclusion_nl(p, d3),
    }
}

/// Geometric radial grid with cumulative integrals of a radial integrand.
///
/// Covers `[1e-2, 1e8]` m at 512 points per decade. Each cell is integrated
/// with a 6-point Gauss-Legendre rule in `ln r`.
#[derive(Debug, Clone)]
pub struct RadialGrid {
    log_min: f64,
    per_decade: f64,
    radii: Vec<f64>,
}

const GRID_MIN: f64 = 1e-2;
const GRID_MAX: f64 = 1e8;
const PER_DECADE: usize = 512;

impl Default for RadialGrid {
    fn default() -> Self {
        Self::new(GRID_MIN, GRID_MAX, PER_DECADE)
    }
}

impl RadialGrid {
    pub fn new(r_min: f64, r_max: f64, per_decade: usize) -> Self {
        let decades = (r_max / r_min).log10();
        let n = (decades * per_decade as f64).round() as usize + 1;
        let log_min = r_min.log10();
        let radii = (0..n)
            .map(|k| 10f64.powf(log_min + k as f64 / per_decade as f64))
            .collect();
        RadialGrid {
            log_min,
            per_decade: per_decade as f64,
            radii,
        }
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn r_min(&self) -> f64 {
        self.radii[0]
    }

    pub fn r_max(&self) -> f64 {
        *self.radii.last().unwrap()
    }

    /// Per-cell integrals of `g` over `[r_k, r_{k+1}]`.
    pub fn cell_integrals<G: Fn(f64) -> f64>(&self, g: G) -> Vec<f64> {
        let (x, w) = crate::math::gauss_legendre(6);
        self.radii
            .windows(2)
            .map(|pair| {
                let (la, lb) = (pair[0].ln(), pair[1].ln());
                let half = 0.5 * (lb - la);
                let mid = 0.5 * (la + lb);
                x.iter()
                    .zip(&w)
                    .map(|(xi, wi)| {
                        let r = (mid + half * xi).exp();
                        wi * g(r) * r
                    })
                    .sum::<f64>()
                    * half
            })
            .collect()
    }

    /// Running integral from 0; the piece below the grid is ignored.
    pub fn cumulative<G: Fn(f64) -> f64>(&self, g: G) -> Vec<f64> {
        let head = integrate_1d(&g, 0.0, self.r_min(), &QuadratureSpec::standard()).unwrap_or(0.0);
        let mut out = Vec::with_capacity(self.radii.len());
        let mut acc = head;
        out.push(acc);
        for c in self.cell_integrals(g) {
            acc += c;
            out.push(acc);
        }
        out
    }

    /// Integral from each node to infinity, given the value beyond the grid.
    pub fn tail<G: Fn(f64) -> f64>(&self, g: G, beyond: f64) -> Vec<f64> {
        let cells = self.cell_integrals(g);
        let mut out = vec![0.0; self.radii.len()];
        let mut acc = beyond;
        out[self.radii.len() - 1] = acc;
        for k in (0..cells.len()).rev() {
            acc += cells[k];
            out[k] = acc;
        }
        out
    }

    /// Cell index and fractional position of `r` in log space.
    fn locate(&self, r: f64) -> (usize, f64) {
        let pos = (r.log10() - self.log_min) * self.per_decade;
        let last = self.radii.len() - 2;
        let k = (pos.floor().max(0.0) as usize).min(last);
        (k, pos - k as f64)
    }

    /// Tabulates the running integral of `g` from 0 together with its slope.
    pub fn cumulative_table<G: Fn(f64) -> f64>(&self, g: G) -> RadialTable {
        let values = self.cumulative(&g);
        RadialTable::new(self, values, |r| g(r))
    }

    /// Tabulates the integral of `g` from each node to infinity.
    pub fn tail_table<G: Fn(f64) -> f64>(&self, g: G, beyond: f64) -> RadialTable {
        let values = self.tail(&g, beyond);
        RadialTable::new(self, values, |r| -g(r))
    }
}

/// Values on a [`RadialGrid`] with their exact derivatives, interpolated by
/// cubic Hermite segments in log-log coordinates.
#[derive(Debug, Clone)]
pub struct RadialTable {
    values: Vec<f64>,
    /// d ln(value) / d ln(r); NaN where the value is zero.
    log_slopes: Vec<f64>,
}

impl RadialTable {
    fn new<D: Fn(f64) -> f64>(grid: &RadialGrid, values: Vec<f64>, derivative: D) -> Self {
        let log_slopes = grid
            .radii
            .iter()
            .zip(&values)
            .map(|(r, v)| if *v > 0.0 { r * derivative(*r) / v } else { f64::NAN })
            .collect();
        RadialTable { values, log_slopes }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn first(&self) -> f64 {
        self.values[0]
    }

    pub fn last(&self) -> f64 {
        *self.values.last().unwrap()
    }

    /// Value at `r` inside the grid range.
    pub fn at(&self, grid: &RadialGrid, r: f64) -> f64 {
        let (k, t) = grid.locate(r);
        let (a, b) = (self.values[k], self.values[k + 1]);
        if !(a > 0.0 && b > 0.0) {
            return a + t.clamp(0.0, 1.0) * (b - a);
        }
        let h = (grid.radii[k + 1] / grid.radii[k]).ln();
        let (ya, yb) = (a.ln(), b.ln());
        let (ma, mb) = (self.log_slopes[k] * h, self.log_slopes[k + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        let y = (2.0 * t3 - 3.0 * t2 + 1.0) * ya
            + (t3 - 2.0 * t2 + t) * ma
            + (-2.0 * t3 + 3.0 * t2) * yb
            + (t3 - t2) * mb;
        y.exp()
    }

    /// Smallest `r` with value `target`, for an increasing table.
    pub fn invert_increasing(&self, grid: &RadialGrid, target: f64) -> f64 {
        let k = self.values.partition_point(|v| *v < target);
        if k == 0 {
            return grid.radii[0];
        }
        if k >= self.values.len() {
            return f64::INFINITY;
        }
        // Bisection on the Hermite interpolant within the bracket.
        let (mut lo, mut hi) = (grid.radii[k - 1].ln(), grid.radii[k].ln());
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if self.at(grid, mid.exp()) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (0.5 * (lo + hi)).exp()
    }
}

/// Laws of the nearest LoS and nearest NLoS interferer of an aerial user,
/// tabulated once per parameter set.
#[derive(Debug, Clone)]
pub struct NearestLinkLaws {
    params: SystemParams,
    grid: RadialGrid,
    void_los: RadialTable,
    void_nlos: RadialTable,
}

impl NearestLinkLaws {
    pub fn new(p: &SystemParams) -> Self {
        let grid = RadialGrid::default();
        let lambda = p.lambda();
        let density = |kind: LinkKind| {
            move |r: f64| 2.0 * PI * r * lambda * interferer_thinning(p, r) * link_probability(p, kind, r)
        };
        let void_los = grid.cumulative_table(density(LinkKind::Los));
        let void_nlos = grid.cumulative_table(density(LinkKind::Nlos));
        NearestLinkLaws {
            params: p.clone(),
            grid,
            void_los,
            void_nlos,
        }
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    fn table(&self, kind: LinkKind) -> &RadialTable {
        match kind {
            LinkKind::Los => &self.void_los,
            _ => &self.void_nlos,
        }
    }

    /// Expected number of interferers of the given kind within `r`.
    pub fn void_measure(&self, kind: LinkKind, r: f64) -> f64 {
        let table = self.table(kind);
        let g = &self.grid;
        if r <= 0.0 {
            return 0.0;
        }
        if r < g.r_min() {
            // Density grows like r³ near the origin.
            return table.first() * (r / g.r_min()).powi(4);
        }
        if r >= g.r_max() {
            let far = link_probability(&self.params, kind, r);
            return table.last() + PI * self.params.lambda() * far * (r * r - g.r_max() * g.r_max());
        }
        table.at(g, r)
    }

    pub fn cdf(&self, kind: LinkKind, r: f64) -> f64 {
        -(-self.void_measure(kind, r)).exp_m1()
    }

    pub fn ccdf(&self, kind: LinkKind, r: f64) -> f64 {
        (-self.void_measure(kind, r)).exp()
    }

    pub fn pdf(&self, kind: LinkKind, r: f64) -> f64 {
        let p = &self.params;
        2.0 * PI * r * p.lambda() * interferer_thinning(p, r) * link_probability(p, kind, r) * self.ccdf(kind, r)
    }

    /// Probability that no interferer of this kind exists at all.
    pub fn absence_probability(&self, kind: LinkKind) -> f64 {
        let total = self.table(kind).last();
        let far = link_probability(&self.params, kind, f64::INFINITY);
        if far > 0.0 {
            0.0
        } else {
            (-total).exp()
        }
    }

    /// Distance `r` with `cdf(kind, r) = u`.
    pub fn quantile(&self, kind: LinkKind, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        let target = -(-u).ln_1p();
        let table = self.table(kind);
        let g = &self.grid;
        if target <= table.first() {
            return g.r_min() * (target / table.first()).powf(0.25);
        }
        table.invert_increasing(g, target)
    }
}

pub fn nearest_los_pdf(p: &SystemParams, r: f64) -> f64 {
    NearestLinkLaws::new(p).pdf(LinkKind::Los, r)
}

pub fn nearest_los_cdf(p: &SystemParams, r: f64) -> f64 {
    NearestLinkLaws::new(p).cdf(LinkKind::Los, r)
}

pub fn nearest_nlos_pdf(p: &SystemParams, r: f64) -> f64 {
    NearestLinkLaws::new(p).pdf(LinkKind::Nlos, r)
}

pub fn nearest_nlos_cdf(p: &SystemParams, r: f64) -> f64 {
    NearestLinkLaws::new(p).cdf(LinkKind::Nlos, r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{link_gain, Environment};

    fn params() -> SystemParams {
        SystemParams::default()
    }

    #[test]
    fn serving_law_examples() {
        let p = params();
        assert_eq!(serving_cdf(&p, 0.0), 0.0);
        let median = (2f64.ln() / (1.28 * PI)).sqrt() * 1000.0;
        assert!((serving_cdf(&p, median) - 0.5).abs() < 1e-12);
        assert!((median - 415.2).abs() < 0.1);
        let spec = QuadratureSpec::standard();
        let printed = integrate_1d(|r| serving_pdf(&p, r, ServingLaw::Printed), 0.0, f64::INFINITY, &spec).unwrap();
        assert!((printed - 0.78125).abs() < 1e-8);
        let normal = integrate_1d(|r| serving_pdf(&p, r, ServingLaw::Normalized), 0.0, f64::INFINITY, &spec).unwrap();
        assert!((normal - 1.0).abs() < 1e-8);
        assert!((serving_cdf(&p, serving_quantile(&p, 0.3)) - 0.3).abs() < 1e-14);
    }

    #[test]
    fn interferer_law_examples() {
        let p = params();
        assert_eq!(interferer_pdf(&p, 0.0), 0.0);
        let total = integrate_1d(|r| interferer_pdf(&p, r), 0.0, f64::INFINITY, &QuadratureSpec::standard()).unwrap();
        assert!((total - 1.0).abs() < 1e-8);
        assert!((interferer_thinning(&p, 1e5) - 1.0).abs() < 1e-12);
        // Closed-form void measure against quadrature of its definition.
        let r = 700.0;
        let direct = integrate_1d(
            |z| 2.0 * PI * p.lambda() * interferer_thinning(&p, z) * z,
            0.0,
            r,
            &QuadratureSpec::standard().with_tol(1e-14, 1e-12),
        )
        .unwrap();
        assert!((interferer_void_measure(&p, r) - direct).abs() < 1e-12);
        for u in [1e-6, 0.01, 0.4, 0.9, 0.999_999] {
            let r = interferer_quantile(&p, u);
            assert!((interferer_cdf(&p, r) - u).abs() < 1e-12, "u = {u}");
        }
    }

    #[test]
    fn displacement_examples() {
        let base = DisplacementInput { r0: 3.0, direction: PI / 2.0, speed: 4.0, elapsed: 1.0 };
        assert!((displaced_distance(&base) - 5.0).abs() < 1e-12);
        let still = DisplacementInput { speed: 0.0, ..base };
        assert_eq!(displaced_distance(&still), 3.0);
        let toward = DisplacementInput { r0: 10.0, direction: 0.0, speed: 4.0, elapsed: 1.0 };
        assert!((displaced_distance(&toward) - 6.0).abs() < 1e-12);

        assert!(displaced_cdf(10.0, 6.0, 4.0).unwrap().abs() < 1e-12);
        assert!((displaced_cdf(10.0, 14.0, 4.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((displaced_cdf(3.0, 5.0, 4.0).unwrap() - 0.5).abs() < 1e-12);
        assert!(displaced_cdf(10.0, 20.0, 4.0).is_err());
        assert_eq!(displaced_cdf_clamped(10.0, 20.0, 4.0), 1.0);
    }

    #[test]
    fn handover_limits() {
        let p = params();
        assert_eq!(handover_probability(&p.clone().with_velocity(0.0), 1.0).unwrap(), 0.0);
        let far = handover_probability_at(&p, 1e5).unwrap();
        assert!(far > 0.999_999);
        // Matches the acute-angle textbook form where that form is valid.
        let (r0, k, d) = (500.0, 1.0, 300.0);
        let r1 = law_of_cosines(r0, d, k);
        let asin_form = r1 * r1 * (k + (d * k.sin() / r1).asin()) - r0 * r0 * k + r0 * d * k.sin();
        assert!((handover_void_area(r0, k, d) - asin_form).abs() < 1e-6 * asin_form);
    }

    #[test]
    fn exclusion_symmetric_channel() {
        let mut p = params();
        p.nlos_excess = p.los_excess;
        p.nlos_pathloss = p.los_pathloss;
        for d3 in [100.0, 150.0, 1e3, 3e4] {
            let horiz = (d3 * d3 - p.altitude * p.altitude).sqrt();
            assert!((exclusion_ln(&p, d3) - horiz).abs() < 1e-9 * d3);
            assert!((exclusion_nl(&p, d3) - horiz).abs() < 1e-9 * d3);
        }
    }

    #[test]
    fn exclusion_table_values_unclamped_at_altitude() {
        let p = params();
        let d = exclusion_nl(&p, p.altitude);
        assert!(d > 1e4, "{d}");
        let dominant = link_gain(&p, LinkKind::Nlos, 0.0);
        assert!((link_gain(&p, LinkKind::Los, d) / dominant - 1.0).abs() < 1e-9);
    }

    #[test]
    fn nearest_law_reduces_to_interferer_law_when_all_los() {
        let p = params().with_environment(Environment::Custom { a: 0.0, b: 0.43 });
        let laws = NearestLinkLaws::new(&p);
        for r in [10.0, 300.0, 1000.0, 2500.0] {
            let a = laws.pdf(LinkKind::Los, r);
            let b = interferer_pdf(&p, r);
            assert!((a - b).abs() <= 1e-8 * b.max(1e-12), "r = {r}: {a} vs {b}");
        }
        assert!(laws.cdf(LinkKind::Nlos, 1e6) < 1e-12);
    }

    #[test]
    fn nearest_law_normalization_and_quantile() {
        for env in Environment::PRESETS {
            let p = params().with_environment(env);
            let laws = NearestLinkLaws::new(&p);
            for kind in [LinkKind::Los, LinkKind::Nlos] {
                assert_eq!(laws.cdf(kind, 0.0), 0.0);
                let mass = integrate_1d(|r| laws.pdf(kind, r), 0.0, f64::INFINITY, &QuadratureSpec::standard()).unwrap();
                assert!((mass + laws.absence_probability(kind) - 1.0).abs() < 1e-6, "{env:?} {kind:?}: {mass}");
                for u in [0.01, 0.5, 0.95] {
                    let r = laws.quantile(kind, u);
                    assert!((laws.cdf(kind, r) - u).abs() < 1e-9);
                }
            }
        }
    }
}
