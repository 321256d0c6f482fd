//! Adaptive Gauss-Kronrod integration over finite and semi-infinite
//! intervals, nested rectangular integration, and Gauss-Legendre rules.

use std::cell::RefCell;

use crate::error::{Error, Result};

/// Change of variables used to fold `[lower, ∞)` onto `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SemiInfiniteMap {
    /// `t = lower + u / (1 - u)`; suits algebraically decaying integrands.
    Algebraic,
    /// `t = lower - ln(1 - u)`; suits exponentially decaying integrands.
    Exponential,
}

/// Tolerances and limits for one adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum number of bisections applied to any one subinterval.
    pub max_depth: u32,
    pub map: SemiInfiniteMap,
}

impl QuadratureSpec {
    /// Defaults for one-dimensional integrals.
    pub const fn standard() -> Self {
        QuadratureSpec {
            abs_tol: 1e-9,
            rel_tol: 1e-7,
            max_depth: 50,
            map: SemiInfiniteMap::Algebraic,
        }
    }

    /// Relaxed tolerance for three- and four-fold nested integrals.
    pub const fn nested() -> Self {
        QuadratureSpec {
            abs_tol: 1e-5,
            rel_tol: 1e-5,
            max_depth: 50,
            map: SemiInfiniteMap::Algebraic,
        }
    }

    pub const fn with_tol(mut self, abs_tol: f64, rel_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self.rel_tol = rel_tol;
        self
    }

    pub const fn with_map(mut self, map: SemiInfiniteMap) -> Self {
        self.map = map;
        self
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self::standard()
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_INTERVALS: usize = 20_000;

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    depth: u32,
}

fn kronrod15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Result<(f64, f64)> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    if !res_k.is_finite() {
        return Err(Error::domain(
            "integrate_1d",
            format!("integrand not finite on [{a}, {b}]"),
        ));
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let scale = half.abs();
    let value = res_k * half;
    res_asc *= scale;
    res_abs *= scale;
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok((value, err))
}

fn adaptive<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<f64> {
    let (value, error) = kronrod15(&mut f, a, b)?;
    let mut segments = vec![Segment {
        a,
        b,
        value,
        error,
        depth: 0,
    }];
    loop {
        let total: f64 = segments.iter().map(|s| s.value).sum();
        let total_err: f64 = segments.iter().map(|s| s.error).sum();
        let tol = spec.abs_tol.max(spec.rel_tol * total.abs());
        if total_err <= tol {
            return Ok(total);
        }
        let (idx, worst) = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, s)| (i, s.error))
            .unwrap_or((0, 0.0));
        let seg = &segments[idx];
        let mid = 0.5 * (seg.a + seg.b);
        let width_exhausted = mid <= seg.a.min(seg.b) || mid >= seg.a.max(seg.b);
        if seg.depth >= spec.max_depth || segments.len() >= MAX_INTERVALS || width_exhausted {
            return Err(Error::no_converge(
                "integrate_1d",
                format!(
                    "estimate {total:.6e}, error {total_err:.3e} > tol {tol:.3e} \
                     (worst piece {worst:.3e} at depth {})",
                    seg.depth
                ),
            ));
        }
        let (sa, sb, depth) = (seg.a, seg.b, seg.depth + 1);
        let (v1, e1) = kronrod15(&mut f, sa, mid)?;
        let (v2, e2) = kronrod15(&mut f, mid, sb)?;
        segments[idx] = Segment {
            a: sa,
            b: mid,
            value: v1,
            error: e1,
            depth,
        };
        segments.push(Segment {
            a: mid,
            b: sb,
            value: v2,
            error: e2,
            depth,
        });
    }
}

/// Integrates `f` over `[lower, upper]`; `upper` may be `+∞`.
pub fn integrate_1d<F: FnMut(f64) -> f64>(
    mut f: F,
    lower: f64,
    upper: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    if lower.is_nan() || upper.is_nan() || lower.is_infinite() {
        return Err(Error::domain(
            "integrate_1d",
            format!("bad interval [{lower}, {upper}]"),
        ));
    }
    if upper == lower {
        return Ok(0.0);
    }
    if upper < lower {
        return integrate_1d(f, upper, lower, spec).map(|v| -v);
    }
    if upper.is_finite() {
        return adaptive(f, lower, upper, spec);
    }
    match spec.map {
        SemiInfiniteMap::Algebraic => adaptive(
            |u| {
                let om = 1.0 - u;
                let v = f(lower + u / om);
                if v == 0.0 {
                    0.0
                } else {
                    v / (om * om)
                }
            },
            0.0,
            1.0,
            spec,
        ),
        SemiInfiniteMap::Exponential => adaptive(
            |u| {
                let om = 1.0 - u;
                let v = f(lower - om.ln());
                if v == 0.0 {
                    0.0
                } else {
                    v / om
                }
            },
            0.0,
            1.0,
            spec,
        ),
    }
}

/// Nested integration of `f` over a box (up to four dimensions).
///
/// The first bound is the outermost variable. Any failure in an inner
/// integral aborts the whole evaluation.
pub fn integrate_nd<F: Fn(&[f64]) -> f64>(
    f: F,
    bounds: &[(f64, f64)],
    spec: &QuadratureSpec,
) -> Result<f64> {
    if bounds.is_empty() || bounds.len() > 4 {
        return Err(Error::domain(
            "integrate_nd",
            format!("{} dimensions not supported", bounds.len()),
        ));
    }
    let mut point = vec![0.0; bounds.len()];
    let failure = RefCell::new(None);
    let result = nested_level(&f, bounds, 0, &mut point, spec, &failure);
    match failure.into_inner() {
        Some(e) => Err(e),
        None => result,
    }
}

fn nested_level<F: Fn(&[f64]) -> f64>(
    f: &F,
    bounds: &[(f64, f64)],
    level: usize,
    point: &mut Vec<f64>,
    spec: &QuadratureSpec,
    failure: &RefCell<Option<Error>>,
) -> Result<f64> {
    let (lo, hi) = bounds[level];
    if level + 1 == bounds.len() {
        let snapshot = point.clone();
        let mut local = snapshot;
        return integrate_1d(
            |x| {
                local[level] = x;
                f(&local)
            },
            lo,
            hi,
            spec,
        );
    }
    let cell = RefCell::new(point.clone());
    integrate_1d(
        |x| {
            if failure.borrow().is_some() {
                return 0.0;
            }
            let mut p = cell.borrow_mut();
            p[level] = x;
            let mut inner_point = p.clone();
            drop(p);
            match nested_level(f, bounds, level + 1, &mut inner_point, spec, failure) {
                Ok(v) => v,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    0.0
                }
            }
        },
        lo,
        hi,
        spec,
    )
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = 0.0;
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * x * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (x * p0 - p1) / (x * x - 1.0);
            let dx = p0 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// A Gauss-Legendre rule replicated over equal panels of an interval.
#[derive(Debug, Clone)]
pub struct CompositeRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl CompositeRule {
    pub fn new(a: f64, b: f64, panels: usize, order: usize) -> Self {
        let (x, w) = gauss_legendre(order);
        let h = (b - a) / panels as f64;
        let mut nodes = Vec::with_capacity(panels * order);
        let mut weights = Vec::with_capacity(panels * order);
        for p in 0..panels {
            let c = a + (p as f64 + 0.5) * h;
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push(c + 0.5 * h * xi);
                weights.push(0.5 * h * wi);
            }
        }
        CompositeRule { nodes, weights }
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(*x)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let v = integrate_1d(|x| x * x * x - 2.0 * x, 0.0, 3.0, &QuadratureSpec::standard()).unwrap();
        assert!((v - (81.0 / 4.0 - 9.0)).abs() < 1e-12);
    }

    #[test]
    fn semi_infinite_both_maps() {
        let exp = QuadratureSpec::standard().with_map(SemiInfiniteMap::Exponential);
        let v = integrate_1d(|x| (-x).exp(), 0.0, f64::INFINITY, &exp).unwrap();
        assert!((v - 1.0).abs() < 1e-10);
        let v = integrate_1d(|x| 1.0 / (1.0 + x * x), 0.0, f64::INFINITY, &QuadratureSpec::standard()).unwrap();
        assert!((v - std::f64::consts::FRAC_PI_2).abs() < 1e-9);
    }

    #[test]
    fn reversed_bounds_flip_sign() {
        let spec = QuadratureSpec::standard();
        let v = integrate_1d(|x| x.cos(), 1.0, 0.0, &spec).unwrap();
        assert!((v + 1f64.sin()).abs() < 1e-12);
    }

    #[test]
    fn discontinuity_resolved() {
        let v = integrate_1d(|x| if x < 0.3 { 1.0 } else { 0.0 }, 0.0, 1.0, &QuadratureSpec::standard()).unwrap();
        assert!((v - 0.3).abs() < 1e-8);
    }

    #[test]
    fn non_finite_integrand_is_an_error() {
        let r = integrate_1d(|x| 1.0 / (x - 0.5), 0.0, 1.0, &QuadratureSpec::standard());
        assert!(r.is_err());
    }

    #[test]
    fn nested_box() {
        let v = integrate_nd(
            |p| p[0] * p[1] * p[2],
            &[(0.0, 1.0), (0.0, 2.0), (0.0, 3.0)],
            &QuadratureSpec::nested(),
        )
        .unwrap();
        assert!((v - 0.5 * 2.0 * 4.5).abs() < 1e-9);
    }

    #[test]
    fn legendre_rule_integrates_degree_2n_minus_1() {
        let (x, w) = gauss_legendre(6);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(10)).sum();
        assert!((s - 2.0 / 11.0).abs() < 1e-14);
        let rule = CompositeRule::new(0.0, 2.0, 3, 8);
        assert!((rule.integrate(|x| x.exp()) - (2f64.exp() - 1.0)).abs() < 1e-12);
    }
}
