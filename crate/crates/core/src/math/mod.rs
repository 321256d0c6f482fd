//! Special functions and quadrature shared by the analytical models.

pub mod gamma;
pub mod lambert;
pub mod quad;

pub use gamma::{exp_integral_e1, gamma, ln_gamma, upper_incomplete_gamma};
pub use lambert::{lambert_w0, lambert_w0_exp};
pub use quad::{gauss_legendre, integrate_1d, integrate_nd, CompositeRule, QuadratureSpec, SemiInfiniteMap};

/// Binomial coefficient as a float, exact for the small orders used here.
pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut c = 1.0;
    for i in 0..k {
        c = c * (n - i) as f64 / (i + 1) as f64;
    }
    c.round()
}
