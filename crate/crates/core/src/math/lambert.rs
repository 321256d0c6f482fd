//! Principal branch of the Lambert W function.

use crate::error::{Error, Result};

const INV_E: f64 = 0.367_879_441_171_442_33;
const MAX_ITER: usize = 64;

/// Principal branch `W0(x)`, the solution `w >= -1` of `w * exp(w) = x`.
///
/// Defined for `x >= -1/e`. Halley iteration from a regime-dependent seed;
/// converges to a few ulps everywhere on the domain.
pub fn lambert_w0(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::domain("lambert_w0", "argument is NaN"));
    }
    if x < -INV_E {
        // Allow the branch point to be hit through rounding of -1/e itself.
        if x > -INV_E - 4.0 * f64::EPSILON {
            return Ok(-1.0);
        }
        return Err(Error::domain(
            "lambert_w0",
            format!("argument {x} is below -1/e"),
        ));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(f64::INFINITY);
    }

    let mut w = initial_guess(x);
    if x.abs() < 1e-8 {
        // Two terms of the Taylor series are exact to machine precision here.
        return Ok(w);
    }
    for _ in 0..MAX_ITER {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        if wp1 == 0.0 {
            return Ok(w);
        }
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        if denom == 0.0 || !denom.is_finite() {
            break;
        }
        let dw = f / denom;
        w -= dw;
        if dw.abs() <= 4.0 * f64::EPSILON * (1.0 + w.abs()) {
            return Ok(w);
        }
    }
    // Halley stalls only at the branch point where the derivative vanishes.
    if (w * w.exp() - x).abs() <= 1e-12 * (1.0 + x.abs()) {
        Ok(w)
    } else {
        Err(Error::no_converge("lambert_w0", format!("x = {x}")))
    }
}

fn initial_guess(x: f64) -> f64 {
    if x < -0.25 {
        // Series about the branch point in p = sqrt(2(e x + 1)).
        let p = (2.0 * (std::f64::consts::E * x + 1.0)).max(0.0).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else if x < 3.0 {
        if x.abs() < 1e-3 {
            x - x * x
        } else {
            // ln(1 + x) tracks W well on the middle range.
            0.8 * x.ln_1p()
        }
    } else {
        let l1 = x.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    }
}

/// `W0(exp(y))` computed without forming `exp(y)`.
///
/// Solves `w + ln(w) = y`, so it stays finite for arguments whose
/// exponential overflows.
pub fn lambert_w0_exp(y: f64) -> Result<f64> {
    if y.is_nan() {
        return Err(Error::domain("lambert_w0_exp", "argument is NaN"));
    }
    if y == f64::INFINITY {
        return Ok(f64::INFINITY);
    }
    if y < 20.0 {
        return lambert_w0(y.exp());
    }
    let ly = y.ln();
    let mut w = y - ly + ly / y;
    for _ in 0..MAX_ITER {
        let f = w + w.ln() - y;
        let dw = f / (1.0 + 1.0 / w);
        w -= dw;
        if dw.abs() <= 4.0 * f64::EPSILON * w {
            return Ok(w);
        }
    }
    Err(Error::no_converge("lambert_w0_exp", format!("y = {y}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_points() {
        assert_eq!(lambert_w0(0.0).unwrap(), 0.0);
        assert!((lambert_w0(std::f64::consts::E).unwrap() - 1.0).abs() < 1e-15);
        assert!((lambert_w0(-INV_E).unwrap() + 1.0).abs() < 1e-7);
        // Omega constant.
        assert!((lambert_w0(1.0).unwrap() - 0.567_143_290_409_783_8).abs() < 1e-15);
        assert!((lambert_w0(10.0).unwrap() - 1.745_528_002_740_699_4).abs() < 1e-14);
    }

    #[test]
    fn rejects_below_branch_point() {
        assert!(matches!(lambert_w0(-0.5), Err(Error::Domain { .. })));
        assert!(matches!(lambert_w0(f64::NAN), Err(Error::Domain { .. })));
    }

    #[test]
    fn exp_form_agrees_with_direct_form() {
        for y in [-30.0, -2.0, 0.0, 1.5, 19.0, 25.0, 60.0, 300.0] {
            let direct = lambert_w0((y as f64).exp()).unwrap();
            let viaexp = lambert_w0_exp(y).unwrap();
            assert!((direct - viaexp).abs() <= 1e-13 * (1.0 + direct.abs()), "{y}");
        }
        let huge = lambert_w0_exp(1e4).unwrap();
        assert!((huge + huge.ln() - 1e4).abs() < 1e-10);
    }
}
