//! Accumulated weight `I(rho) = int_0^rho f^2`: exact for the fisheye, by
//! adaptive quadrature for any other exponent.

mod antiderivative;
pub mod quadrature;

pub use antiderivative::{
    antiderivative_i, eval_antiderivative, integrand_exact, ClosedFormAntiderivative, RationalTerm,
};

use crate::error::{Error, Result};
use crate::model::check_kappa;
use crate::radial::zero_mode_real;

/// Smallest tolerance accepted by [`quad_i`].
pub const MIN_TOL: f64 = 1e-13;

/// Tolerance used when quadrature stands in for the closed form.
pub const DEFAULT_TOL: f64 = 1e-12;

fn squared_zero_mode(kappa: f64, l: u32) -> impl Fn(f64) -> f64 {
    let l = f64::from(l);
    move |rho| zero_mode_real(kappa, l, rho).powi(2)
}

/// Adaptive quadrature of `f^2` over `[0, rho]` to relative tolerance `tol`.
pub fn quad_i(kappa: f64, l: u32, rho: f64, tol: f64) -> Result<f64> {
    check_kappa(kappa)?;
    if !(tol >= MIN_TOL && tol.is_finite()) {
        return Err(Error::invalid(format!(
            "quadrature tolerance must be >= {MIN_TOL:e}, got {tol}"
        )));
    }
    if !(rho >= 0.0 && rho.is_finite()) {
        return Err(Error::invalid(format!(
            "rho must be finite and >= 0, got {rho}"
        )));
    }
    if rho == 0.0 {
        return Ok(0.0);
    }
    quadrature::integrate(squared_zero_mode(kappa, l), 0.0, rho, 0.0, tol).map(|q| q.value)
}

/// `I(rho)` for any exponent: closed form when `kappa == 1`, quadrature
/// otherwise.
pub fn integral_i(kappa: f64, l: u32, rho: f64) -> Result<f64> {
    check_kappa(kappa)?;
    if kappa == 1.0 {
        if !(rho >= 0.0) {
            return Err(Error::invalid(format!("rho must be >= 0, got {rho}")));
        }
        Ok(antiderivative_i(l).eval(rho))
    } else {
        quad_i(kappa, l, rho, DEFAULT_TOL)
    }
}

/// `lim I(rho)` as `rho -> inf`, finite for `l >= 1`.
///
/// For general `kappa` the range is split at 1 and the tail is mapped through
/// `rho = 1/t`, which turns it into `int_0^1 t^(2l-2) (1+t^(2k))^(-(2l+1)/k) dt`.
pub fn i_infinity(kappa: f64, l: u32) -> Result<f64> {
    check_kappa(kappa)?;
    if l == 0 {
        return Err(Error::Divergence(
            "I(rho) grows without bound for l = 0".to_string(),
        ));
    }
    if kappa == 1.0 {
        return antiderivative_i(l)
            .limit()
            .ok_or_else(|| Error::Divergence(format!("closed form for l = {l} has no limit")));
    }
    let head = quadrature::integrate(squared_zero_mode(kappa, l), 0.0, 1.0, 0.0, MIN_TOL)?;
    let lf = f64::from(l);
    let exponent = -(2.0 * lf + 1.0) / kappa;
    let tail = quadrature::integrate(
        move |t: f64| t.powf(2.0 * lf - 2.0) * (1.0 + t.powf(2.0 * kappa)).powf(exponent),
        0.0,
        1.0,
        0.0,
        MIN_TOL,
    )?;
    Ok(head.value + tail.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// Romberg integration, an independent scheme for smooth integrands.
    fn romberg<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
        let mut table: Vec<Vec<f64>> = Vec::new();
        let mut n = 1usize;
        let mut trap = 0.5 * (b - a) * (f(a) + f(b));
        for level in 0..22 {
            if level > 0 {
                let h = (b - a) / (2 * n) as f64;
                let mid: f64 = (0..n).map(|i| f(a + (2 * i + 1) as f64 * h)).sum();
                trap = 0.5 * trap + h * mid;
                n *= 2;
            }
            let mut row = vec![trap];
            for m in 1..=level {
                let p = 4f64.powi(m as i32);
                let prev = &table[level - 1];
                row.push((p * row[m - 1] - prev[m - 1]) / (p - 1.0));
            }
            if level > 4 {
                let prev = table[level - 1][level - 1];
                if (row[level] - prev).abs() < 1e-14 * row[level].abs() {
                    return row[level];
                }
            }
            table.push(row);
        }
        table.last().unwrap().last().copied().unwrap()
    }

    #[test]
    fn quadrature_matches_closed_form_examples() {
        let a = quad_i(1.0, 0, 1.0, 1e-12).unwrap();
        assert!((a - (1.0 - PI / 4.0)).abs() < 1e-13);
        let b = quad_i(1.0, 1, 1.0, 1e-12).unwrap();
        assert!((b - 0.044_524_311_274_043_12).abs() < 1e-13);
    }

    #[test]
    fn general_kappa_two_schemes_agree() {
        let gk = quad_i(0.5, 1, 2.0, 1e-10).unwrap();
        let rb = romberg(|r| zero_mode_real(0.5, 1.0, r).powi(2), 0.0, 2.0);
        assert!(gk > 0.0);
        assert!((gk - rb).abs() < 1e-10 * rb, "{gk} {rb}");
    }

    #[test]
    fn quad_i_validates_inputs() {
        assert!(quad_i(1.0, 1, 1.0, 1e-14).is_err());
        assert!(quad_i(0.0, 1, 1.0, 1e-10).is_err());
        assert!(quad_i(1.0, 1, -1.0, 1e-10).is_err());
        assert_eq!(quad_i(1.0, 1, 0.0, 1e-10).unwrap(), 0.0);
    }

    #[test]
    fn i_infinity_examples() {
        assert!((i_infinity(1.0, 1).unwrap() - 3.0 * PI / 16.0).abs() < 1e-15);
        assert!((i_infinity(1.0, 2).unwrap() - 5.0 * PI / 256.0).abs() < 1e-16);
        assert!(matches!(i_infinity(1.0, 0), Err(Error::Divergence(_))));
        assert!(matches!(i_infinity(0.5, 0), Err(Error::Divergence(_))));
    }

    #[test]
    fn i_infinity_general_route_reproduces_fisheye() {
        // run the split-and-map route at kappa = 1 by nudging off the fast path
        for l in 1..6 {
            let head = quadrature::integrate(squared_zero_mode(1.0, l), 0.0, 1.0, 0.0, MIN_TOL)
                .unwrap()
                .value;
            let lf = f64::from(l);
            let tail = quadrature::integrate(
                |t: f64| t.powf(2.0 * lf - 2.0) * (1.0 + t * t).powf(-(2.0 * lf + 1.0)),
                0.0,
                1.0,
                0.0,
                MIN_TOL,
            )
            .unwrap()
            .value;
            let exact = i_infinity(1.0, l).unwrap();
            assert!((head + tail - exact).abs() < 1e-13 * exact, "l={l}");
        }
    }

    #[test]
    fn i_infinity_general_kappa_against_long_quadrature() {
        let lim = i_infinity(0.5, 2).unwrap();
        let long = quad_i(0.5, 2, 1e4, 1e-12).unwrap();
        // tail beyond 1e4 behaves like rho^-4 / 3
        let tail_bound = 1e4f64.powi(-3) / 3.0;
        assert!(lim > long);
        assert!(lim - long <= tail_bound * 1.01, "{lim} {long}");
    }
}
