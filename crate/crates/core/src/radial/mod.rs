//! Closed-form evaluation of the DO potential, its nodeless zero mode and
//! impedance, the superpotential and the SUSY partner potential, and the
//! Langer map of the fisheye case onto a `sech^2` well.
//!
//! Throughout, `f(rho) = rho^(l+1) (1 + rho^(2k))^(-(2l+1)/(2k))` is the zero
//! mode and `L = f'/f` its logarithmic derivative (the negative
//! superpotential).

pub mod scattering;

use crate::error::{Error, Result};
use crate::model::LensSpec;

pub use scattering::{reflectivity, ReflectionResult};

/// Radius up to which the zero mode is evaluated by direct powers.
const DIRECT_RHO_MAX: f64 = 10.0;
const DIRECT_L_MAX: u32 = 30;

/// Sturmian coupling `(2l+1)(2l+2kappa+1)` for which the zero mode solves the
/// zero-energy radial equation.
pub fn coupling_w(kappa: f64, l: u32) -> f64 {
    let l = f64::from(l);
    (2.0 * l + 1.0) * (2.0 * l + 2.0 * kappa + 1.0)
}

pub(crate) fn require_positive_rho(quantity: &'static str, rho: f64) -> Result<()> {
    if rho > 0.0 && rho.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain { quantity, rho })
    }
}

/// Returns `(s/(1+s), 1/(1+s))` with `s = rho^(2kappa)`, stable for any `rho > 0`.
pub(crate) fn saturation(kappa: f64, rho: f64) -> (f64, f64) {
    let t = 2.0 * kappa * rho.ln();
    if t <= 0.0 {
        let s = t.exp();
        (s / (1.0 + s), 1.0 / (1.0 + s))
    } else {
        let r = (-t).exp();
        (1.0 / (1.0 + r), r / (1.0 + r))
    }
}

/// `ln(1 + rho^(2kappa))` without overflow.
fn ln_one_plus_pow(kappa: f64, rho: f64) -> f64 {
    let t = 2.0 * kappa * rho.ln();
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

pub(crate) fn potential_value(kappa: f64, w: f64, rho: f64) -> f64 {
    -w * rho.powf(2.0 * kappa - 2.0) / (1.0 + rho.powf(2.0 * kappa)).powi(2)
}

/// DO focusing potential `-w rho^(2k-2) / (1+rho^(2k))^2`.
pub fn potential_v(spec: &LensSpec, rho: f64) -> Result<f64> {
    require_positive_rho("potential", rho)?;
    Ok(potential_value(spec.kappa(), spec.w(), rho))
}

pub(crate) fn zero_mode_direct(kappa: f64, l: f64, rho: f64) -> f64 {
    rho.powf(l + 1.0) * (1.0 + rho.powf(2.0 * kappa)).powf(-(2.0 * l + 1.0) / (2.0 * kappa))
}

pub(crate) fn zero_mode_log(kappa: f64, l: f64, rho: f64) -> f64 {
    ((l + 1.0) * rho.ln() - (2.0 * l + 1.0) / (2.0 * kappa) * ln_one_plus_pow(kappa, rho)).exp()
}

/// Zero mode for a real angular momentum.
pub(crate) fn zero_mode_real(kappa: f64, l: f64, rho: f64) -> f64 {
    if rho == 0.0 {
        0.0
    } else if rho <= DIRECT_RHO_MAX && l <= f64::from(DIRECT_L_MAX) {
        zero_mode_direct(kappa, l, rho)
    } else {
        zero_mode_log(kappa, l, rho)
    }
}

/// Nodeless zero mode `f(rho)`. Zero at the origin, positive elsewhere,
/// decaying like `rho^(-l)`. Negative radii give NaN.
pub fn zero_mode_f(spec: &LensSpec, rho: f64) -> f64 {
    if rho < 0.0 {
        return f64::NAN;
    }
    zero_mode_real(spec.kappa(), spec.l_real(), rho)
}

/// Orbital impedance `1/f`, singular at the lens centre.
pub fn impedance_z(spec: &LensSpec, rho: f64) -> Result<f64> {
    require_positive_rho("impedance", rho)?;
    Ok(1.0 / zero_mode_f(spec, rho))
}

pub(crate) fn log_derivative_real(kappa: f64, l: f64, rho: f64) -> f64 {
    let (sat, _) = saturation(kappa, rho);
    ((l + 1.0) - (2.0 * l + 1.0) * sat) / rho
}

/// `d/drho (f'/f)`.
pub(crate) fn log_derivative_slope(kappa: f64, l: f64, rho: f64) -> f64 {
    let (sat, cosat) = saturation(kappa, rho);
    -((l + 1.0) + (2.0 * l + 1.0) * sat * ((2.0 * kappa - 1.0) * cosat - sat)) / (rho * rho)
}

/// `f'/f = (l+1)/rho - (2l+1) rho^(2k-1) / (1+rho^(2k))`.
pub fn log_derivative(spec: &LensSpec, rho: f64) -> Result<f64> {
    require_positive_rho("log-derivative", rho)?;
    Ok(log_derivative_real(spec.kappa(), spec.l_real(), rho))
}

/// Analytic `f''`, from `f''/f = (f'/f)^2 + (f'/f)'`.
pub fn zero_mode_second_derivative(spec: &LensSpec, rho: f64) -> Result<f64> {
    require_positive_rho("zero-mode curvature", rho)?;
    let (k, l) = (spec.kappa(), spec.l_real());
    let ld = log_derivative_real(k, l, rho);
    Ok(zero_mode_f(spec, rho) * (ld * ld + log_derivative_slope(k, l, rho)))
}

/// The scattering ("fermionic") partner potential written term by term:
///
/// `l(l-1)/rho^2 - (2l+1)(2l-2k-1) / [rho^(2(1-k)) (1+rho^(2k))^2] + 2(2l+1) / [rho^2 (1+rho^(2k))^2]`
pub(crate) fn u_plus(kappa: f64, l: f64, rho: f64) -> f64 {
    let d = (1.0 + rho.powf(2.0 * kappa)).powi(2);
    let r2 = rho * rho;
    l * (l - 1.0) / r2
        - (2.0 * l + 1.0) * (2.0 * l - 2.0 * kappa - 1.0) / (rho.powf(2.0 * (1.0 - kappa)) * d)
        + 2.0 * (2.0 * l + 1.0) / (r2 * d)
}

pub fn partner_potential_plus(spec: &LensSpec, rho: f64) -> Result<f64> {
    require_positive_rho("partner potential", rho)?;
    Ok(u_plus(spec.kappa(), spec.l_real(), rho))
}

/// Partner potential built from the superpotential `W = -f'/f`:
/// `W^2 + W' = 2 (f'/f)^2 - f''/f`, with `f''/f` taken from the zero-energy
/// equation.
pub fn partner_potential_plus_susy(spec: &LensSpec, rho: f64) -> Result<f64> {
    require_positive_rho("partner potential", rho)?;
    let l = spec.l_real();
    let ld = log_derivative_real(spec.kappa(), l, rho);
    let curvature = l * (l + 1.0) / (rho * rho) + potential_value(spec.kappa(), spec.w(), rho);
    Ok(2.0 * ld * ld - curvature)
}

/// `|-f'' + (l(l+1)/rho^2 + V) f|` for the lens coupling.
pub fn residual_zero_energy(spec: &LensSpec, rho: f64) -> Result<f64> {
    residual_with_coupling(spec, rho, spec.w())
}

/// Zero-energy residual with the potential strength overridden by `w`.
pub fn residual_with_coupling(spec: &LensSpec, rho: f64, w: f64) -> Result<f64> {
    let f2 = zero_mode_second_derivative(spec, rho)?;
    let l = spec.l_real();
    let q = l * (l + 1.0) / (rho * rho) + potential_value(spec.kappa(), w, rho);
    Ok((-f2 + q * zero_mode_f(spec, rho)).abs())
}

/// The fisheye radial problem after `rho = e^x`, `psi = e^(x/2) phi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LangerMap {
    /// Nodeless quantum number `l + 1`.
    pub n: u32,
    /// Depth of the resulting `sech^2` well, `n^2 - 1/4`.
    pub strength: f64,
    /// Constant offset `(n - 1/2)^2`.
    pub shift: f64,
}

pub fn langer_map(l: u32) -> LangerMap {
    let n = l + 1;
    let nf = f64::from(n);
    LangerMap {
        n,
        strength: nf * nf - 0.25,
        shift: (nf - 0.5) * (nf - 0.5),
    }
}

/// `e^(2x) V_1(e^x) + (l + 1/2)^2`, evaluated through the fisheye potential.
pub fn langer_transformed_potential(l: u32, x: f64) -> f64 {
    let rho = x.exp();
    let w = coupling_w(1.0, l);
    (2.0 * x).exp() * potential_value(1.0, w, rho) + langer_map(l).shift
}

/// Index `s` of a `sech^2` well, defined by `s(s+1) = strength`.
pub fn sech2_index(strength: f64) -> f64 {
    0.5 * ((1.0 + 4.0 * strength).sqrt() - 1.0)
}

/// Distance of a well's index from the nearest integer; zero exactly for the
/// reflectionless strengths `n(n+1)`.
pub fn reflection_defect_for_strength(strength: f64) -> f64 {
    let s = sech2_index(strength);
    (s - s.round()).abs()
}

/// Reflection defect of the fisheye well for angular momentum `l`.
pub fn reflection_defect(l: u32) -> f64 {
    reflection_defect_for_strength(langer_map(l).strength)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::make_lens_spec;

    fn spec(kappa: f64, l: u32) -> LensSpec {
        make_lens_spec(kappa, l, None).unwrap()
    }

    #[test]
    fn coupling_values() {
        assert_eq!(coupling_w(1.0, 1), 15.0);
        assert_eq!(coupling_w(1.0, 0), 3.0);
        assert_eq!(coupling_w(0.5, 0), 2.0);
    }

    #[test]
    fn coupling_is_the_only_zero_residual_strength() {
        // scan w around the derived value; the residual vanishes only there
        let s = spec(1.0, 1);
        let grid: Vec<f64> = (1..=50).map(|i| 0.2 * f64::from(i)).collect();
        let worst = |w: f64| {
            grid.iter()
                .map(|&r| residual_with_coupling(&s, r, w).unwrap())
                .fold(0.0, f64::max)
        };
        assert!(worst(15.0) <= 1e-8);
        for w in [13.0, 14.0, 14.9, 15.1, 16.0] {
            assert!(worst(w) > 1e-3, "w={w}");
        }
    }

    #[test]
    fn potential_examples() {
        assert_eq!(potential_v(&spec(1.0, 1), 1.0).unwrap(), -3.75);
        assert!(potential_v(&spec(1.0, 0), 100.0).unwrap().abs() < 3e-7);
        assert_eq!(potential_v(&spec(0.5, 0), 1.0).unwrap(), -0.5);
        assert!(potential_v(&spec(1.0, 0), 0.0).is_err());
        assert!(potential_v(&spec(1.0, 0), -1.0).is_err());
    }

    #[test]
    fn potential_matches_unsimplified_form() {
        for kappa in [0.5, 1.0, 2.0] {
            for l in 0..4 {
                let s = spec(kappa, l);
                for rho in [0.05f64, 0.3, 1.0, 2.7, 9.0] {
                    let reciprocal_form =
                        -s.w() / (rho * rho * (rho.powf(-kappa) + rho.powf(kappa)).powi(2));
                    let v = potential_v(&s, rho).unwrap();
                    assert!(
                        (v - reciprocal_form).abs() <= 1e-13 * v.abs(),
                        "{kappa} {l} {rho}"
                    );
                }
            }
        }
    }

    #[test]
    fn zero_mode_examples() {
        let f = zero_mode_f(&spec(1.0, 1), 1.0);
        assert!((f - 2f64.powf(-1.5)).abs() < 1e-16);
        assert_eq!(zero_mode_f(&spec(1.0, 0), 0.0), 0.0);
        let at_peak = zero_mode_f(&spec(1.0, 1), 2f64.sqrt());
        assert!((at_peak - 2.0 / 3f64.powf(1.5)).abs() < 1e-15);
        assert!(zero_mode_f(&spec(1.0, 1), -0.5).is_nan());
    }

    #[test]
    fn zero_mode_maximum_by_scan() {
        // brute-force maximisation on a fine grid
        let s = spec(1.0, 1);
        let (mut best_rho, mut best) = (0.0, 0.0);
        for i in 1..200_000 {
            let rho = f64::from(i) * 5e-5;
            let f = zero_mode_f(&s, rho);
            if f > best {
                best = f;
                best_rho = rho;
            }
        }
        assert!((best_rho - 2f64.sqrt()).abs() < 1e-4);
        assert!((best - 0.384_900_179_459_750_5).abs() < 1e-9);
    }

    #[test]
    fn direct_and_log_forms_agree() {
        for kappa in [0.5, 1.0, 2.0, 3.0] {
            for l in [0.0, 1.0, 4.0, 12.0, 30.0] {
                for rho in [1e-3, 0.2, 1.0, 3.3, 10.0] {
                    let a = zero_mode_direct(kappa, l, rho);
                    let b = zero_mode_log(kappa, l, rho);
                    assert!((a - b).abs() <= 1e-12 * a, "{kappa} {l} {rho}: {a} {b}");
                }
            }
        }
    }

    #[test]
    fn zero_mode_large_radius_asymptote() {
        let s = spec(1.0, 3);
        for rho in [1e3, 1e6, 1e12] {
            let f = zero_mode_f(&s, rho);
            assert!((f * rho.powi(3) - 1.0).abs() < 1e-5, "{rho} {f}");
        }
    }

    #[test]
    fn impedance_examples() {
        let z = impedance_z(&spec(1.0, 1), 1.0).unwrap();
        assert!((z - 2f64.powf(1.5)).abs() < 1e-15);
        let z = impedance_z(&spec(1.0, 2), 1.0).unwrap();
        assert!((z - 2f64.powf(2.5)).abs() < 1e-14);
        assert!(matches!(
            impedance_z(&spec(1.0, 0), 0.0),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn log_derivative_examples() {
        assert_eq!(log_derivative(&spec(1.0, 1), 1.0).unwrap(), 0.5);
        assert!(log_derivative(&spec(1.0, 1), 2f64.sqrt()).unwrap().abs() < 1e-15);
        // f = rho/sqrt(1+rho^2): 1 - 1/2
        assert_eq!(log_derivative(&spec(1.0, 0), 1.0).unwrap(), 0.5);
        assert!(log_derivative(&spec(1.0, 0), 0.0).is_err());
    }

    #[test]
    fn log_derivative_vanishes_where_finite_difference_does() {
        let s = spec(1.0, 1);
        let h = 1e-5;
        let rho = 2f64.sqrt();
        let fd = (zero_mode_f(&s, rho + h).ln() - zero_mode_f(&s, rho - h).ln()) / (2.0 * h);
        assert!(fd.abs() < 1e-9);
    }

    #[test]
    fn log_derivative_second_order_convergence() {
        for kappa in [0.5, 1.0, 2.0] {
            for l in [0, 2, 5] {
                let s = spec(kappa, l);
                for rho in [0.4, 1.3, 3.0] {
                    let exact = log_derivative(&s, rho).unwrap();
                    let err = |h: f64| {
                        let fd = (zero_mode_f(&s, rho + h).ln() - zero_mode_f(&s, rho - h).ln())
                            / (2.0 * h);
                        (fd - exact).abs()
                    };
                    let (e1, e2, e3) = (err(1e-2), err(1e-3), err(1e-4));
                    let slope12 = (e1 / e2).log10();
                    let slope23 = (e2 / e3).log10();
                    assert!((slope12 - 2.0).abs() < 0.2, "{kappa} {l} {rho}: {slope12}");
                    assert!((slope23 - 2.0).abs() < 0.3, "{kappa} {l} {rho}: {slope23}");
                }
            }
        }
    }

    #[test]
    fn partner_potential_examples() {
        let u = partner_potential_plus(&spec(1.0, 1), 1.0).unwrap();
        assert!((u - 2.25).abs() < 1e-15);
        // 0 - 1*(-3)/4 + 2/4
        let u = partner_potential_plus(&spec(1.0, 0), 1.0).unwrap();
        assert!((u - 1.25).abs() < 1e-15);
        let u = partner_potential_plus_susy(&spec(1.0, 1), 1.0).unwrap();
        assert!((u - 2.25).abs() < 1e-14);
        let u = partner_potential_plus_susy(&spec(1.0, 0), 1.0).unwrap();
        assert!((u - 1.25).abs() < 1e-14);
        let s = spec(0.5, 0);
        let a = partner_potential_plus(&s, 1.0).unwrap();
        let b = partner_potential_plus_susy(&s, 1.0).unwrap();
        assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn partner_potential_small_rho_limit() {
        // U+ rho^2 -> (l+1)(l+2) at the origin
        let s = spec(1.0, 1);
        let mut prev = f64::INFINITY;
        for rho in [1e-2, 1e-3, 1e-4] {
            let scaled = partner_potential_plus(&s, rho).unwrap() * rho * rho;
            let gap = (scaled - 6.0).abs();
            assert!(gap < prev);
            prev = gap;
        }
        assert!(prev < 1e-6);
    }

    #[test]
    fn residual_examples() {
        assert!(residual_zero_energy(&spec(1.0, 1), 1.0).unwrap() <= 1e-12);
        assert!(residual_zero_energy(&spec(0.5, 2), 2.0).unwrap() <= 1e-12);
        let forced = residual_with_coupling(&spec(1.0, 1), 1.0, 14.0).unwrap();
        // f(1) * (15 - 14) / 4
        assert!((forced - 2f64.powf(-1.5) / 4.0).abs() < 1e-12);
        assert!(forced > 0.01);
    }

    #[test]
    fn langer_examples() {
        let m = langer_map(0);
        assert_eq!((m.n, m.strength, m.shift), (1, 0.75, 0.25));
        assert_eq!(langer_map(1).strength, 3.75);
        assert_eq!(langer_map(2).strength, 8.75);
        assert!((langer_transformed_potential(0, 0.0) + 0.5).abs() < 1e-15);
        let lm = langer_map(1);
        let at8 = langer_transformed_potential(1, 8.0);
        assert!((at8 - (lm.shift - lm.strength / 8f64.cosh().powi(2))).abs() < 1e-12);
        assert!((langer_transformed_potential(1, 9.0) - 2.25).abs() < 1e-6);
        assert!((langer_transformed_potential(1, 0.0) + 1.5).abs() < 1e-15);
    }

    #[test]
    fn reflection_defect_is_half_for_fisheye() {
        for l in 0..10 {
            assert_eq!(reflection_defect(l), 0.5);
        }
        assert_eq!(reflection_defect_for_strength(2.0), 0.0);
        assert_eq!(reflection_defect_for_strength(6.0), 0.0);
    }
}
