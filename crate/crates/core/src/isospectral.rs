//! The strictly isospectral family `f_lambda = f / (I + lambda)`, its
//! impedance `Z_iso = (I + lambda) / f`, the impedance ratio
//! `R_l = Z_iso / Z = I + lambda`, and the location and drift of the ratio's
//! steepest rise.
//!
//! `R_l` itself is monotone and `Z_iso` diverges at both ends, so the peak is
//! taken as the maximum of `dR_l/drho = f^2`.

use crate::closed_form::{antiderivative_i, i_infinity, integral_i, quadrature};
use crate::error::{Error, Result};
use crate::model::{check_lambda, LensSpec};
use crate::radial::{log_derivative_real, require_positive_rho, zero_mode_f};

/// Upper end of the search for the slope maximum.
const PEAK_SEARCH_MAX: f64 = 10.0;
const PEAK_SCAN_POINTS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsoProfilePoint {
    pub rho: f64,
    /// `I(rho)`
    pub big_i: f64,
    /// `I(rho) + lambda`
    pub ratio: f64,
    /// `None` at the centre, where the impedance is singular.
    pub z_iso: Option<f64>,
    pub f_iso: f64,
}

pub fn iso_profile_point(spec: &LensSpec, rho: f64) -> Result<IsoProfilePoint> {
    let lambda = spec.require_lambda()?;
    let big_i = integral_i(spec.kappa(), spec.l(), rho)?;
    let ratio = big_i + lambda;
    let f = zero_mode_f(spec, rho);
    Ok(IsoProfilePoint {
        rho,
        big_i,
        ratio,
        z_iso: (rho > 0.0).then(|| ratio / f),
        f_iso: f / ratio,
    })
}

/// `I(rho) + lambda` for the lens exponent (closed form at `kappa = 1`).
pub fn iso_ratio(spec: &LensSpec, rho: f64) -> Result<f64> {
    let lambda = spec.require_lambda()?;
    Ok(integral_i(spec.kappa(), spec.l(), rho)? + lambda)
}

/// Isospectral impedance `(I + lambda) / f`.
pub fn iso_impedance(spec: &LensSpec, rho: f64) -> Result<f64> {
    require_positive_rho("isospectral impedance", rho)?;
    Ok(iso_ratio(spec, rho)? / zero_mode_f(spec, rho))
}

/// Deformed zero mode `f / (I + lambda)`.
pub fn iso_zero_mode(spec: &LensSpec, rho: f64) -> Result<f64> {
    let lambda = spec.require_lambda()?;
    if rho == 0.0 {
        return Ok(0.0);
    }
    if !(rho > 0.0) {
        return Err(Error::invalid(format!("rho must be >= 0, got {rho}")));
    }
    Ok(zero_mode_f(spec, rho) / (integral_i(spec.kappa(), spec.l(), rho)? + lambda))
}

/// Fisheye impedance ratio `R_l(rho) = I_{1,l}(rho) + lambda`.
pub fn ratio_r(l: u32, lambda: f64, rho: f64) -> Result<f64> {
    check_lambda(lambda)?;
    if !(rho >= 0.0) {
        return Err(Error::invalid(format!("rho must be >= 0, got {rho}")));
    }
    Ok(antiderivative_i(l).eval(rho) + lambda)
}

/// `int_0^inf f_lambda^2` by quadrature.
pub fn iso_norm_squared(spec: &LensSpec) -> Result<f64> {
    let lambda = spec.require_lambda()?;
    if spec.l() == 0 {
        return Err(Error::Divergence(
            "the l = 0 zero mode is not square integrable".to_string(),
        ));
    }
    let (kappa, l) = (spec.kappa(), spec.l());
    let integrand = |rho: f64| -> f64 {
        if rho <= 0.0 {
            return 0.0;
        }
        let big_i = integral_i(kappa, l, rho).unwrap_or(f64::NAN);
        (zero_mode_f(spec, rho) / (big_i + lambda)).powi(2)
    };
    let est = quadrature::integrate_to_infinity(integrand, 0.0, 0.0, 1e-12)?;
    if !est.value.is_finite() {
        return Err(Error::convergence(
            "isospectral norm quadrature produced a non-finite value",
        ));
    }
    Ok(est.value)
}

/// `1/lambda - 1/(I_inf + lambda)`, the norm the family must carry.
pub fn iso_norm_identity(spec: &LensSpec) -> Result<f64> {
    let lambda = spec.require_lambda()?;
    let i_inf = i_infinity(spec.kappa(), spec.l())?;
    Ok(1.0 / lambda - 1.0 / (i_inf + lambda))
}

fn require_peaked(l: u32) -> Result<()> {
    if l == 0 {
        Err(Error::invalid(
            "l = 0 ratio rises steadily and has no slope maximum",
        ))
    } else {
        Ok(())
    }
}

/// Slope-maximum position `sqrt(1 + 1/l)` of the fisheye ratio.
pub fn peak_position(l: u32) -> Result<f64> {
    require_peaked(l)?;
    Ok((1.0 + 1.0 / f64::from(l)).sqrt())
}

/// Maximizer of `f^2` located by bisection on `f'/f`, for real `l > 0`.
pub fn slope_maximizer(kappa: f64, l: f64) -> Result<f64> {
    let ld = |rho: f64| log_derivative_real(kappa, l, rho);
    let step = PEAK_SEARCH_MAX / PEAK_SCAN_POINTS as f64;
    let mut lo = None;
    let mut hi = None;
    for i in 1..=PEAK_SCAN_POINTS {
        let rho = step * i as f64;
        if ld(rho) <= 0.0 {
            lo = Some(rho - step);
            hi = Some(rho);
            break;
        }
    }
    let (mut lo, mut hi) = match (lo, hi) {
        (Some(a), Some(b)) => (a.max(f64::MIN_POSITIVE), b),
        _ => {
            return Err(Error::convergence(format!(
                "no maximum of f^2 in (0, {PEAK_SEARCH_MAX}] for kappa={kappa}, l={l}"
            )))
        }
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if ld(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Numerical slope-maximum position for the fisheye.
pub fn peak_position_numeric(l: u32) -> Result<f64> {
    require_peaked(l)?;
    slope_maximizer(1.0, f64::from(l))
}

/// Drift of the peak with angular momentum, `d rho_M / dl = -1/(2l sqrt(l(l+1)))`.
pub fn peak_velocity(l: u32) -> Result<f64> {
    require_peaked(l)?;
    let l = f64::from(l);
    Ok(-1.0 / (2.0 * l * (l * (l + 1.0)).sqrt()))
}
