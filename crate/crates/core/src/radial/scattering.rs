//! One-dimensional scattering off the well `-strength / cosh^2 x`.
//!
//! The equation `phi'' = -(k^2 + strength sech^2 x) phi` is integrated from
//! `+X` (pure transmitted wave `e^{ikx}`) back to `-X` with an adaptive
//! Dormand-Prince 5(4) scheme, and the solution there is split into incident
//! and reflected plane waves.

use num::complex::Complex64;

use crate::error::{Error, Result};

const LOCAL_TOL: f64 = 1e-12;
const UNITARITY_LIMIT: f64 = 1e-6;
const MAX_STEPS: usize = 5_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReflectionResult {
    pub k: f64,
    /// `|R|^2`
    pub r2: f64,
    /// `|T|^2`
    pub t2: f64,
    /// `|r2 + t2 - 1|`
    pub unitarity_residual: f64,
}

/// Half-width of the integration box: at least 10, at least 12/k, and wide
/// enough that the potential tail `4 strength e^(-2X)` is below 1e-12.
pub fn box_half_width(strength: f64, k: f64) -> f64 {
    let tail = 0.5 * (4.0 * strength * 1e12).ln();
    10f64.max(12.0 / k).max(tail)
}

pub fn reflectivity(strength: f64, k: f64) -> Result<ReflectionResult> {
    if !(strength.is_finite() && strength > 0.0) {
        return Err(Error::invalid(format!(
            "strength must be > 0, got {strength}"
        )));
    }
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::invalid(format!("wavenumber must be > 0, got {k}")));
    }
    let x_max = box_half_width(strength, k);
    let k2 = k * k;
    let rhs = |x: f64, y: &[f64; 4]| -> [f64; 4] {
        let sech = 1.0 / x.cosh();
        let q = k2 + strength * sech * sech;
        [y[2], y[3], -q * y[0], -q * y[1]]
    };

    let ik = Complex64::new(0.0, k);
    let phi = (ik * x_max).exp();
    let dphi = ik * phi;
    let y0 = [phi.re, phi.im, dphi.re, dphi.im];
    let y = integrate(rhs, x_max, -x_max, y0)?;

    let x = -x_max;
    let phi = Complex64::new(y[0], y[1]);
    let dphi = Complex64::new(y[2], y[3]);
    let incident = (-ik * x).exp() * (ik * phi + dphi) / (2.0 * ik);
    let reflected = (ik * x).exp() * (ik * phi - dphi) / (2.0 * ik);

    let norm = incident.norm_sqr();
    let r2 = reflected.norm_sqr() / norm;
    let t2 = 1.0 / norm;
    let unitarity_residual = (r2 + t2 - 1.0).abs();
    if unitarity_residual > UNITARITY_LIMIT {
        return Err(Error::convergence(format!(
            "scattering solve at strength={strength}, k={k} violates unitarity by {unitarity_residual:e}"
        )));
    }
    Ok(ReflectionResult {
        k,
        r2,
        t2,
        unitarity_residual,
    })
}

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

fn integrate<F>(rhs: F, x0: f64, x1: f64, y0: [f64; 4]) -> Result<[f64; 4]>
where
    F: Fn(f64, &[f64; 4]) -> [f64; 4],
{
    let dir = (x1 - x0).signum();
    let mut x = x0;
    let mut y = y0;
    let mut h = 1e-3 * dir;
    let mut k = [[0.0; 4]; 7];
    k[0] = rhs(x, &y);

    for _ in 0..MAX_STEPS {
        if (x1 - x) * dir <= 0.0 {
            return Ok(y);
        }
        if (x + h - x1) * dir > 0.0 {
            h = x1 - x;
        }

        for s in 1..7 {
            let mut ys = y;
            for (i, yi) in ys.iter_mut().enumerate() {
                *yi += h * (0..s).map(|j| A[s][j] * k[j][i]).sum::<f64>();
            }
            k[s] = rhs(x + C[s] * h, &ys);
        }

        let mut y_new = y;
        let mut err: f64 = 0.0;
        for i in 0..4 {
            let mut hi5 = 0.0;
            let mut hi4 = 0.0;
            for s in 0..7 {
                hi5 += B5[s] * k[s][i];
                hi4 += B4[s] * k[s][i];
            }
            y_new[i] = y[i] + h * hi5;
            let scale = LOCAL_TOL + LOCAL_TOL * y[i].abs().max(y_new[i].abs());
            err = err.max((h * (hi5 - hi4)).abs() / scale);
        }

        if err <= 1.0 {
            x += h;
            y = y_new;
            // first-same-as-last: stage 7 is the derivative at the new point
            k[0] = k[6];
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
    }
    Err(Error::convergence(format!(
        "ODE integration from {x0} to {x1} exceeded {MAX_STEPS} steps"
    )))
}
