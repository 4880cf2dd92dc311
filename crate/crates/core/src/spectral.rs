//! Orbital capacity `C+ = dU+/dl`, the stationary points of the partner
//! potential `U+(rho)`, and the critical angular momentum at which a
//! barrier/well pair (a quasi-bound pocket) is born.
//!
//! `l` is a continuous real here. `U+` is linear in three `l`-dependent
//! coefficients,
//!
//! ```text
//! U+ = A rho^-2 - B rho^(2k-2) t(rho) + C rho^-2 t(rho),   t = (1 + rho^(2k))^-2
//! A = l(l-1),  B = (2l+1)(2l-2k-1),  C = 2(2l+1)
//! ```
//!
//! so every mixed derivative in `rho` and `l` is the same radial expansion with
//! differentiated coefficients.

use crate::error::{Error, Result};
use crate::model::{check_kappa, ProfileTable};
use crate::radial::{require_positive_rho, u_plus};

/// Default angular-momentum search interval for [`critical_l`].
pub const DEFAULT_L_SEARCH: (f64, f64) = (1.0, 49.0);
/// Default radius guess for [`critical_l`].
pub const DEFAULT_RHO_GUESS: f64 = 1.5;
/// Tolerance on `|dU/drho|` (scaled by `max(1, |U|)`) for stationary points.
pub const STATIONARY_TOL: f64 = 1e-9;

const SCAN_POINTS: usize = 4000;
const L_SCAN_STEP: f64 = 0.1;
const MERGE_REL: f64 = 1e-5;
const NEWTON_MAX_ITER: usize = 100;
const NEWTON_MAX_HALVINGS: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StationaryKind {
    LocalMin,
    LocalMax,
    Inflection,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryPoint {
    pub rho: f64,
    pub kind: StationaryKind,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalPoint {
    pub rho_star: f64,
    pub l_star: f64,
    /// `(|dU/drho|, |d2U/drho2|)` at the solution.
    pub residuals: (f64, f64),
    /// `U+` at the solution.
    pub u_plus: f64,
}

#[derive(Debug, Clone, Copy)]
struct Coeffs {
    a: f64,
    b: f64,
    c: f64,
}

impl Coeffs {
    fn value(kappa: f64, l: f64) -> Self {
        Coeffs {
            a: l * (l - 1.0),
            b: (2.0 * l + 1.0) * (2.0 * l - 2.0 * kappa - 1.0),
            c: 2.0 * (2.0 * l + 1.0),
        }
    }

    fn l_derivative(kappa: f64, l: f64) -> Self {
        Coeffs {
            a: 2.0 * l - 1.0,
            b: 8.0 * l - 4.0 * kappa,
            c: 4.0,
        }
    }
}

/// `[p^(k) rho^(p-k)]` for k = 0..3.
fn power_derivs(p: f64, rho: f64) -> [f64; 4] {
    let x = rho.powf(p);
    [
        x,
        p * x / rho,
        p * (p - 1.0) * x / (rho * rho),
        p * (p - 1.0) * (p - 2.0) * x / (rho * rho * rho),
    ]
}

/// `t = (1+s)^-2` and its first three derivatives, `s = rho^(2k)`.
fn t_derivs(kappa: f64, rho: f64) -> [f64; 4] {
    let c = 2.0 * kappa;
    let s = power_derivs(c, rho);
    let inv = 1.0 / (1.0 + s[0]);
    let inv2 = inv * inv;
    let inv3 = inv2 * inv;
    let inv4 = inv3 * inv;
    let inv5 = inv4 * inv;
    [
        inv2,
        -2.0 * inv3 * s[1],
        6.0 * inv4 * s[1] * s[1] - 2.0 * inv3 * s[2],
        -24.0 * inv5 * s[1].powi(3) + 18.0 * inv4 * s[1] * s[2] - 2.0 * inv3 * s[3],
    ]
}

/// Leibniz rule for the product `u v` up to third order.
fn product_derivs(u: &[f64; 4], v: &[f64; 4]) -> [f64; 4] {
    [
        u[0] * v[0],
        u[1] * v[0] + u[0] * v[1],
        u[2] * v[0] + 2.0 * u[1] * v[1] + u[0] * v[2],
        u[3] * v[0] + 3.0 * u[2] * v[1] + 3.0 * u[1] * v[2] + u[0] * v[3],
    ]
}

/// `[U, dU/drho, d2U/drho2, d3U/drho3]` for the given coefficients.
fn radial_derivs(kappa: f64, coeffs: Coeffs, rho: f64) -> [f64; 4] {
    let t = t_derivs(kappa, rho);
    let inv_r2 = power_derivs(-2.0, rho);
    let g = product_derivs(&power_derivs(2.0 * kappa - 2.0, rho), &t);
    let h = product_derivs(&inv_r2, &t);
    let mut out = [0.0; 4];
    for k in 0..4 {
        out[k] = coeffs.a * inv_r2[k] - coeffs.b * g[k] + coeffs.c * h[k];
    }
    out
}

fn u_derivs(kappa: f64, l: f64, rho: f64) -> [f64; 4] {
    radial_derivs(kappa, Coeffs::value(kappa, l), rho)
}

fn ul_derivs(kappa: f64, l: f64, rho: f64) -> [f64; 4] {
    radial_derivs(kappa, Coeffs::l_derivative(kappa, l), rho)
}

/// `dU+/drho` at real `l`.
pub fn u_plus_slope(kappa: f64, l: f64, rho: f64) -> Result<f64> {
    check_kappa(kappa)?;
    require_positive_rho("partner potential slope", rho)?;
    Ok(u_derivs(kappa, l, rho)[1])
}

/// `d2U+/drho2` at real `l`.
pub fn u_plus_curvature(kappa: f64, l: f64, rho: f64) -> Result<f64> {
    check_kappa(kappa)?;
    require_positive_rho("partner potential curvature", rho)?;
    Ok(u_derivs(kappa, l, rho)[2])
}

/// Partner potential at real `l`.
pub fn u_plus_real(kappa: f64, l: f64, rho: f64) -> Result<f64> {
    check_kappa(kappa)?;
    require_positive_rho("partner potential", rho)?;
    Ok(u_plus(kappa, l, rho))
}

/// Orbital capacity `dU+/dl` at fixed `rho`:
/// `(2l-1)/rho^2 - (8l-4k)/[rho^(2(1-k)) (1+rho^(2k))^2] + 4/[rho^2 (1+rho^(2k))^2]`.
pub fn orbital_capacity(kappa: f64, l: f64, rho: f64) -> Result<f64> {
    check_kappa(kappa)?;
    require_positive_rho("orbital capacity", rho)?;
    let d = (1.0 + rho.powf(2.0 * kappa)).powi(2);
    let r2 = rho * rho;
    Ok(
        (2.0 * l - 1.0) / r2 - (8.0 * l - 4.0 * kappa) / (rho.powf(2.0 * (1.0 - kappa)) * d)
            + 4.0 / (r2 * d),
    )
}

/// Columns `u_plus` and `capacity` over an angular-momentum grid at fixed `rho`.
pub fn capacity_profile(kappa: f64, rho: f64, l_grid: &[f64]) -> Result<ProfileTable> {
    check_kappa(kappa)?;
    require_positive_rho("capacity profile", rho)?;
    let u: Vec<f64> = l_grid.iter().map(|&l| u_plus(kappa, l, rho)).collect();
    let c = l_grid
        .iter()
        .map(|&l| orbital_capacity(kappa, l, rho))
        .collect::<Result<Vec<f64>>>()?;
    let mut table = ProfileTable::new("l", l_grid.to_vec());
    table.push_column("u_plus", u)?;
    table.push_column("capacity", c)?;
    Ok(table)
}

fn check_window(window: (f64, f64)) -> Result<()> {
    let (lo, hi) = window;
    if lo > 0.0 && hi > lo && hi.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "rho window must satisfy 0 < lo < hi, got [{lo}, {hi}]"
        )))
    }
}

fn bisect<F: Fn(f64) -> f64>(g: F, mut lo: f64, mut hi: f64) -> f64 {
    let mut g_lo = g(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let g_mid = g(mid);
        if g_mid == 0.0 {
            return mid;
        }
        if (g_mid > 0.0) == (g_lo > 0.0) {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn classify(curvature: f64) -> StationaryKind {
    if curvature > STATIONARY_TOL {
        StationaryKind::LocalMin
    } else if curvature < -STATIONARY_TOL {
        StationaryKind::LocalMax
    } else {
        StationaryKind::Inflection
    }
}

/// All stationary points of `U+(rho)` in `window`, ascending in `rho`.
///
/// Simple roots are found by a sign scan of `dU/drho` and bisection;
/// degenerate (touching) roots by scanning `d2U/drho2` and keeping those of
/// its roots where `dU/drho` also vanishes.
pub fn stationary_points(kappa: f64, l: f64, window: (f64, f64)) -> Result<Vec<StationaryPoint>> {
    check_kappa(kappa)?;
    check_window(window)?;
    let (lo, hi) = window;
    let ratio = (hi / lo).ln() / (SCAN_POINTS - 1) as f64;
    let grid: Vec<f64> = (0..SCAN_POINTS)
        .map(|i| {
            if i == SCAN_POINTS - 1 {
                hi
            } else {
                lo * (ratio * i as f64).exp()
            }
        })
        .collect();
    let derivs: Vec<[f64; 4]> = grid.iter().map(|&r| u_derivs(kappa, l, r)).collect();
    let slope = |r: f64| u_derivs(kappa, l, r)[1];
    let curv = |r: f64| u_derivs(kappa, l, r)[2];

    // (rho, |curvature|) candidates
    let mut candidates: Vec<(f64, f64)> = Vec::new();
    for i in 0..grid.len() {
        if derivs[i][1] == 0.0 {
            candidates.push((grid[i], derivs[i][2].abs()));
        }
        if i + 1 < grid.len() && derivs[i][1] * derivs[i + 1][1] < 0.0 {
            let r = bisect(slope, grid[i], grid[i + 1]);
            candidates.push((r, curv(r).abs()));
        }
        if i + 1 < grid.len() && derivs[i][2] * derivs[i + 1][2] < 0.0 {
            let r = bisect(curv, grid[i], grid[i + 1]);
            let d = u_derivs(kappa, l, r);
            if d[1].abs() <= STATIONARY_TOL * d[0].abs().max(1.0) {
                candidates.push((r, d[2].abs()));
            }
        }
    }
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut merged: Vec<(f64, f64)> = Vec::new();
    for (r, c) in candidates {
        match merged.last_mut() {
            Some(last) if (r - last.0).abs() <= MERGE_REL * r => {
                if c < last.1 {
                    *last = (r, c);
                }
            }
            _ => merged.push((r, c)),
        }
    }
    Ok(merged
        .into_iter()
        .map(|(rho, _)| StationaryPoint {
            rho,
            kind: classify(curv(rho)),
        })
        .collect())
}

fn fold_residual(kappa: f64, rho: f64, l: f64) -> [f64; 2] {
    let d = u_derivs(kappa, l, rho);
    [d[1], d[2]]
}

fn fold_scale(kappa: f64, rho: f64, l: f64) -> f64 {
    u_plus(kappa, l, rho).abs().max(1.0)
}

/// Damped Newton on `(dU/drho, d2U/drho2) = 0` in the unknowns `(rho, l)`.
fn fold_newton(kappa: f64, mut rho: f64, mut l: f64) -> Option<(f64, f64)> {
    let norm = |f: [f64; 2]| f[0].hypot(f[1]);
    let mut f = fold_residual(kappa, rho, l);
    for _ in 0..NEWTON_MAX_ITER {
        if !(rho > 0.0 && rho.is_finite() && l.is_finite()) {
            return None;
        }
        let scale = fold_scale(kappa, rho, l);
        if f[0].abs() <= 1e-13 * scale && f[1].abs() <= 1e-13 * scale {
            return Some((rho, l));
        }
        let d = u_derivs(kappa, l, rho);
        let dl = ul_derivs(kappa, l, rho);
        // J = [[U'', U'_l], [U''', U''_l]]
        let (j11, j12, j21, j22) = (d[2], dl[1], d[3], dl[2]);
        let det = j11 * j22 - j12 * j21;
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let d_rho = -(f[0] * j22 - j12 * f[1]) / det;
        let d_l = -(j11 * f[1] - j21 * f[0]) / det;

        let current = norm(f);
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..=NEWTON_MAX_HALVINGS {
            let (r_try, l_try) = (rho + t * d_rho, l + t * d_l);
            if r_try > 0.0 {
                let f_try = fold_residual(kappa, r_try, l_try);
                if norm(f_try) < current {
                    rho = r_try;
                    l = l_try;
                    f = f_try;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            // no decrease possible: either converged to rounding level or stuck
            let scale = fold_scale(kappa, rho, l);
            return (f[0].abs() <= STATIONARY_TOL * scale && f[1].abs() <= STATIONARY_TOL * scale)
                .then_some((rho, l));
        }
        if (t * d_rho).abs() <= 4.0 * f64::EPSILON * rho
            && (t * d_l).abs() <= 4.0 * f64::EPSILON * l.abs()
        {
            return Some((rho, l));
        }
    }
    None
}

fn count_in(kappa: f64, l: f64, window: (f64, f64)) -> Result<usize> {
    Ok(stationary_points(kappa, l, window)?.len())
}

fn finish(kappa: f64, rho: f64, l: f64) -> Result<CriticalPoint> {
    let d = u_derivs(kappa, l, rho);
    let cp = CriticalPoint {
        rho_star: rho,
        l_star: l,
        residuals: (d[1].abs(), d[2].abs()),
        u_plus: d[0],
    };
    let scale = d[0].abs().max(1.0);
    if cp.residuals.0 <= STATIONARY_TOL * scale && cp.residuals.1 <= STATIONARY_TOL * scale {
        Ok(cp)
    } else {
        Err(Error::convergence(format!(
            "critical point residuals {:e}, {:e} exceed tolerance",
            cp.residuals.0, cp.residuals.1
        )))
    }
}

/// Critical angular momentum: the `l` at which `dU/drho` and `d2U/drho2`
/// vanish together, i.e. where a stationary pair of `U+` is born.
///
/// The search interval is scanned for a change in the stationary-point count
/// inside `[guess/10, 10 guess]`. Damped Newton then starts from
/// `(guess, bracket midpoint)`; if it fails or leaves the bracket, the count
/// change is bisected in `l` and Newton restarts from the nascent pair.
pub fn critical_l(kappa: f64, search: (f64, f64), guess: f64) -> Result<CriticalPoint> {
    check_kappa(kappa)?;
    let (l_lo, l_hi) = search;
    if !(l_lo > 0.0 && l_hi > l_lo && l_hi < 50.0) {
        return Err(Error::invalid(format!(
            "l search interval must lie within (0, 50), got [{l_lo}, {l_hi}]"
        )));
    }
    if !(guess > 0.0 && guess.is_finite()) {
        return Err(Error::invalid(format!(
            "rho guess must be > 0, got {guess}"
        )));
    }
    let window = (guess / 10.0, guess * 10.0);

    let steps = ((l_hi - l_lo) / L_SCAN_STEP).ceil().max(1.0) as usize;
    let l_at = |i: usize| {
        if i == steps {
            l_hi
        } else {
            l_lo + (l_hi - l_lo) * i as f64 / steps as f64
        }
    };
    let base = count_in(kappa, l_lo, window)?;
    let mut bracket = None;
    for i in 1..=steps {
        if count_in(kappa, l_at(i), window)? != base {
            bracket = Some((l_at(i - 1), l_at(i)));
            break;
        }
    }
    let (mut la, mut lb) = bracket.ok_or_else(|| {
        Error::convergence(format!(
            "stationary-point count of U+ does not change for l in [{l_lo}, {l_hi}] (kappa = {kappa})"
        ))
    })?;

    let slack = lb - la;
    let in_bracket =
        |rho: f64, l: f64| l >= la - slack && l <= lb + slack && rho >= window.0 && rho <= window.1;
    if let Some((rho, l)) = fold_newton(kappa, guess, 0.5 * (la + lb)) {
        if in_bracket(rho, l) {
            if let Ok(cp) = finish(kappa, rho, l) {
                return Ok(cp);
            }
        }
    }

    // nested bisection: outer on the count change, inner is the stationary scan
    for _ in 0..60 {
        let mid = 0.5 * (la + lb);
        if mid <= la || mid >= lb {
            break;
        }
        if count_in(kappa, mid, window)? == base {
            la = mid;
        } else {
            lb = mid;
        }
    }
    let pts = stationary_points(kappa, lb, window)?;
    let seed = if pts.is_empty() {
        guess
    } else {
        pts.iter().map(|p| p.rho).sum::<f64>() / pts.len() as f64
    };
    let (rho, l) = fold_newton(kappa, seed, lb).unwrap_or((seed, lb));
    finish(kappa, rho, l)
}
