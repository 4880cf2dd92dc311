//! Exact antiderivatives of `x^(2l+2) / (1+x^2)^(2l+1)`.
//!
//! The reduction `J(m, n) = J(m-2, n-1) - J(m-2, n)` lowers the power of `x`
//! until only `K(j) = int_0^rho dx/(1+x^2)^j` remain, and those are expanded
//! with `K(j) = rho / (2(j-1)(1+rho^2)^(j-1)) + (2j-3)/(2j-2) K(j-1)` down to
//! `K(1) = arctan rho` and `K(0) = rho`. All coefficients are exact rationals.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::FRAC_PI_2;
use std::sync::{Arc, OnceLock, RwLock};

use num::{BigInt, BigRational, One, ToPrimitive, Zero};

/// One term `coef * rho^power / (1+rho^2)^denom_exp`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RationalTerm {
    pub coef: f64,
    pub power: u32,
    pub denom_exp: u32,
}

/// `I(rho) = a arctan(rho) + b rho + sum_j c_j rho / (1+rho^2)^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormAntiderivative {
    l: u32,
    arctan_exact: BigRational,
    linear_exact: BigRational,
    terms_exact: Vec<(BigRational, u32)>,
    arctan_coef: f64,
    linear_coef: f64,
    rational_terms: Vec<RationalTerm>,
}

fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().expect("rational coefficient fits in f64")
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl ClosedFormAntiderivative {
    fn build(l: u32) -> Self {
        let mut m = 2 * l + 2;
        let mut level: BTreeMap<u32, BigRational> = BTreeMap::new();
        level.insert(2 * l + 1, BigRational::one());

        while m > 0 {
            let mut next: BTreeMap<u32, BigRational> = BTreeMap::new();
            for (n, c) in level {
                debug_assert!(n > 0, "J(m, 0) with m > 0 never arises for this family");
                *next.entry(n - 1).or_insert_with(BigRational::zero) += &c;
                *next.entry(n).or_insert_with(BigRational::zero) -= &c;
            }
            level = next;
            m -= 2;
        }

        let top = level.keys().next_back().copied().unwrap_or(0) as usize;
        let mut k_coef = vec![BigRational::zero(); top.max(1) + 1];
        for (n, c) in level {
            k_coef[n as usize] += c;
        }
        let mut terms: Vec<(BigRational, u32)> = Vec::new();
        for j in (2..=top).rev() {
            let c = std::mem::take(&mut k_coef[j]);
            if c.is_zero() {
                continue;
            }
            let jj = j as i64;
            terms.push((&c * rat(1, 2 * (jj - 1)), (j - 1) as u32));
            k_coef[j - 1] += &c * rat(2 * jj - 3, 2 * jj - 2);
        }
        // accumulate duplicates of the same denominator power
        let mut merged: BTreeMap<u32, BigRational> = BTreeMap::new();
        for (c, e) in terms {
            *merged.entry(e).or_insert_with(BigRational::zero) += c;
        }
        let terms_exact: Vec<(BigRational, u32)> = merged
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(e, c)| (c, e))
            .collect();

        let arctan_exact = k_coef[1].clone();
        let linear_exact = k_coef[0].clone();
        ClosedFormAntiderivative {
            l,
            arctan_coef: to_f64(&arctan_exact),
            linear_coef: to_f64(&linear_exact),
            rational_terms: terms_exact
                .iter()
                .map(|(c, e)| RationalTerm {
                    coef: to_f64(c),
                    power: 1,
                    denom_exp: *e,
                })
                .collect(),
            arctan_exact,
            linear_exact,
            terms_exact,
        }
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn arctan_coef(&self) -> f64 {
        self.arctan_coef
    }

    pub fn linear_coef(&self) -> f64 {
        self.linear_coef
    }

    pub fn rational_terms(&self) -> &[RationalTerm] {
        &self.rational_terms
    }

    pub fn arctan_coef_exact(&self) -> &BigRational {
        &self.arctan_exact
    }

    pub fn linear_coef_exact(&self) -> &BigRational {
        &self.linear_exact
    }

    /// Exact `(coef, denom_exp)` pairs of the `rho/(1+rho^2)^j` terms.
    pub fn rational_terms_exact(&self) -> &[(BigRational, u32)] {
        &self.terms_exact
    }

    /// Limit as `rho -> inf`; `None` when the form grows linearly (`l = 0`).
    pub fn limit(&self) -> Option<f64> {
        if self.linear_exact.is_zero() {
            Some(self.arctan_coef * FRAC_PI_2)
        } else {
            None
        }
    }

    /// The closed form summed term by term, with the sum of term magnitudes.
    fn sum_terms(&self, rho: f64) -> (f64, f64) {
        let q = 1.0 / (1.0 + rho * rho);
        let mut value = self.arctan_coef * rho.atan() + self.linear_coef * rho;
        let mut magnitude = value.abs();
        for t in &self.rational_terms {
            let term = t.coef * rho.powi(t.power as i32) * q.powi(t.denom_exp as i32);
            value += term;
            magnitude += term.abs();
        }
        (value, magnitude)
    }

    /// Positive series of the same integral:
    /// `rho^(2l+3) (1+rho^2)^(-(2l+1)) / (2l+3) * sum_j (2l+1)_j/(l+5/2)_j u^j`
    /// with `u = rho^2/(1+rho^2)`. Free of cancellation; used near the origin.
    fn series(&self, rho: f64) -> f64 {
        let l = f64::from(self.l);
        let r2 = rho * rho;
        let u = r2 / (1.0 + r2);
        let prefactor =
            ((2.0 * l + 3.0) * rho.ln() - (2.0 * l + 1.0) * r2.ln_1p()).exp() / (2.0 * l + 3.0);
        let (apb, a1) = (2.0 * l + 1.0, l + 2.5);
        let mut term = 1.0;
        let mut sum = 1.0;
        for j in 0..100_000 {
            let j = f64::from(j);
            term *= (apb + j) / (a1 + j) * u;
            sum += term;
            if term <= 1e-17 * sum {
                break;
            }
        }
        prefactor * sum
    }

    /// Remaining weight `int_rho^inf` for `l >= 1`, as the positive series
    /// `v^(l-1/2) (1-v)^(l+3/2) / (2l-1) * sum_j (2l+1)_j/(l+1/2)_j v^j`
    /// with `v = 1/(1+rho^2)`. Meant for `rho >= 1`.
    fn tail(&self, rho: f64) -> f64 {
        let l = f64::from(self.l);
        let r2 = rho * rho;
        let v = 1.0 / (1.0 + r2);
        let prefactor =
            ((2.0 * l + 3.0) * rho.ln() - (2.0 * l + 1.0) * r2.ln_1p()).exp() / (2.0 * l - 1.0);
        let (apb, a1) = (2.0 * l + 1.0, l + 0.5);
        let mut term = 1.0;
        let mut sum = 1.0;
        for j in 0..100_000 {
            let j = f64::from(j);
            term *= (apb + j) / (a1 + j) * v;
            sum += term;
            if term <= 1e-17 * sum {
                break;
            }
        }
        prefactor * sum
    }

    /// Evaluates `I(rho) = int_0^rho x^(2l+2)/(1+x^2)^(2l+1) dx`.
    ///
    /// Near the origin the closed form cancels catastrophically (the result is
    /// `O(rho^(2l+3))` while the terms are `O(rho)`), so the positive series is
    /// used whenever the cancellation would cost more than three digits. Far
    /// out, where the closed form only jitters around its limit, the value is
    /// taken as the limit minus the remaining tail, which keeps it monotone.
    pub fn eval(&self, rho: f64) -> f64 {
        if rho <= 0.0 {
            return 0.0;
        }
        if let Some(lim) = self.limit() {
            if rho >= 1.0 {
                let tail = self.tail(rho);
                if tail <= 1e-3 * lim {
                    return lim - tail;
                }
            }
        }
        let (value, magnitude) = self.sum_terms(rho);
        let u = rho * rho / (1.0 + rho * rho);
        let ill_conditioned = !(magnitude <= 1e3 * value);
        let value = if ill_conditioned && u <= 0.95 {
            self.series(rho)
        } else {
            value
        };
        let value = value.max(0.0);
        match self.limit() {
            Some(lim) => value.min(lim),
            None => value,
        }
    }

    /// Derivative of the closed form evaluated in floating point.
    pub fn derivative(&self, rho: f64) -> f64 {
        let q = 1.0 / (1.0 + rho * rho);
        let mut d = self.arctan_coef * q + self.linear_coef;
        for t in &self.rational_terms {
            let j = t.denom_exp as i32;
            d += t.coef * (q.powi(j) - 2.0 * f64::from(j) * rho * rho * q.powi(j + 1));
        }
        d
    }

    /// Derivative of the closed form in exact rational arithmetic.
    pub fn derivative_exact(&self, rho: &BigRational) -> BigRational {
        let q = (BigRational::one() + rho * rho).recip();
        let mut d = &self.arctan_exact * &q + &self.linear_exact;
        for (c, e) in &self.terms_exact {
            let j = *e as i32;
            let qj = num::pow::pow(q.clone(), j as usize);
            let qj1 = &qj * &q;
            d += c * (qj - BigRational::from_integer(BigInt::from(2 * j)) * rho * rho * qj1);
        }
        d
    }
}

/// The integrand `rho^(2l+2)/(1+rho^2)^(2l+1)` in exact arithmetic.
pub fn integrand_exact(l: u32, rho: &BigRational) -> BigRational {
    let num_pow = num::pow::pow(rho.clone(), (2 * l + 2) as usize);
    let den = num::pow::pow(BigRational::one() + rho * rho, (2 * l + 1) as usize);
    num_pow / den
}

type Cache = RwLock<HashMap<u32, Arc<ClosedFormAntiderivative>>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Closed-form antiderivative of the squared fisheye zero mode for `l`.
/// Forms are memoized; concurrent builders produce identical values.
pub fn antiderivative_i(l: u32) -> Arc<ClosedFormAntiderivative> {
    if let Some(cf) = cache().read().expect("cache lock").get(&l) {
        return Arc::clone(cf);
    }
    let built = Arc::new(ClosedFormAntiderivative::build(l));
    let mut guard = cache().write().expect("cache lock");
    Arc::clone(guard.entry(l).or_insert(built))
}

/// Evaluates a closed form at `rho`.
pub fn eval_antiderivative(cf: &ClosedFormAntiderivative, rho: f64) -> f64 {
    cf.eval(rho)
}
