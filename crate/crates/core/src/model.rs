//! Parameter bundles, radial grids and tabular profiles shared by every
//! computational module.

use std::fmt;

use crate::error::{Error, Result};
use crate::radial::coupling_w;

/// Lens parameters: DO exponent `kappa`, angular momentum `l`, optional
/// isospectral parameter `lambda`, and the derived Sturmian coupling `w`.
///
/// Construct through [`make_lens_spec`]; `w` is never user supplied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LensSpec {
    kappa: f64,
    l: u32,
    lambda: Option<f64>,
    w: f64,
}

impl LensSpec {
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    /// Angular momentum widened to a real number.
    pub fn l_real(&self) -> f64 {
        f64::from(self.l)
    }

    pub fn lambda(&self) -> Option<f64> {
        self.lambda
    }

    /// The isospectral parameter, or an invalid-parameter error when absent.
    pub fn require_lambda(&self) -> Result<f64> {
        self.lambda
            .ok_or_else(|| Error::invalid("lambda is required for isospectral quantities"))
    }

    pub fn w(&self) -> f64 {
        self.w
    }

    /// Same lens with a different isospectral parameter.
    pub fn with_lambda(&self, lambda: f64) -> Result<LensSpec> {
        make_lens_spec(self.kappa, self.l, Some(lambda))
    }
}

impl fmt::Display for LensSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "kappa={} l={} w={}", self.kappa, self.l, self.w)?;
        if let Some(lambda) = self.lambda {
            write!(f, " lambda={lambda}")?;
        }
        Ok(())
    }
}

pub(crate) fn check_kappa(kappa: f64) -> Result<()> {
    if kappa.is_finite() && kappa > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "kappa must be finite and > 0, got {kappa}"
        )))
    }
}

pub(crate) fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "lambda must be finite and > 0, got {lambda}"
        )))
    }
}

/// Validates the parameters and derives `w = (2l+1)(2l+2kappa+1)`.
pub fn make_lens_spec(kappa: f64, l: u32, lambda: Option<f64>) -> Result<LensSpec> {
    check_kappa(kappa)?;
    if let Some(lambda) = lambda {
        check_lambda(lambda)?;
    }
    Ok(LensSpec {
        kappa,
        l,
        lambda,
        w: coupling_w(kappa, l),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Logarithmic,
}

/// A closed radial interval `[start, end]` sampled at `count` points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialGrid {
    pub start: f64,
    pub end: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl RadialGrid {
    pub fn linear(start: f64, end: f64, count: usize) -> Self {
        RadialGrid {
            start,
            end,
            count,
            spacing: Spacing::Linear,
        }
    }

    pub fn logarithmic(start: f64, end: f64, count: usize) -> Self {
        RadialGrid {
            start,
            end,
            count,
            spacing: Spacing::Logarithmic,
        }
    }

    /// Grid used for the impedance-ratio figures: `[0, 6]`, 601 points.
    pub fn figure_default() -> Self {
        RadialGrid::linear(0.0, 6.0, 601)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.start.is_finite() && self.end.is_finite()) {
            return Err(Error::invalid("grid bounds must be finite"));
        }
        if self.start < 0.0 {
            return Err(Error::invalid(format!(
                "grid start must be >= 0, got {}",
                self.start
            )));
        }
        if self.end <= self.start {
            return Err(Error::invalid(format!(
                "grid end ({}) must exceed start ({})",
                self.end, self.start
            )));
        }
        if self.count < 2 {
            return Err(Error::invalid(format!(
                "grid needs at least 2 points, got {}",
                self.count
            )));
        }
        if self.spacing == Spacing::Logarithmic && self.start <= 0.0 {
            return Err(Error::invalid("logarithmic spacing requires start > 0"));
        }
        Ok(())
    }

    pub fn samples(&self) -> Result<Vec<f64>> {
        sample_grid(self)
    }
}

/// Samples a grid. The first and last entries are exactly `start` and `end`.
pub fn sample_grid(grid: &RadialGrid) -> Result<Vec<f64>> {
    grid.validate()?;
    let last = grid.count - 1;
    let steps = last as f64;
    let mut out: Vec<f64> = match grid.spacing {
        Spacing::Linear => {
            let h = (grid.end - grid.start) / steps;
            (0..grid.count).map(|i| grid.start + i as f64 * h).collect()
        }
        Spacing::Logarithmic => {
            let (a, b) = (grid.start.ln(), grid.end.ln());
            let h = (b - a) / steps;
            (0..grid.count).map(|i| (a + i as f64 * h).exp()).collect()
        }
    };
    out[0] = grid.start;
    out[last] = grid.end;
    if out.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid(
            "grid resolution exceeds floating-point precision (samples not strictly increasing)",
        ));
    }
    Ok(out)
}

/// Named columns over a shared abscissa.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileTable {
    grid_name: String,
    grid: Vec<f64>,
    columns: Vec<(String, Vec<f64>)>,
}

impl ProfileTable {
    pub fn new(grid_name: impl Into<String>, grid: Vec<f64>) -> Self {
        ProfileTable {
            grid_name: grid_name.into(),
            grid,
            columns: Vec::new(),
        }
    }

    pub fn push_column(&mut self, name: impl Into<String>, values: Vec<f64>) -> Result<()> {
        let name = name.into();
        if values.len() != self.grid.len() {
            return Err(Error::invalid(format!(
                "column {name} has {} values, grid has {}",
                values.len(),
                self.grid.len()
            )));
        }
        if name == self.grid_name || self.columns.iter().any(|(n, _)| *n == name) {
            return Err(Error::invalid(format!("duplicate column name {name}")));
        }
        self.columns.push((name, values));
        Ok(())
    }

    pub fn grid_name(&self) -> &str {
        &self.grid_name
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn columns(&self) -> &[(String, Vec<f64>)] {
        &self.columns
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lens_spec_derives_coupling() {
        let s = make_lens_spec(1.0, 1, None).unwrap();
        assert_eq!(s.w(), 15.0);
        assert_eq!(s.lambda(), None);

        let s = make_lens_spec(0.5, 0, Some(0.1)).unwrap();
        assert_eq!(s.w(), 2.0);
        assert_eq!(s.lambda(), Some(0.1));
    }

    #[test]
    fn lens_spec_rejects_bad_parameters() {
        assert!(matches!(
            make_lens_spec(-1.0, 0, None),
            Err(Error::InvalidParameter(_))
        ));
        assert!(make_lens_spec(0.0, 0, None).is_err());
        assert!(make_lens_spec(f64::NAN, 0, None).is_err());
        assert!(make_lens_spec(1.0, 0, Some(0.0)).is_err());
        assert!(make_lens_spec(1.0, 0, Some(-2.0)).is_err());
        let s = make_lens_spec(1.0, 2, None).unwrap();
        assert!(s.require_lambda().is_err());
    }

    #[test]
    fn linear_and_log_samples() {
        assert_eq!(
            sample_grid(&RadialGrid::linear(0.0, 1.0, 3)).unwrap(),
            vec![0.0, 0.5, 1.0]
        );
        let g = sample_grid(&RadialGrid::logarithmic(1.0, 100.0, 3)).unwrap();
        assert_eq!(g[0], 1.0);
        assert!((g[1] - 10.0).abs() < 1e-13);
        assert_eq!(g[2], 100.0);
    }

    #[test]
    fn grid_errors() {
        assert!(sample_grid(&RadialGrid::logarithmic(0.0, 1.0, 2)).is_err());
        assert!(sample_grid(&RadialGrid::linear(1.0, 1.0, 2)).is_err());
        assert!(sample_grid(&RadialGrid::linear(0.0, 1.0, 1)).is_err());
        assert!(sample_grid(&RadialGrid::linear(-1.0, 1.0, 5)).is_err());
    }

    #[test]
    fn linear_spacing_within_four_ulps() {
        for &(a, b, n) in &[(0.0, 6.0, 601), (0.1, 10.0, 200), (2.5, 50.0, 1001)] {
            let xs = sample_grid(&RadialGrid::linear(a, b, n)).unwrap();
            let h = (b - a) / (n - 1) as f64;
            let ulp = f64::EPSILON * f64::max(a.abs(), b.abs());
            for w in xs.windows(2) {
                assert!(((w[1] - w[0]) - h).abs() <= 4.0 * ulp);
            }
        }
    }

    #[test]
    fn profile_table_rejects_ragged_and_duplicate_columns() {
        let mut t = ProfileTable::new("rho", vec![0.0, 1.0]);
        t.push_column("a", vec![1.0, 2.0]).unwrap();
        assert!(t.push_column("a", vec![1.0, 2.0]).is_err());
        assert!(t.push_column("rho", vec![1.0, 2.0]).is_err());
        assert!(t.push_column("b", vec![1.0]).is_err());
        assert_eq!(t.column("a"), Some(&[1.0, 2.0][..]));
    }
}
