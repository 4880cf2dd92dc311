//! Nodeless-sector analysis of the Demkov-Ostrovsky focusing potentials.
//!
//! The family `V(rho) = -w rho^(2k-2) / (1 + rho^(2k))^2` with `k = 1` is the
//! Maxwell fisheye lens. For every angular momentum `l` the zero-energy radial
//! equation has a nodeless positive solution (the zero mode) whose inverse is
//! read as an orbital impedance. This crate evaluates:
//!
//! - zero modes, impedances, superpotential and SUSY partner potential ([`radial`]);
//! - exact antiderivatives of the squared zero mode plus adaptive quadrature
//!   ([`closed_form`]);
//! - the strictly isospectral one-parameter family and its impedance ratio
//!   ([`isospectral`]);
//! - orbital capacity, pocket structure and the critical angular momentum
//!   ([`spectral`]);
//! - the Langer map to a `sech^2` well and its reflection coefficient
//!   ([`radial::scattering`]).
//!
//! ```
//! use nodeless::{make_lens_spec, radial};
//!
//! let spec = make_lens_spec(1.0, 1, None).unwrap();
//! assert_eq!(spec.w(), 15.0);
//! let f = radial::zero_mode_f(&spec, 1.0);
//! assert!((f - 2f64.powf(-1.5)).abs() < 1e-15);
//! ```

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod closed_form;
mod error;
pub mod isospectral;
pub mod model;
pub mod radial;
pub mod spectral;

pub use error::{Error, Result};
pub use model::{make_lens_spec, sample_grid, LensSpec, ProfileTable, RadialGrid, Spacing};
