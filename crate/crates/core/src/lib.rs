//! Regularized reconstruction of an unobservable multivariate stochastic
//! process, and of its cross-power spectrum, from indirect linear
//! measurements `y(t) = G x(t) + n(t)`.
//!
//! The crate provides:
//!
//! - forward operators with cached SVD and the derived regularized inverse
//!   and resolution operators ([`forward_model`]);
//! - seeded simulation of white Gaussian source/noise processes and of the
//!   measurement process ([`stochastic_sim`]);
//! - Welch cross-power-spectrum estimation ([`spectral`]);
//! - tSVD and Tikhonov filter factors, and the two-step
//!   (reconstruct-then-Welch) and one-step (filter the data spectrum
//!   directly) estimators of the source cross-spectrum ([`regularizers`]);
//! - empirical and closed-form reconstruction errors, optimal-parameter
//!   search, and the verification suite relating the optimal parameter for
//!   signal reconstruction to the optimal parameter for cross-spectrum
//!   reconstruction ([`error_analysis`]).
//!
//! The crate is `no_std` (it requires `alloc`); all floating-point
//! transcendentals go through `libm`. File formats, CSV/JSON emission and
//! the experiment CLI live in the companion `crospec` crate.

#![no_std]
#![deny(unsafe_code)]
// Index loops mirror the matrix subscripts they implement.
#![allow(clippy::needless_range_loop)]
// `!(x > 0.0)` style guards reject NaN; the suggested `x <= 0.0` would not.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
#[macro_use]
extern crate std;

pub mod error;
pub mod error_analysis;
pub mod fft;
pub mod forward_model;
pub mod mat;
mod math;
pub mod regularizers;
pub mod rng;
pub mod spectral;
pub mod stochastic_sim;

pub use error::{Error, Result};
pub use forward_model::{ForwardModel, KroneckerSvd, SpectrumSpec, SyntheticSpec};
pub use regularizers::{FilterSpec, PairFilterSpec};
pub use spectral::{CrossSpectrum, WelchConfig, Window};
pub use stochastic_sim::{SeriesLabel, TimeSeriesEnsemble, WhiteProcessSpec};
