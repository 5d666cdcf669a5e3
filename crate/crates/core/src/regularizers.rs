//! Filter factors for tSVD and Tikhonov regularization, and the two
//! estimators of the source cross-spectrum:
//!
//! - **two-step**: reconstruct the time series with the regularized
//!   inverse, then run Welch on the reconstruction. Its effective pair
//!   factor on component `(i, j)` is the product `φ_i φ_j`, so each
//!   singular value is filtered individually.
//! - **one-step**: filter the data cross-spectrum directly through the
//!   product operator `G ⊗ G`, whose singular values are the products
//!   `σ_i σ_j`. The pair factor depends on `(i, j)` only through that
//!   product.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::forward_model::ForwardModel;
use crate::spectral::{welch_cross_spectrum, CrossSpectrum, WelchConfig};
use crate::stochastic_sim::{reconstruct, TimeSeriesEnsemble};

/// Regularization family, used for labeling curves and emitted tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Method {
    Tsvd,
    Tikhonov,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Tsvd => "tsvd",
            Method::Tikhonov => "tikhonov",
        }
    }
}

/// Per-index regularization filter.
///
/// For tSVD the parameter is the number of retained components, an
/// integer in `{1, ..., M}` (few retained components = strong
/// regularization). For Tikhonov it is a real `λ >= 0` (large λ = strong
/// regularization).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum FilterSpec {
    Tsvd { retained: usize },
    Tikhonov { lambda: f64 },
}

impl FilterSpec {
    pub fn method(&self) -> Method {
        match self {
            FilterSpec::Tsvd { .. } => Method::Tsvd,
            FilterSpec::Tikhonov { .. } => Method::Tikhonov,
        }
    }

    /// The regularization parameter as a float (retained count for tSVD).
    pub fn lambda(&self) -> f64 {
        match self {
            FilterSpec::Tsvd { retained } => *retained as f64,
            FilterSpec::Tikhonov { lambda } => *lambda,
        }
    }

    pub fn validate(&self, m: usize) -> Result<()> {
        match self {
            FilterSpec::Tsvd { retained } => {
                if *retained == 0 || *retained > m {
                    return Err(Error::InvalidParameter(format!(
                        "tSVD retained count must lie in 1..={m}, got {retained}"
                    )));
                }
            }
            FilterSpec::Tikhonov { lambda } => {
                if !(*lambda >= 0.0) || !lambda.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "Tikhonov lambda must be finite and >= 0, got {lambda}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Pair-level filter for the one-step estimator. The tSVD variant keeps
/// the components whose singular product `σ_i σ_j` is at or above a real
/// threshold; the Tikhonov variant applies
/// `φ̃_ij = σ_i²σ_j² / (σ_i²σ_j² + λ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum PairFilterSpec {
    Tsvd { threshold: f64 },
    Tikhonov { lambda: f64 },
}

impl PairFilterSpec {
    pub fn method(&self) -> Method {
        match self {
            PairFilterSpec::Tsvd { .. } => Method::Tsvd,
            PairFilterSpec::Tikhonov { .. } => Method::Tikhonov,
        }
    }

    pub fn lambda(&self) -> f64 {
        match self {
            PairFilterSpec::Tsvd { threshold } => *threshold,
            PairFilterSpec::Tikhonov { lambda } => *lambda,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.lambda();
        if !(v >= 0.0) || !v.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "one-step parameter must be finite and >= 0, got {v}"
            )));
        }
        Ok(())
    }

    /// Pair factor for a singular product `p = σ_i σ_j`.
    pub fn factor(&self, p: f64) -> f64 {
        match self {
            PairFilterSpec::Tsvd { threshold } => {
                if p >= *threshold {
                    1.0
                } else {
                    0.0
                }
            }
            PairFilterSpec::Tikhonov { lambda } => {
                let p2 = p * p;
                p2 / (p2 + lambda)
            }
        }
    }
}

/// Whether an estimator filters singular values individually (two-step)
/// or through the product operator (one-step).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum CrossSpectrumFilter {
    TwoStep(FilterSpec),
    OneStep(PairFilterSpec),
}

impl CrossSpectrumFilter {
    pub fn approach_str(&self) -> &'static str {
        match self {
            CrossSpectrumFilter::TwoStep(_) => "two_step",
            CrossSpectrumFilter::OneStep(_) => "one_step",
        }
    }

    pub fn method(&self) -> Method {
        match self {
            CrossSpectrumFilter::TwoStep(f) => f.method(),
            CrossSpectrumFilter::OneStep(f) => f.method(),
        }
    }

    pub fn lambda(&self) -> f64 {
        match self {
            CrossSpectrumFilter::TwoStep(f) => f.lambda(),
            CrossSpectrumFilter::OneStep(f) => f.lambda(),
        }
    }
}

/// Per-index filter factors `φ_i(λ)`, `i = 1..M`.
pub fn filter_factors(model: &ForwardModel, filter: &FilterSpec) -> Result<Vec<f64>> {
    filter.validate(model.m())?;
    Ok(match filter {
        FilterSpec::Tsvd { retained } => (0..model.m())
            .map(|i| if i < *retained { 1.0 } else { 0.0 })
            .collect(),
        FilterSpec::Tikhonov { lambda } => model
            .sigma()
            .iter()
            .map(|s| {
                let s2 = s * s;
                s2 / (s2 + lambda)
            })
            .collect(),
    })
}

/// Two-step pair factors `φ_i φ_j`, row-major over `(i, j) ∈ {0..M}²`.
pub fn pair_factors_two_step(model: &ForwardModel, filter: &FilterSpec) -> Result<Vec<f64>> {
    let phi = filter_factors(model, filter)?;
    let m = model.m();
    let mut out = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            out.push(phi[i] * phi[j]);
        }
    }
    Ok(out)
}

/// One-step pair factors `φ̃_ij`, row-major over `(i, j) ∈ {0..M}²`.
pub fn pair_factors_one_step(model: &ForwardModel, filter: &PairFilterSpec) -> Result<Vec<f64>> {
    filter.validate()?;
    let m = model.m();
    let mut out = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            out.push(filter.factor(model.sigma()[i] * model.sigma()[j]));
        }
    }
    Ok(out)
}

/// Two-step cross-spectrum estimate: Welch applied to the regularized
/// reconstruction. Operationally identical to conjugating the Welch
/// estimate of `y` by the regularized inverse, `W_λ S^y(f) W_λᵗ`.
pub fn two_step_cross_spectrum(
    model: &ForwardModel,
    filter: &FilterSpec,
    y: &TimeSeriesEnsemble,
    cfg: &WelchConfig,
) -> Result<CrossSpectrum> {
    let rec = reconstruct(model, filter, y)?;
    welch_cross_spectrum(&rec, cfg)
}

/// One-step cross-spectrum estimate from the data cross-spectrum:
///
/// `S^x_λ(f) = Σ_{i,j} φ̃_ij · (u_iᵗ S^y(f) u_j) / (σ_i σ_j) · v_i v_jᵗ`
///
/// computed as small sandwich products per bin; no M²×N² operator is ever
/// materialized. If `noise_spectrum` is supplied it is subtracted from the
/// data spectrum before inversion (off by default in all built-in
/// experiment paths).
pub fn one_step_cross_spectrum(
    model: &ForwardModel,
    filter: &PairFilterSpec,
    data_spectrum: &CrossSpectrum,
    noise_spectrum: Option<&CrossSpectrum>,
) -> Result<CrossSpectrum> {
    filter.validate()?;
    let m = model.m();
    if !data_spectrum.is_square() || data_spectrum.rows() != m {
        return Err(Error::Shape(format!(
            "data spectrum must be {m}x{m}, got {}x{}",
            data_spectrum.rows(),
            data_spectrum.cols()
        )));
    }
    let sy = match noise_spectrum {
        Some(sn) => data_spectrum.sub(sn)?,
        None => data_spectrum.clone(),
    };
    let defect = sy.max_hermitian_defect();
    if defect > 1e-8 {
        return Err(Error::InvalidParameter(format!(
            "data spectrum is not Hermitian (relative defect {defect:e})"
        )));
    }

    let ut = model.u().transpose();
    let v_range = model.v_range();
    let bins = sy.bins();
    let mut out = CrossSpectrum::zeros(model.n(), model.n(), bins);
    for f in 0..bins {
        // Rotate into the singular basis, apply the pair factors over the
        // singular products, rotate back.
        let mut t = sy.matrix(f).sandwich_real(&ut);
        for i in 0..m {
            for j in 0..m {
                let p = model.sigma()[i] * model.sigma()[j];
                let coef = filter.factor(p) / p;
                t.set(i, j, t.get(i, j) * coef);
            }
        }
        out.set_matrix(f, &t.sandwich_real(&v_range));
    }
    Ok(out)
}

/// One row of the filter-factor tables behind the pair-factor scatter
/// plots: the singular product and the associated factor, with 0-based
/// component indices.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PairFactor {
    pub sigma_product: f64,
    pub factor: f64,
    pub i: usize,
    pub j: usize,
}

/// Pair factors for every `(i, j)`, sorted by ascending singular product
/// with lexicographic `(i, j)` tie-break.
pub fn pair_filter_table(
    model: &ForwardModel,
    filter: &CrossSpectrumFilter,
) -> Result<Vec<PairFactor>> {
    let m = model.m();
    let factors = match filter {
        CrossSpectrumFilter::TwoStep(f) => pair_factors_two_step(model, f)?,
        CrossSpectrumFilter::OneStep(f) => pair_factors_one_step(model, f)?,
    };
    let mut rows = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            rows.push(PairFactor {
                sigma_product: model.sigma()[i] * model.sigma()[j],
                factor: factors[i * m + j],
                i,
                j,
            });
        }
    }
    rows.sort_by(|a, b| {
        a.sigma_product
            .partial_cmp(&b.sigma_product)
            .expect("finite products")
            .then_with(|| (a.i, a.j).cmp(&(b.i, b.j)))
    });
    Ok(rows)
}
