//! Realizations of the white Gaussian source and noise processes and of
//! the measurement process `y(t) = G x(t) + n(t)`.
//!
//! Everything is discrete time with unit sampling interval. Simulation is
//! deterministic given a seed; independent replications derive child seeds
//! through [`crate::rng::child_seed`].

use alloc::format;

use crate::error::{Error, Result};
use crate::forward_model::{inverse_operator, ForwardModel};
use crate::mat::RMat;
use crate::regularizers::FilterSpec;
use crate::rng::SplitMix64;

/// What a time series represents; carried for labeling and file headers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SeriesLabel {
    Source,
    Noise,
    Measurement,
    Reconstruction,
}

impl SeriesLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            SeriesLabel::Source => "source",
            SeriesLabel::Noise => "noise",
            SeriesLabel::Measurement => "measurement",
            SeriesLabel::Reconstruction => "reconstruction",
        }
    }
}

/// A `dim × T` block of real-valued sample paths.
#[derive(Debug, Clone)]
pub struct TimeSeriesEnsemble {
    data: RMat,
    label: SeriesLabel,
}

impl TimeSeriesEnsemble {
    pub fn new(data: RMat, label: SeriesLabel) -> Result<Self> {
        if data.rows() == 0 || data.cols() == 0 {
            return Err(Error::InvalidSpec(
                "ensemble must have dim >= 1 and T >= 1".into(),
            ));
        }
        if data.data().iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidSpec(
                "ensemble contains non-finite entries".into(),
            ));
        }
        Ok(Self { data, label })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.data.rows()
    }

    /// Number of time samples T.
    #[inline]
    pub fn samples(&self) -> usize {
        self.data.cols()
    }

    pub fn label(&self) -> SeriesLabel {
        self.label
    }

    pub fn data(&self) -> &RMat {
        &self.data
    }

    /// Component `c` at time `t`.
    #[inline]
    pub fn at(&self, c: usize, t: usize) -> f64 {
        self.data.get(c, t)
    }

    pub fn with_label(mut self, label: SeriesLabel) -> Self {
        self.label = label;
        self
    }
}

/// Specification of an i.i.d. zero-mean Gaussian process.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WhiteProcessSpec {
    pub dim: usize,
    pub variance: f64,
    pub seed: u64,
}

impl WhiteProcessSpec {
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::InvalidSpec("process dim must be >= 1".into()));
        }
        if !(self.variance > 0.0) || !self.variance.is_finite() {
            return Err(Error::InvalidSpec(format!(
                "process variance must be positive and finite, got {}",
                self.variance
            )));
        }
        Ok(())
    }
}

/// Draw `T` samples of a white Gaussian process with per-component
/// variance `spec.variance`. Samples are generated time-major (all
/// components at t = 0, then t = 1, ...).
pub fn simulate_white(
    spec: &WhiteProcessSpec,
    samples: usize,
    label: SeriesLabel,
) -> Result<TimeSeriesEnsemble> {
    spec.validate()?;
    if samples == 0 {
        return Err(Error::InvalidSpec("sample count T must be >= 1".into()));
    }
    let scale = crate::math::sqrt(spec.variance);
    let mut rng = SplitMix64::new(spec.seed);
    let mut data = RMat::zeros(spec.dim, samples);
    for t in 0..samples {
        for c in 0..spec.dim {
            data.set(c, t, scale * rng.next_gaussian());
        }
    }
    TimeSeriesEnsemble::new(data, label)
}

/// Measurement process `y(t) = G x(t) + n(t)`.
pub fn forward_measure(
    model: &ForwardModel,
    x: &TimeSeriesEnsemble,
    n: &TimeSeriesEnsemble,
) -> Result<TimeSeriesEnsemble> {
    if x.dim() != model.n() {
        return Err(Error::Shape(format!(
            "source dim {} does not match N = {}",
            x.dim(),
            model.n()
        )));
    }
    if n.dim() != model.m() {
        return Err(Error::Shape(format!(
            "noise dim {} does not match M = {}",
            n.dim(),
            model.m()
        )));
    }
    if x.samples() != n.samples() {
        return Err(Error::Shape(format!(
            "sample counts differ: {} vs {}",
            x.samples(),
            n.samples()
        )));
    }
    let y = model.g().mul(x.data()).add(n.data());
    TimeSeriesEnsemble::new(y, SeriesLabel::Measurement)
}

/// Regularized reconstruction `x_λ(t) = W_λ y(t)`.
pub fn reconstruct(
    model: &ForwardModel,
    filter: &FilterSpec,
    y: &TimeSeriesEnsemble,
) -> Result<TimeSeriesEnsemble> {
    if y.dim() != model.m() {
        return Err(Error::Shape(format!(
            "measurement dim {} does not match M = {}",
            y.dim(),
            model.m()
        )));
    }
    let w = inverse_operator(model, filter)?;
    TimeSeriesEnsemble::new(w.mul(y.data()), SeriesLabel::Reconstruction)
}
