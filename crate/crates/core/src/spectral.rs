//! Welch cross-power-spectrum estimation and the cross-spectrum container.
//!
//! The estimator averages windowed-segment periodograms over `P`
//! overlapping segments of length `L`:
//!
//! `S(f) = scale · Σ_p x̂_p(f) x̂_p(f)ᴴ`,  `f = 0, ..., L-1`,
//!
//! with `scale = 1 / (P · Σ_t w(t)²)`. With this normalization a white
//! process of per-component variance `v` has expected spectrum `v·I` at
//! every bin, which is the flat target the closed-form error expressions
//! are written against. Segments that do not fill `L` samples are dropped;
//! there is no zero-padding or detrending.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::FftPlan;
use crate::mat::CMat;
use crate::math;
use crate::stochastic_sim::TimeSeriesEnsemble;

/// Segment window shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Window {
    Hann,
    Hamming,
    Rectangular,
}

impl Window {
    /// Coefficient `w(t)` for `t in 0..len` (periodic form).
    pub fn coefficient(&self, t: usize, len: usize) -> f64 {
        let phase = 2.0 * math::PI * t as f64 / len as f64;
        match self {
            Window::Hann => 0.5 - 0.5 * math::cos(phase),
            Window::Hamming => 0.54 - 0.46 * math::cos(phase),
            Window::Rectangular => 1.0,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Window::Hann => "hann",
            Window::Hamming => "hamming",
            Window::Rectangular => "rectangular",
        }
    }
}

/// Welch segmentation parameters. Defaults: Hann window, 50% overlap.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WelchConfig {
    pub segment_length: usize,
    /// Fraction of a segment shared with its successor, in `[0, 1)`.
    pub overlap_fraction: f64,
    pub window: Window,
}

impl WelchConfig {
    pub fn new(segment_length: usize) -> Self {
        Self {
            segment_length,
            overlap_fraction: 0.5,
            window: Window::Hann,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.segment_length < 2 {
            return Err(Error::Config(format!(
                "segment_length must be >= 2, got {}",
                self.segment_length
            )));
        }
        if !(0.0..1.0).contains(&self.overlap_fraction) {
            return Err(Error::Config(format!(
                "overlap_fraction must lie in [0, 1), got {}",
                self.overlap_fraction
            )));
        }
        Ok(())
    }

    /// Segment advance in samples (at least 1).
    pub fn hop(&self) -> usize {
        let overlap = (self.overlap_fraction * self.segment_length as f64) as usize;
        (self.segment_length - overlap).max(1)
    }

    /// Number of full segments available in `samples` data points.
    pub fn segment_count(&self, samples: usize) -> Result<usize> {
        self.validate()?;
        if samples < self.segment_length {
            return Err(Error::Config(format!(
                "segment_length {} exceeds sample count {}",
                self.segment_length, samples
            )));
        }
        Ok((samples - self.segment_length) / self.hop() + 1)
    }

    /// Window energy `W = (1/L) Σ_t w(t)²`.
    pub fn window_energy(&self) -> f64 {
        let l = self.segment_length;
        (0..l)
            .map(|t| {
                let w = self.window.coefficient(t, l);
                w * w
            })
            .sum::<f64>()
            / l as f64
    }
}

/// A frequency-indexed family of complex matrices: `bins` matrices of
/// shape `rows × cols`. Self-spectra are square and Hermitian with real
/// non-negative diagonals; cross-spectra between two different processes
/// are rectangular.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossSpectrum {
    rows: usize,
    cols: usize,
    bins: usize,
    data: Vec<Complex64>,
}

impl CrossSpectrum {
    pub fn zeros(rows: usize, cols: usize, bins: usize) -> Self {
        Self {
            rows,
            cols,
            bins,
            data: vec![Complex64::new(0.0, 0.0); rows * cols * bins],
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn entry(&self, f: usize, j: usize, k: usize) -> Complex64 {
        debug_assert!(f < self.bins && j < self.rows && k < self.cols);
        self.data[(f * self.rows + j) * self.cols + k]
    }

    #[inline]
    pub fn set_entry(&mut self, f: usize, j: usize, k: usize, v: Complex64) {
        debug_assert!(f < self.bins && j < self.rows && k < self.cols);
        self.data[(f * self.rows + j) * self.cols + k] = v;
    }

    #[inline]
    fn add_entry(&mut self, f: usize, j: usize, k: usize, v: Complex64) {
        self.data[(f * self.rows + j) * self.cols + k] += v;
    }

    /// The matrix at bin `f`, copied out.
    pub fn matrix(&self, f: usize) -> CMat {
        CMat::from_fn(self.rows, self.cols, |j, k| self.entry(f, j, k))
    }

    pub fn set_matrix(&mut self, f: usize, m: &CMat) {
        assert_eq!((m.rows(), m.cols()), (self.rows, self.cols));
        for j in 0..self.rows {
            for k in 0..self.cols {
                self.set_entry(f, j, k, m.get(j, k));
            }
        }
    }

    /// Column-stacked vectorization at bin `f`: element `j + k·rows` is
    /// entry `(j, k)`.
    pub fn vectorized(&self, f: usize) -> Vec<Complex64> {
        self.matrix(f).vectorized()
    }

    pub fn frobenius_at(&self, f: usize) -> f64 {
        let mut acc = 0.0;
        for j in 0..self.rows {
            for k in 0..self.cols {
                acc += self.entry(f, j, k).norm_sqr();
            }
        }
        math::sqrt(acc)
    }

    /// Largest relative Hermitian defect over all bins.
    pub fn max_hermitian_defect(&self) -> f64 {
        assert!(self.is_square());
        let mut worst: f64 = 0.0;
        for f in 0..self.bins {
            let m = self.matrix(f);
            let norm = m.frobenius_norm();
            if norm > 0.0 {
                worst = worst.max(m.hermitian_defect() / norm);
            }
        }
        worst
    }

    pub fn scale(&self, s: f64) -> CrossSpectrum {
        CrossSpectrum {
            rows: self.rows,
            cols: self.cols,
            bins: self.bins,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn sub(&self, other: &CrossSpectrum) -> Result<CrossSpectrum> {
        if (self.rows, self.cols, self.bins) != (other.rows, other.cols, other.bins) {
            return Err(Error::Shape(format!(
                "cross-spectrum shape mismatch: {}x{}x{} vs {}x{}x{}",
                self.rows, self.cols, self.bins, other.rows, other.cols, other.bins
            )));
        }
        Ok(CrossSpectrum {
            rows: self.rows,
            cols: self.cols,
            bins: self.bins,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    /// Conjugate the whole family by a real matrix: `A S(f) Aᵗ` per bin.
    pub fn conjugate_by(&self, a: &crate::mat::RMat) -> Result<CrossSpectrum> {
        if a.cols() != self.rows || !self.is_square() {
            return Err(Error::Shape(format!(
                "cannot conjugate {}x{} spectrum by {}x{} matrix",
                self.rows,
                self.cols,
                a.rows(),
                a.cols()
            )));
        }
        let mut out = CrossSpectrum::zeros(a.rows(), a.rows(), self.bins);
        for f in 0..self.bins {
            out.set_matrix(f, &self.matrix(f).sandwich_real(a));
        }
        Ok(out)
    }
}

fn windowed_segment_ffts(
    x: &TimeSeriesEnsemble,
    cfg: &WelchConfig,
    plan: &FftPlan,
    weights: &[f64],
    start: usize,
) -> Vec<Vec<Complex64>> {
    let l = cfg.segment_length;
    (0..x.dim())
        .map(|c| {
            let mut buf: Vec<Complex64> = (0..l)
                .map(|t| Complex64::new(x.at(c, start + t) * weights[t], 0.0))
                .collect();
            plan.forward(&mut buf);
            buf
        })
        .collect()
}

/// Welch estimate of the cross-power spectrum of `x` (square, Hermitian).
pub fn welch_cross_spectrum(x: &TimeSeriesEnsemble, cfg: &WelchConfig) -> Result<CrossSpectrum> {
    let segments = cfg.segment_count(x.samples())?;
    let l = cfg.segment_length;
    let dim = x.dim();
    let weights: Vec<f64> = (0..l).map(|t| cfg.window.coefficient(t, l)).collect();
    let sum_w2: f64 = weights.iter().map(|w| w * w).sum();
    let plan = FftPlan::new(l);

    let mut out = CrossSpectrum::zeros(dim, dim, l);
    for p in 0..segments {
        let seg = windowed_segment_ffts(x, cfg, &plan, &weights, p * cfg.hop());
        for f in 0..l {
            for j in 0..dim {
                for k in j..dim {
                    out.add_entry(f, j, k, seg[j][f] * seg[k][f].conj());
                }
            }
        }
    }
    let scale = 1.0 / (segments as f64 * sum_w2);
    for f in 0..l {
        for j in 0..dim {
            let d = out.entry(f, j, j);
            out.set_entry(f, j, j, Complex64::new(d.re * scale, 0.0));
            for k in (j + 1)..dim {
                let v = out.entry(f, j, k) * scale;
                out.set_entry(f, j, k, v);
                out.set_entry(f, k, j, v.conj());
            }
        }
    }
    Ok(out)
}

/// Welch estimate of the rectangular cross-spectrum between two processes
/// observed over the same time span and segmentation.
pub fn cross_spectrum_between(
    a: &TimeSeriesEnsemble,
    b: &TimeSeriesEnsemble,
    cfg: &WelchConfig,
) -> Result<CrossSpectrum> {
    if a.samples() != b.samples() {
        return Err(Error::Shape(format!(
            "sample counts differ: {} vs {}",
            a.samples(),
            b.samples()
        )));
    }
    let segments = cfg.segment_count(a.samples())?;
    let l = cfg.segment_length;
    let weights: Vec<f64> = (0..l).map(|t| cfg.window.coefficient(t, l)).collect();
    let sum_w2: f64 = weights.iter().map(|w| w * w).sum();
    let plan = FftPlan::new(l);

    let mut out = CrossSpectrum::zeros(a.dim(), b.dim(), l);
    for p in 0..segments {
        let start = p * cfg.hop();
        let seg_a = windowed_segment_ffts(a, cfg, &plan, &weights, start);
        let seg_b = windowed_segment_ffts(b, cfg, &plan, &weights, start);
        for f in 0..l {
            for j in 0..a.dim() {
                for k in 0..b.dim() {
                    out.add_entry(f, j, k, seg_a[j][f] * seg_b[k][f].conj());
                }
            }
        }
    }
    Ok(out.scale(1.0 / (segments as f64 * sum_w2)))
}

/// Population cross-spectrum of a white process: `variance · I` at every
/// bin, flat in frequency.
pub fn theoretical_white_spectrum(dim: usize, variance: f64, bins: usize) -> CrossSpectrum {
    let mut out = CrossSpectrum::zeros(dim, dim, bins);
    for f in 0..bins {
        for j in 0..dim {
            out.set_entry(f, j, j, Complex64::new(variance, 0.0));
        }
    }
    out
}
