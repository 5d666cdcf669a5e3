//! JSON experiment configuration. A single document drives every
//! subcommand; all fields are validated, with the offending field named,
//! before any computation starts.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crospec_core::error_analysis::{SearchConfig, WhiteNoiseScenario};
use crospec_core::forward_model::{decompose, synthesize, SpectrumSpec, SyntheticSpec};
use crospec_core::{ForwardModel, WelchConfig, Window};

use crate::formats::read_matrix_txt;
use crate::{CliError, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpectrumConfig {
    Explicit { values: Vec<f64> },
    Geometric { sigma1: f64, ratio: f64 },
}

/// Forward operator source: either a synthetic spec or a matrix file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix_file: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<SpectrumConfig>,
    /// Seed for the synthetic singular vectors.
    #[serde(default)]
    pub model_seed: u64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        // The default study operator: 20 sensors, 25 sources, geometric
        // spectrum with ratio 0.7.
        Self {
            matrix_file: None,
            m: Some(20),
            n: Some(25),
            spectrum: Some(SpectrumConfig::Geometric {
                sigma1: 1.0,
                ratio: 0.7,
            }),
            model_seed: 1,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WelchSection {
    pub segment_length: usize,
    pub overlap_fraction: f64,
    pub window: Window,
}

impl Default for WelchSection {
    fn default() -> Self {
        Self {
            segment_length: 256,
            overlap_fraction: 0.5,
            window: Window::Hann,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct SearchSection {
    /// Bounds for the λ grid; default `[1e-6, 1e3]·(α²/ω²)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rel_tol: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
    #[serde(default = "default_true")]
    pub emit_csv: bool,
    #[serde(default = "default_true")]
    pub emit_json: bool,
}

fn default_true() -> bool {
    true
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            emit_csv: true,
            emit_json: true,
        }
    }
}

/// λ lists for the `filter-factors` subcommand; empty lists fall back to
/// three per-method defaults scaled by the model spectrum.
#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct FilterFactorSection {
    #[serde(default)]
    pub tsvd_retained: Vec<usize>,
    #[serde(default)]
    pub tikhonov_lambdas: Vec<f64>,
    #[serde(default)]
    pub one_step_thresholds: Vec<f64>,
    #[serde(default)]
    pub one_step_lambdas: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub model: ModelConfig,
    pub omega2: f64,
    pub alpha2: f64,
    /// Time samples per replication.
    pub samples: usize,
    pub seed: u64,
    pub replications: usize,
    pub welch: WelchSection,
    pub search: SearchSection,
    pub output: OutputSection,
    pub filter_factors: FilterFactorSection,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            model: ModelConfig::default(),
            omega2: 1.0,
            alpha2: 1.0,
            samples: 1 << 16,
            seed: 7351,
            replications: 20,
            welch: WelchSection::default(),
            search: SearchSection::default(),
            output: OutputSection::default(),
            filter_factors: FilterFactorSection::default(),
        }
    }
}

fn fail(field: &str, message: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("field `{field}`: {message}"))
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| crate::io_err(path, e))?;
        let config: ExperimentConfig = serde_json::from_str(&text)?;
        Ok(config)
    }

    /// Validate every field, naming the offender, without touching the
    /// filesystem or running any computation.
    pub fn validate(&self) -> Result<()> {
        if let Some(file) = &self.model.matrix_file {
            if !file.exists() {
                return Err(fail(
                    "model.matrix_file",
                    format!("file not found: {}", file.display()),
                ));
            }
        } else {
            let m = self
                .model
                .m
                .ok_or_else(|| fail("model.m", "required when no matrix_file is given"))?;
            let n = self
                .model
                .n
                .ok_or_else(|| fail("model.n", "required when no matrix_file is given"))?;
            if m == 0 {
                return Err(fail("model.m", "must be >= 1"));
            }
            if n < m {
                return Err(fail("model.n", format!("must be >= model.m = {m}")));
            }
            match &self.model.spectrum {
                None => {
                    return Err(fail(
                        "model.spectrum",
                        "required when no matrix_file is given",
                    ))
                }
                Some(SpectrumConfig::Explicit { values }) => {
                    if values.len() != m {
                        return Err(fail(
                            "model.spectrum.values",
                            format!("need exactly {m} values, got {}", values.len()),
                        ));
                    }
                    if values.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
                        return Err(fail(
                            "model.spectrum.values",
                            "all singular values must be positive and finite",
                        ));
                    }
                }
                Some(SpectrumConfig::Geometric { sigma1, ratio }) => {
                    if !(*sigma1 > 0.0) || !sigma1.is_finite() {
                        return Err(fail("model.spectrum.sigma1", "must be positive"));
                    }
                    if !(*ratio > 0.0 && *ratio < 1.0) {
                        return Err(fail("model.spectrum.ratio", "must lie in (0, 1)"));
                    }
                }
            }
        }
        if !(self.omega2 > 0.0) || !self.omega2.is_finite() {
            return Err(fail("omega2", "must be positive and finite"));
        }
        if !(self.alpha2 >= 0.0) || !self.alpha2.is_finite() {
            return Err(fail("alpha2", "must be non-negative and finite"));
        }
        if self.samples < 1 {
            return Err(fail("samples", "must be >= 1"));
        }
        if self.replications < 1 {
            return Err(fail("replications", "must be >= 1"));
        }
        if self.welch.segment_length < 2 {
            return Err(fail("welch.segment_length", "must be >= 2"));
        }
        if !(0.0..1.0).contains(&self.welch.overlap_fraction) {
            return Err(fail("welch.overlap_fraction", "must lie in [0, 1)"));
        }
        if self.welch.segment_length > self.samples {
            return Err(fail(
                "welch.segment_length",
                format!("exceeds samples = {}", self.samples),
            ));
        }
        if let Some(p) = self.search.grid_points {
            if p < 3 {
                return Err(fail("search.grid_points", "must be >= 3"));
            }
        }
        if let (Some(lo), Some(hi)) = (self.search.lambda_min, self.search.lambda_max) {
            if !(lo > 0.0 && hi > lo) {
                return Err(fail(
                    "search.lambda_min",
                    "need 0 < lambda_min < lambda_max",
                ));
            }
        }
        if let Some(t) = self.search.rel_tol {
            if !(t > 0.0) {
                return Err(fail("search.rel_tol", "must be positive"));
            }
        }
        for (idx, k) in self.filter_factors.tsvd_retained.iter().enumerate() {
            if *k == 0 {
                return Err(fail(
                    "filter_factors.tsvd_retained",
                    format!("entry {idx} must be >= 1"),
                ));
            }
        }
        for (name, list) in [
            (
                "filter_factors.tikhonov_lambdas",
                &self.filter_factors.tikhonov_lambdas,
            ),
            (
                "filter_factors.one_step_thresholds",
                &self.filter_factors.one_step_thresholds,
            ),
            (
                "filter_factors.one_step_lambdas",
                &self.filter_factors.one_step_lambdas,
            ),
        ] {
            if list.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
                return Err(fail(name, "entries must be non-negative and finite"));
            }
        }
        Ok(())
    }

    /// Construct the forward model (synthetic or from the matrix file).
    pub fn build_model(&self) -> Result<ForwardModel> {
        if let Some(file) = &self.model.matrix_file {
            let g = read_matrix_txt(file)?;
            Ok(decompose(&g)?)
        } else {
            let spectrum = match self.model.spectrum.as_ref().expect("validated") {
                SpectrumConfig::Explicit { values } => SpectrumSpec::Explicit(values.clone()),
                SpectrumConfig::Geometric { sigma1, ratio } => SpectrumSpec::Geometric {
                    sigma1: *sigma1,
                    ratio: *ratio,
                },
            };
            Ok(synthesize(&SyntheticSpec {
                m: self.model.m.expect("validated"),
                n: self.model.n.expect("validated"),
                spectrum,
                seed: self.model.model_seed,
            })?)
        }
    }

    pub fn welch_config(&self) -> WelchConfig {
        WelchConfig {
            segment_length: self.welch.segment_length,
            overlap_fraction: self.welch.overlap_fraction,
            window: self.welch.window,
        }
    }

    pub fn scenario(&self) -> Result<WhiteNoiseScenario> {
        Ok(WhiteNoiseScenario {
            model: self.build_model()?,
            omega2: self.omega2,
            alpha2: self.alpha2,
            samples: self.samples,
            welch: self.welch_config(),
            seed: self.seed,
            replications: self.replications,
        })
    }

    /// The λ search/grid settings, with defaults scaled by `α²/ω²`.
    pub fn search_config(&self) -> Result<SearchConfig> {
        let c = self.alpha2 / self.omega2;
        let mut sc = SearchConfig::for_noise_ratio(if c > 0.0 { c } else { 1.0 })?;
        if let Some(lo) = self.search.lambda_min {
            sc.lambda_min = lo;
        }
        if let Some(hi) = self.search.lambda_max {
            sc.lambda_max = hi;
        }
        if let Some(p) = self.search.grid_points {
            sc.grid_points = p;
        }
        if let Some(t) = self.search.rel_tol {
            sc.rel_tol = t;
        }
        sc.validate()?;
        Ok(sc)
    }
}
