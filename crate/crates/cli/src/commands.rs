//! The four experiment subcommands. Every command is a pure function of
//! its configuration: re-running with the same config (and seed) produces
//! byte-identical data files; only the manifest timestamp differs.

use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use crospec_core::error_analysis::{
    closed_form_curves, empirical_error_curves_on_grid, report_lines, verify_theorems, ErrorCurve,
};
use crospec_core::regularizers::{
    pair_filter_table, CrossSpectrumFilter, FilterSpec, PairFilterSpec,
};
use crospec_core::rng::child_seed;
use crospec_core::stochastic_sim::{
    forward_measure, simulate_white, SeriesLabel, WhiteProcessSpec,
};
use crospec_core::ForwardModel;

use crate::config::ExperimentConfig;
use crate::formats::{
    ensemble_to_csv, error_curves_to_csv, pair_table_append_csv, sha256_hex, write_forward_model,
    write_text,
};
use crate::{CliError, Result};

fn unix_timestamp() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Simulate one realization of the source, noise and measurement
/// processes and write them as CSV plus a manifest with checksums.
pub fn cmd_simulate(config: &ExperimentConfig) -> Result<()> {
    config.validate()?;
    let model = config.build_model()?;
    let out = &config.output.dir;

    let x = simulate_white(
        &WhiteProcessSpec {
            dim: model.n(),
            variance: config.omega2,
            seed: child_seed(config.seed, 0),
        },
        config.samples,
        SeriesLabel::Source,
    )?;
    let noise_variance = if config.alpha2 > 0.0 {
        config.alpha2
    } else {
        // Noise-free runs still need an n.csv; emit explicit zeros.
        f64::MIN_POSITIVE
    };
    let n = if config.alpha2 > 0.0 {
        simulate_white(
            &WhiteProcessSpec {
                dim: model.m(),
                variance: noise_variance,
                seed: child_seed(config.seed, 1),
            },
            config.samples,
            SeriesLabel::Noise,
        )?
    } else {
        crospec_core::TimeSeriesEnsemble::new(
            crospec_core::mat::RMat::zeros(model.m(), config.samples),
            SeriesLabel::Noise,
        )?
    };
    let y = forward_measure(&model, &x, &n)?;

    let files = [
        ("x.csv", ensemble_to_csv(&x)),
        ("n.csv", ensemble_to_csv(&n)),
        ("y.csv", ensemble_to_csv(&y)),
    ];
    let mut checksums = serde_json::Map::new();
    for (name, content) in &files {
        write_text(&out.join(name), content)?;
        checksums.insert(
            (*name).to_string(),
            serde_json::Value::String(sha256_hex(content)),
        );
    }
    write_forward_model(out, "forward_model", &model)?;

    let manifest = serde_json::json!({
        "command": "simulate",
        "seed": config.seed,
        "omega2": config.omega2,
        "alpha2": config.alpha2,
        "shapes": {
            "x": [x.dim(), x.samples()],
            "n": [n.dim(), n.samples()],
            "y": [y.dim(), y.samples()],
        },
        "checksums": checksums,
        "created_unix": unix_timestamp(),
    });
    write_text(
        &out.join("manifest.json"),
        &format!("{}\n", serde_json::to_string_pretty(&manifest)?),
    )
}

fn argmin_entry(curve: &ErrorCurve) -> serde_json::Value {
    let (lambda, epsilon) = curve.argmin();
    serde_json::json!({
        "method": curve.method.as_str(),
        "kind": curve.kind.as_str(),
        "source": curve.source.as_str(),
        "lambda_star": lambda,
        "epsilon_star": epsilon,
    })
}

/// Empirical and closed-form error curves side by side, with an argmin
/// summary.
pub fn cmd_error_curves(config: &ExperimentConfig) -> Result<()> {
    config.validate()?;
    if config.alpha2 == 0.0 {
        return Err(CliError::Config(
            "field `alpha2`: error curves need alpha2 > 0 (run verify-theorems for the \
             noise-free case)"
                .into(),
        ));
    }
    let scenario = config.scenario()?;
    let grid = config.search_config()?.grid_with_zero();
    let empirical = empirical_error_curves_on_grid(&scenario, &grid)?;
    let closed = closed_form_curves(
        &scenario.model,
        config.omega2,
        config.alpha2,
        config.samples,
        config.welch.segment_length,
        &grid,
    )?;

    let curves = [
        &empirical.tsvd_signal,
        &empirical.tsvd_spectrum,
        &empirical.tikhonov_signal,
        &empirical.tikhonov_spectrum,
        &closed.tsvd_signal,
        &closed.tsvd_spectrum,
        &closed.tikhonov_signal,
        &closed.tikhonov_spectrum,
    ];
    let out = &config.output.dir;
    if config.output.emit_csv {
        write_text(&out.join("error_curves.csv"), &error_curves_to_csv(&curves))?;
    }
    if config.output.emit_json {
        let summary = serde_json::json!({
            "argmins": curves.iter().map(|c| argmin_entry(c)).collect::<Vec<_>>(),
        });
        write_text(
            &out.join("argmin_summary.json"),
            &format!("{}\n", serde_json::to_string_pretty(&summary)?),
        )?;
    }
    Ok(())
}

/// Run the full verification suite; returns whether every closed-form
/// check passed.
pub fn cmd_verify_theorems(config: &ExperimentConfig) -> Result<bool> {
    config.validate()?;
    let scenario = config.scenario()?;
    let report = verify_theorems(&scenario)?;
    for line in report_lines(&report) {
        println!("{line}");
    }
    write_text(
        &config.output.dir.join("report.json"),
        &format!("{}\n", serde_json::to_string_pretty(&report)?),
    )?;
    Ok(report.passed)
}

fn default_retained(m: usize) -> Vec<usize> {
    let mut counts: Vec<usize> = [m.div_ceil(4), m.div_ceil(2), (3 * m).div_ceil(4)]
        .into_iter()
        .map(|k| k.clamp(1, m))
        .collect();
    counts.dedup();
    counts
}

fn default_scaled(scale: f64) -> Vec<f64> {
    vec![0.01 * scale, 0.1 * scale, scale]
}

/// Filter-factor tables behind the pair-factor scatter plots: one CSV per
/// (approach, method), three regularization levels each by default.
pub fn cmd_filter_factors(config: &ExperimentConfig) -> Result<()> {
    config.validate()?;
    let model = config.build_model()?;
    let out = &config.output.dir;
    let sigma1 = model.sigma()[0];
    let sigma = model.sigma().to_vec();

    let retained = if config.filter_factors.tsvd_retained.is_empty() {
        default_retained(model.m())
    } else {
        config.filter_factors.tsvd_retained.clone()
    };
    for k in &retained {
        if *k > model.m() {
            return Err(CliError::Config(format!(
                "field `filter_factors.tsvd_retained`: {k} exceeds sensor count {}",
                model.m()
            )));
        }
    }
    let tik_lambdas = if config.filter_factors.tikhonov_lambdas.is_empty() {
        default_scaled(sigma1 * sigma1)
    } else {
        config.filter_factors.tikhonov_lambdas.clone()
    };
    let thresholds = if config.filter_factors.one_step_thresholds.is_empty() {
        retained
            .iter()
            .map(|&k| sigma[k - 1] * sigma[k - 1])
            .collect()
    } else {
        config.filter_factors.one_step_thresholds.clone()
    };
    let one_step_lambdas = if config.filter_factors.one_step_lambdas.is_empty() {
        default_scaled(sigma1 * sigma1 * sigma1 * sigma1)
    } else {
        config.filter_factors.one_step_lambdas.clone()
    };

    write_table(
        &model,
        out,
        "filter_factors_two_step_tsvd.csv",
        "tsvd",
        "two_step",
        retained.iter().map(|&k| {
            (
                k as f64,
                CrossSpectrumFilter::TwoStep(FilterSpec::Tsvd { retained: k }),
            )
        }),
    )?;
    write_table(
        &model,
        out,
        "filter_factors_two_step_tikhonov.csv",
        "tikhonov",
        "two_step",
        tik_lambdas.iter().map(|&l| {
            (
                l,
                CrossSpectrumFilter::TwoStep(FilterSpec::Tikhonov { lambda: l }),
            )
        }),
    )?;
    write_table(
        &model,
        out,
        "filter_factors_one_step_tsvd.csv",
        "tsvd",
        "one_step",
        thresholds.iter().map(|&t| {
            (
                t,
                CrossSpectrumFilter::OneStep(PairFilterSpec::Tsvd { threshold: t }),
            )
        }),
    )?;
    write_table(
        &model,
        out,
        "filter_factors_one_step_tikhonov.csv",
        "tikhonov",
        "one_step",
        one_step_lambdas.iter().map(|&l| {
            (
                l,
                CrossSpectrumFilter::OneStep(PairFilterSpec::Tikhonov { lambda: l }),
            )
        }),
    )?;
    Ok(())
}

fn write_table(
    model: &ForwardModel,
    out: &Path,
    name: &str,
    method: &str,
    approach: &str,
    filters: impl Iterator<Item = (f64, CrossSpectrumFilter)>,
) -> Result<()> {
    let mut csv = String::from("sigma_product,factor,i,j,method,approach,lambda\n");
    for (lambda, filter) in filters {
        let rows = pair_filter_table(model, &filter)?;
        pair_table_append_csv(&mut csv, &rows, method, approach, lambda);
    }
    write_text(&out.join(name), &csv)
}
