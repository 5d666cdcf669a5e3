//! File formats: plain-text matrices with JSON sidecars, CSV emission for
//! ensembles, spectra, error curves and filter-factor tables.
//!
//! CSV dialect: comma separator, `.` decimal point, one header row, LF
//! line endings, floats printed with 17 significant digits so they
//! round-trip exactly.

use std::fmt::Write as _;
use std::path::Path;

use sha2::{Digest, Sha256};

use crospec_core::error_analysis::ErrorCurve;
use crospec_core::mat::RMat;
use crospec_core::regularizers::PairFactor;
use crospec_core::spectral::CrossSpectrum;
use crospec_core::stochastic_sim::TimeSeriesEnsemble;

use crate::{io_err, CliError, Result};

/// 17 significant digits; exact round-trip through `str::parse::<f64>()`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_text(path: &Path, content: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| io_err(parent, e))?;
    }
    std::fs::write(path, content).map_err(|e| io_err(path, e))
}

pub fn sha256_hex(content: &str) -> String {
    let digest = Sha256::digest(content.as_bytes());
    let mut out = String::with_capacity(64);
    for byte in digest {
        let _ = write!(out, "{byte:02x}");
    }
    out
}

// ---- matrices ----

/// One row per line, whitespace-separated entries, row-major.
pub fn matrix_to_txt(m: &RMat) -> String {
    let mut out = String::new();
    for i in 0..m.rows() {
        let row: Vec<String> = (0..m.cols()).map(|j| fmt_f64(m.get(i, j))).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn read_matrix_txt(path: &Path) -> Result<RMat> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row: std::result::Result<Vec<f64>, _> = line
            .split_whitespace()
            .map(|tok| tok.parse::<f64>())
            .collect();
        let row = row.map_err(|e| {
            CliError::Config(format!(
                "matrix file {}: line {}: {e}",
                path.display(),
                lineno + 1
            ))
        })?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(CliError::Config(format!(
                    "matrix file {}: ragged row at line {}",
                    path.display(),
                    lineno + 1
                )));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CliError::Config(format!(
            "matrix file {} is empty",
            path.display()
        )));
    }
    let (r, c) = (rows.len(), rows[0].len());
    Ok(RMat::from_rows(r, c, rows.into_iter().flatten().collect()))
}

/// Write `name.txt` plus the `name.json` sidecar `{m, n, sigma}`.
pub fn write_forward_model(
    dir: &Path,
    name: &str,
    model: &crospec_core::ForwardModel,
) -> Result<()> {
    write_text(&dir.join(format!("{name}.txt")), &matrix_to_txt(model.g()))?;
    let sidecar = serde_json::json!({
        "m": model.m(),
        "n": model.n(),
        "sigma": model.sigma(),
    });
    write_text(
        &dir.join(format!("{name}.json")),
        &format!("{}\n", serde_json::to_string_pretty(&sidecar)?),
    )
}

// ---- ensembles ----

/// Rows are time samples, columns are components; the leading comment
/// line carries the label, dimension and sample count.
pub fn ensemble_to_csv(series: &TimeSeriesEnsemble) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# label={} dim={} samples={}",
        series.label().as_str(),
        series.dim(),
        series.samples()
    );
    let header: Vec<String> = (0..series.dim()).map(|c| format!("c{c}")).collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for t in 0..series.samples() {
        let row: Vec<String> = (0..series.dim())
            .map(|c| fmt_f64(series.at(c, t)))
            .collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

// ---- spectra ----

/// Long format: one row per `(f, j, k)` with real and imaginary parts.
pub fn cross_spectrum_to_csv(s: &CrossSpectrum) -> String {
    let mut out = String::from("f,j,k,re,im\n");
    for f in 0..s.bins() {
        for j in 0..s.rows() {
            for k in 0..s.cols() {
                let v = s.entry(f, j, k);
                let _ = writeln!(out, "{f},{j},{k},{},{}", fmt_f64(v.re), fmt_f64(v.im));
            }
        }
    }
    out
}

/// Compact JSON for small dimensions: `data[f][j][k] = [re, im]`.
pub fn cross_spectrum_to_json(s: &CrossSpectrum) -> Result<String> {
    let data: Vec<Vec<Vec<[f64; 2]>>> = (0..s.bins())
        .map(|f| {
            (0..s.rows())
                .map(|j| {
                    (0..s.cols())
                        .map(|k| {
                            let v = s.entry(f, j, k);
                            [v.re, v.im]
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let doc = serde_json::json!({
        "rows": s.rows(),
        "cols": s.cols(),
        "bins": s.bins(),
        "data": data,
    });
    Ok(format!("{}\n", serde_json::to_string(&doc)?))
}

// ---- error curves ----

pub fn error_curves_to_csv(curves: &[&ErrorCurve]) -> String {
    let mut out = String::from("method,kind,source,lambda,epsilon\n");
    for curve in curves {
        for (l, e) in curve.grid().iter().zip(curve.values()) {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                curve.method.as_str(),
                curve.kind.as_str(),
                curve.source.as_str(),
                fmt_f64(*l),
                fmt_f64(*e)
            );
        }
    }
    out
}

// ---- filter-factor tables ----

/// Component indices are emitted 1-based to match the usual singular
/// value numbering.
pub fn pair_table_to_csv(rows: &[PairFactor], method: &str, approach: &str, lambda: f64) -> String {
    let mut out = String::from("sigma_product,factor,i,j,method,approach,lambda\n");
    for row in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{method},{approach},{}",
            fmt_f64(row.sigma_product),
            fmt_f64(row.factor),
            row.i + 1,
            row.j + 1,
            fmt_f64(lambda)
        );
    }
    out
}

/// Append rows of an already-started table (same header).
pub fn pair_table_append_csv(
    out: &mut String,
    rows: &[PairFactor],
    method: &str,
    approach: &str,
    lambda: f64,
) {
    for row in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{method},{approach},{}",
            fmt_f64(row.sigma_product),
            fmt_f64(row.factor),
            row.i + 1,
            row.j + 1,
            fmt_f64(lambda)
        );
    }
}
