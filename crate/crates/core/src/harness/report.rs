//! Report files.
//!
//! A run directory holds:
//!
//! - `runs.csv`: one row per (method, seed, training size)
//! - `aggregate.csv` (`scaling.csv` for scaling runs), `aggregate.txt`,
//!   `aggregate.json`: the per-method table, in the formats requested
//! - `histogram.csv`: Δ histogram of the first seed's dataset
//! - `manifest.toml`: the resolved config, loadable with `--config`
//!
//! Nothing written depends on wall-clock time or the output location, so
//! rerunning a manifest reproduces every file byte for byte.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::harness::config::{ExperimentConfig, Format};
use crate::harness::runner::{ExperimentOutcome, MethodAggregate};
use crate::metrics::{HistogramBin, Interval};

fn opt(x: Option<f64>) -> String {
    x.map_or_else(String::new, |v| v.to_string())
}

/// `mean±half_width` in percent with one decimal, e.g. `1.8±0.3`.
pub fn percent(iv: &Interval) -> String {
    format!("{:.1}±{:.1}", 100.0 * iv.mean, 100.0 * iv.half_width)
}

pub fn runs_csv(outcome: &ExperimentOutcome) -> Result<String> {
    if outcome.records.is_empty() {
        return Err(Error::Config("no runs to report".into()));
    }
    let mut s = String::from("method,seed,n_train,n_fit,n_test,nec,error_rate,ratio,delta_mae\n");
    for r in &outcome.records {
        let m = &r.report;
        writeln!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            r.method,
            r.seed,
            r.n_train,
            r.n_fit,
            m.n,
            m.nec,
            m.error_rate,
            opt(m.ratio),
            opt(m.delta_mae)
        )
        .unwrap();
    }
    Ok(s)
}

fn check_aggregates(aggs: &[MethodAggregate]) -> Result<()> {
    if aggs.is_empty() {
        Err(Error::Config("no aggregates to report".into()))
    } else {
        Ok(())
    }
}

pub fn aggregate_csv(aggs: &[MethodAggregate]) -> Result<String> {
    check_aggregates(aggs)?;
    let mut s = String::from(
        "method,n_train,n_seeds,nec_mean,nec_half_width,error_rate_mean,error_rate_half_width,ratio,delta_mae_mean,delta_mae_half_width\n",
    );
    for a in aggs {
        let r = &a.report;
        writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{}",
            a.method,
            a.n_train,
            r.n_seeds,
            r.nec.mean,
            r.nec.half_width,
            r.error_rate.mean,
            r.error_rate.half_width,
            opt(r.ratio()),
            opt(r.delta_mae.map(|i| i.mean)),
            opt(r.delta_mae.map(|i| i.half_width))
        )
        .unwrap();
    }
    Ok(s)
}

/// Aligned plain-text table with percentages and 95% half-widths.
pub fn aggregate_text(aggs: &[MethodAggregate]) -> Result<String> {
    check_aggregates(aggs)?;
    let header = ["method", "n_train", "NEC (%)", "error (%)", "error/NEC", "delta MAE"];
    let rows: Vec<[String; 6]> = aggs
        .iter()
        .map(|a| {
            let r = &a.report;
            [
                a.method.to_string(),
                a.n_train.to_string(),
                percent(&r.nec),
                percent(&r.error_rate),
                r.ratio().map_or_else(|| "-".into(), |x| format!("{x:.2}")),
                r.delta_mae
                    .map_or_else(|| "-".into(), |i| format!("{:.3}±{:.3}", i.mean, i.half_width)),
            ]
        })
        .collect();
    let mut widths = header.map(|h| h.chars().count());
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut s = String::new();
    let mut line = |cells: &[&str]| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, &w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
            .collect();
        s.push_str(padded.join("  ").trim_end());
        s.push('\n');
    };
    line(&header);
    for row in &rows {
        line(&row.each_ref().map(String::as_str));
    }
    Ok(s)
}

pub fn aggregate_json(aggs: &[MethodAggregate]) -> Result<String> {
    check_aggregates(aggs)?;
    let mut s = serde_json::to_string_pretty(aggs)
        .map_err(|e| Error::Config(format!("serializing aggregates: {e}")))?;
    s.push('\n');
    Ok(s)
}

pub fn histogram_csv(bins: &[HistogramBin]) -> String {
    let mut s = String::from("low,high,count\n");
    for b in bins {
        writeln!(s, "{},{},{}", b.low, b.high, b.count).unwrap();
    }
    s
}

pub fn manifest(cfg: &ExperimentConfig) -> Result<String> {
    Ok(format!(
        "# costeval {} run manifest; pass it to --config to rerun\n{}",
        env!("CARGO_PKG_VERSION"),
        cfg.to_flat_toml()?
    ))
}

/// Writes every report file into `dir` (created if needed) and returns the
/// paths written.
pub fn emit_reports(outcome: &ExperimentOutcome, cfg: &ExperimentConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<(&str, String)> = vec![("runs.csv", runs_csv(outcome)?)];
    for format in &cfg.output.formats {
        files.push(match format {
            Format::Csv if outcome.scaling => ("scaling.csv", aggregate_csv(&outcome.aggregates)?),
            Format::Csv => ("aggregate.csv", aggregate_csv(&outcome.aggregates)?),
            Format::Text => ("aggregate.txt", aggregate_text(&outcome.aggregates)?),
            Format::Json => ("aggregate.json", aggregate_json(&outcome.aggregates)?),
        });
    }
    files.push(("histogram.csv", histogram_csv(&outcome.histogram)));
    files.push(("manifest.toml", manifest(cfg)?));

    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    files
        .into_iter()
        .map(|(name, body)| {
            let path = dir.join(name);
            fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
            Ok(path)
        })
        .collect()
}
