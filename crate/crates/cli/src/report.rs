//! Report rendering: pretty JSON documents and flat CSV summaries.
//!
//! All output is deterministic — field order is fixed by the struct
//! definitions, floats use shortest round-trip formatting, and nothing
//! records wall-clock time — so rerunning a command byte-identically
//! reproduces its files.

use std::path::Path;

use acsel_core::{
    lil_summary, ExperimentReport, FitOptions, FitResult, LilSummary, ModelSpec, SelectionReport,
};
use serde::Serialize;

use crate::error::{CliError, Result};

/// Serializes a document as pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(doc: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(doc)
        .map_err(|e| CliError::Numerical(format!("cannot serialize report: {e}")))?;
    text.push('\n');
    Ok(text)
}

/// Writes pretty JSON to `path`.
pub fn write_json<T: Serialize>(path: &Path, doc: &T) -> Result<()> {
    let text = to_json(doc)?;
    std::fs::write(path, text)
        .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))?;
    Ok(())
}

/// The `fit` subcommand's JSON document.
#[derive(Debug, Serialize)]
pub struct FitReport<'a> {
    /// Human-readable model label.
    pub model: String,
    /// The fitted spec.
    pub spec: &'a ModelSpec,
    /// Number of observations used.
    pub n: usize,
    /// Optimizer settings.
    pub options: &'a FitOptions,
    /// Estimate, objective value and optimizer diagnostics.
    pub result: &'a FitResult,
}

/// Quotes a CSV cell only when it holds a delimiter, quote or newline.
fn csv_cell(raw: &str) -> String {
    if raw.contains(',') || raw.contains('"') || raw.contains('\n') {
        format!("\"{}\"", raw.replace('"', "\"\""))
    } else {
        raw.to_string()
    }
}

fn opt_cell(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x}"),
        None => String::new(),
    }
}

/// Renders per-penalty, per-`n`, per-model selection frequencies.
///
/// One row per `(penalty, n, model)` triple plus a `failed` row each,
/// in report order.
pub fn render_frequency_csv(report: &ExperimentReport) -> String {
    let mut out = String::from("penalty,n,model,frequency\n");
    for (p, name) in report.penalty_names.iter().enumerate() {
        for (i, &n) in report.n_grid.iter().enumerate() {
            let row = &report.frequencies[p][i];
            for (m, label) in report.model_labels.iter().enumerate() {
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    csv_cell(name),
                    n,
                    csv_cell(label),
                    row[m]
                ));
            }
            out.push_str(&format!("{},{},failed,{}\n", csv_cell(name), n, row[report.model_labels.len()]));
        }
    }
    out
}

/// Renders the per-`n` summary of the true model's standardized errors.
///
/// Cells are left empty at sizes where every replication failed.
pub fn render_lil_csv(report: &ExperimentReport) -> String {
    let mut out = String::from("n,median_s_n,max_s_n\n");
    for (i, &n) in report.n_grid.iter().enumerate() {
        out.push_str(&format!(
            "{},{},{}\n",
            n,
            opt_cell(report.s_n_true_median[i]),
            opt_cell(report.s_n_true_max[i])
        ));
    }
    out
}

/// Renders per-overfitting-model, per-`n` median penalized-contrast gaps.
pub fn render_overfit_csv(report: &ExperimentReport) -> String {
    let mut out = String::from("model,n,median_gap\n");
    for (k, &m) in report.overfit_models.iter().enumerate() {
        for (i, &n) in report.n_grid.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{}\n",
                csv_cell(&report.model_labels[m]),
                n,
                opt_cell(report.overfit_gap_median[k][i])
            ));
        }
    }
    out
}

/// Writes the full `mc` output set under `dir`.
///
/// Emits `mc_report.json`, `mc_frequencies.csv`, `mc_lil.csv` and
/// `mc_overfit.csv` always, plus `mc_lil_trend.json` when the grid has
/// enough sizes (at least three) for the boundedness regression.
pub fn write_mc_outputs(dir: &Path, report: &ExperimentReport) -> Result<()> {
    write_json(&dir.join("mc_report.json"), report)?;
    let write_text = |name: &str, text: String| -> Result<()> {
        let path = dir.join(name);
        std::fs::write(&path, text)
            .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))
    };
    write_text("mc_frequencies.csv", render_frequency_csv(report))?;
    write_text("mc_lil.csv", render_lil_csv(report))?;
    write_text("mc_overfit.csv", render_overfit_csv(report))?;
    if let Ok(summary) = lil_summary(report) {
        write_lil_trend(&dir.join("mc_lil_trend.json"), &summary)?;
    }
    Ok(())
}

/// Writes a boundedness-trend summary as JSON.
pub fn write_lil_trend(path: &Path, summary: &LilSummary) -> Result<()> {
    write_json(path, summary)
}

/// Writes a selection report as JSON.
pub fn write_selection(path: &Path, report: &SelectionReport) -> Result<()> {
    write_json(path, report)
}
