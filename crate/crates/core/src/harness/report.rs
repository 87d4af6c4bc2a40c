//! Per-point summaries and CSV output.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::config::ExperimentSpec;
use super::run::{SweepResult, TrialOutcome, TrialRecord};
use crate::beamform::Method;
use crate::error::Result;

/// Averages over the successful trials of one (grid point, method) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub sweep_var: String,
    pub value: f64,
    pub method: Method,
    /// `None` when no trial succeeded.
    pub mean_rate_bits: Option<f64>,
    /// Sample standard deviation over `√trials_ok`.
    pub stderr: Option<f64>,
    pub trials_ok: usize,
    pub trials_failed: usize,
    pub trials_na: usize,
    pub mean_overall_bits: Option<f64>,
    pub stderr_overall: Option<f64>,
}

/// Mean and standard error of the mean.
pub fn mean_stderr(xs: &[f64]) -> Option<(f64, f64)> {
    let n = xs.len();
    if n == 0 {
        return None;
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return Some((mean, 0.0));
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    Some((mean, (var / n as f64).sqrt()))
}

pub(crate) fn summarize<'a>(
    spec: &ExperimentSpec,
    value: f64,
    method: Method,
    records: impl Iterator<Item = &'a TrialRecord>,
) -> SweepRow {
    let mut rates = Vec::new();
    let mut overall = Vec::new();
    let (mut failed, mut na) = (0, 0);
    for r in records {
        match &r.outcome {
            TrialOutcome::Ok {
                rate_bits,
                overall_bits,
                ..
            } => {
                rates.push(*rate_bits);
                overall.extend(*overall_bits);
            }
            TrialOutcome::Failed { .. } => failed += 1,
            TrialOutcome::NotApplicable => na += 1,
        }
    }
    let main = mean_stderr(&rates);
    let end_to_end = spec.p_s.and_then(|_| mean_stderr(&overall));
    SweepRow {
        sweep_var: spec.sweep.variable.label().to_string(),
        value,
        method,
        mean_rate_bits: main.map(|m| m.0),
        stderr: main.map(|m| m.1),
        trials_ok: rates.len(),
        trials_failed: failed,
        trials_na: na,
        mean_overall_bits: end_to_end.map(|m| m.0),
        stderr_overall: end_to_end.map(|m| m.1),
    }
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes one row per (grid point, method). The end-to-end columns are
/// present only when `with_overall` is set.
pub fn write_csv<W: Write>(result: &SweepResult, with_overall: bool, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec![
        "sweep_var",
        "value",
        "method",
        "mean_rate_bits",
        "stderr",
        "trials_ok",
        "trials_failed",
        "trials_na",
    ];
    if with_overall {
        header.extend(["mean_overall_bits", "stderr_overall"]);
    }
    w.write_record(&header)?;
    for row in &result.rows {
        let mut rec = vec![
            row.sweep_var.clone(),
            row.value.to_string(),
            row.method.to_string(),
            cell(row.mean_rate_bits),
            cell(row.stderr),
            row.trials_ok.to_string(),
            row.trials_failed.to_string(),
            row.trials_na.to_string(),
        ];
        if with_overall {
            rec.push(cell(row.mean_overall_bits));
            rec.push(cell(row.stderr_overall));
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// CSV text of a sweep.
pub fn to_csv(spec: &ExperimentSpec, result: &SweepResult) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(result, spec.p_s.is_some(), &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
}
