//! Monte Carlo execution.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentSpec, SweepVariable};
use super::report::{summarize, SweepRow};
use crate::beamform::{
    solve_individual, solve_low_snr, solve_null_space, solve_suboptimal, solve_total, Design,
    IndividualPath, Method, PowerBudget, SolverConfig,
};
use crate::channel::{first_hop_rate, trial_rng, ChannelRealization, ChannelSampler};
use crate::error::{Error, Result};
use crate::linalg::LinalgError;

/// Largest tolerated fraction of failed trials per (grid point, method).
pub const MAX_FAILURE_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum TrialOutcome {
    Ok {
        rate_bits: f64,
        /// `min(C1, R_s)` when a source power is configured.
        overall_bits: Option<f64>,
        /// Certified ratio of the individual-budget bisection.
        t_max: Option<f64>,
        /// `λ₂/λ₁` of the SDR extraction.
        rank_ratio: Option<f64>,
    },
    Failed {
        reason: String,
    },
    /// The method does not apply to this instance (null space with M = 1).
    NotApplicable,
}

impl TrialOutcome {
    pub fn rate(&self) -> Option<f64> {
        match self {
            TrialOutcome::Ok { rate_bits, .. } => Some(*rate_bits),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub grid_index: usize,
    pub value: f64,
    pub trial: usize,
    pub method: Method,
    pub outcome: TrialOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub variable: SweepVariable,
    pub rows: Vec<SweepRow>,
    /// Every (grid point, trial, method) outcome, ordered by grid point, then
    /// trial, then method as configured.
    pub records: Vec<TrialRecord>,
}

impl SweepResult {
    pub fn records_for(&self, method: Method) -> impl Iterator<Item = &TrialRecord> {
        self.records.iter().filter(move |r| r.method == method)
    }

    pub fn row(&self, value: f64, method: Method) -> Option<&SweepRow> {
        self.rows
            .iter()
            .find(|r| r.value == value && r.method == method)
    }
}

/// Substream of the trial generator. Power sweeps reuse the same channels at
/// every grid point; relay sweeps draw fresh channels per grid point.
pub fn trial_stream(variable: SweepVariable, grid_index: usize, trial: usize) -> u64 {
    match variable {
        SweepVariable::TotalPower => trial as u64,
        SweepVariable::Relays => ((grid_index as u64) << 32) | trial as u64,
    }
}

/// The channel seen by `trial` at grid point `grid_index`.
pub fn trial_channel(
    spec: &ExperimentSpec,
    grid_index: usize,
    trial: usize,
) -> Result<ChannelRealization> {
    let value = spec.grid()[grid_index];
    let fading = spec.fading_at(value);
    let rng = trial_rng(
        fading.seed,
        trial_stream(spec.sweep.variable, grid_index, trial),
    );
    let noise = spec.n_relays_noise.expand(fading.relays)?;
    ChannelSampler::with_rng(fading, rng)?.draw(&noise, spec.n0)
}

/// Runs one method on one instance.
pub fn run_method(
    method: Method,
    ch: &ChannelRealization,
    budget: &PowerBudget,
    solver: &SolverConfig,
) -> Result<(Design, Option<f64>, Option<f64>)> {
    let p_t = budget.total();
    Ok(match method {
        Method::Total => (solve_total(ch, p_t)?, None, None),
        Method::NullSpace => (solve_null_space(ch, p_t)?, None, None),
        Method::LowSnr => (solve_low_snr(ch, p_t)?.design, None, None),
        Method::Suboptimal => (solve_suboptimal(ch, budget)?, None, None),
        Method::IndividualSdr | Method::IndividualSocp => {
            let path = if method == Method::IndividualSdr {
                IndividualPath::Sdr
            } else {
                IndividualPath::Socp
            };
            let sol = solve_individual(ch, budget, solver, path)?;
            (sol.design, Some(sol.t_max), sol.diagnostics.rank_ratio)
        }
    })
}

fn outcome(
    spec: &ExperimentSpec,
    method: Method,
    ch: &ChannelRealization,
    budget: &PowerBudget,
) -> TrialOutcome {
    match run_method(method, ch, budget, &spec.solver) {
        Ok((design, t_max, rank_ratio)) => {
            let overall_bits = match spec.p_s {
                Some(p_s) => match first_hop_rate(ch, p_s) {
                    Ok(c1) => Some(c1.min(design.rate)),
                    Err(e) => {
                        return TrialOutcome::Failed {
                            reason: e.to_string(),
                        }
                    }
                },
                None => None,
            };
            TrialOutcome::Ok {
                rate_bits: design.rate,
                overall_bits,
                t_max,
                rank_ratio,
            }
        }
        Err(Error::Linalg(LinalgError::EmptyNullSpace)) => TrialOutcome::NotApplicable,
        Err(e) => TrialOutcome::Failed {
            reason: e.to_string(),
        },
    }
}

/// Every method on one trial of one grid point.
fn run_trial(spec: &ExperimentSpec, grid_index: usize, trial: usize) -> Result<Vec<TrialRecord>> {
    let value = spec.grid()[grid_index];
    let ch = trial_channel(spec, grid_index, trial)?;
    let budget = spec.budget_rule.budget(spec.power_at(value), ch.relays())?;
    Ok(spec
        .methods
        .iter()
        .map(|&method| TrialRecord {
            grid_index,
            value,
            trial,
            method,
            outcome: outcome(spec, method, &ch, &budget),
        })
        .collect())
}

/// Runs every (grid point, trial) pair, in parallel, and averages per method.
///
/// Output depends only on the spec: trials use their own generator
/// substreams and results are reduced in trial order.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<SweepResult> {
    spec.validate()?;
    let grid = spec.grid();
    let mut rows = Vec::with_capacity(grid.len() * spec.methods.len());
    let mut records = Vec::with_capacity(grid.len() * spec.trials * spec.methods.len());
    for (gi, &value) in grid.iter().enumerate() {
        let per_trial: Vec<Vec<TrialRecord>> = (0..spec.trials)
            .into_par_iter()
            .map(|trial| run_trial(spec, gi, trial))
            .collect::<Result<_>>()?;
        let point: Vec<TrialRecord> = per_trial.into_iter().flatten().collect();
        for &method in &spec.methods {
            let row = summarize(
                spec,
                value,
                method,
                point.iter().filter(|r| r.method == method),
            );
            if row.trials_failed as f64 > MAX_FAILURE_FRACTION * spec.trials as f64 {
                let first_reason = point
                    .iter()
                    .find_map(|r| match (&r.outcome, r.method == method) {
                        (TrialOutcome::Failed { reason }, true) => Some(reason.clone()),
                        _ => None,
                    })
                    .unwrap_or_default();
                return Err(Error::TooManyFailures {
                    method: method.to_string(),
                    sweep_var: spec.sweep.variable.label().to_string(),
                    value,
                    failed: row.trials_failed,
                    trials: spec.trials,
                    first_reason,
                });
            }
            rows.push(row);
        }
        records.extend(point);
    }
    Ok(SweepResult {
        variable: spec.sweep.variable,
        rows,
        records,
    })
}

/// `run_experiment` restricted to relay-count sweeps.
pub fn run_relay_sweep(spec: &ExperimentSpec) -> Result<SweepResult> {
    if spec.sweep.variable != SweepVariable::Relays {
        return Err(Error::invalid(
            "sweep.variable",
            "expected a relay-count (M) sweep",
        ));
    }
    run_experiment(spec)
}
