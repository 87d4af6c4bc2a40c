//! Experiment configuration.

use serde::{Deserialize, Serialize};

use crate::beamform::{Method, PowerBudget, SolverConfig};
use crate::channel::FadingSpec;
use crate::error::{Error, Result};
use crate::linalg::MAX_DIM;

/// Environment variable that replaces the configured seed.
pub const SEED_ENV: &str = "CRB_SEED";

pub const DEFAULT_PT_GRID: [f64; 7] = [0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0];
pub const DEFAULT_M_GRID: [f64; 9] = [2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0];
pub const DEFAULT_METHODS: [Method; 4] = [
    Method::Total,
    Method::IndividualSdr,
    Method::IndividualSocp,
    Method::Suboptimal,
];

/// Fading scales. `relays` is required for power sweeps and ignored when
/// the relay count is swept.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FadingConfig {
    #[serde(default = "one")]
    pub sigma_g: f64,
    pub sigma_h: f64,
    pub sigma_z: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relays: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

fn one() -> f64 {
    1.0
}

/// A scalar applied to every relay, or one value per relay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PerRelay {
    Scalar(f64),
    List(Vec<f64>),
}

impl Default for PerRelay {
    fn default() -> Self {
        PerRelay::Scalar(1.0)
    }
}

impl PerRelay {
    pub fn expand(&self, relays: usize) -> Result<Vec<f64>> {
        match self {
            PerRelay::Scalar(v) => Ok(vec![*v; relays]),
            PerRelay::List(v) if v.len() == relays => Ok(v.clone()),
            PerRelay::List(v) => Err(Error::invalid(
                "n_relays_noise",
                format!("{} values given for {relays} relays", v.len()),
            )),
        }
    }

    fn values(&self) -> &[f64] {
        match self {
            PerRelay::Scalar(v) => std::slice::from_ref(v),
            PerRelay::List(v) => v,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BudgetRule {
    /// `p_m = P_T / M`.
    EqualSplit,
    /// `p_m = P_T s_m / Σ s`, from relative shares `s`.
    Explicit(Vec<f64>),
}

impl Default for BudgetRule {
    fn default() -> Self {
        BudgetRule::EqualSplit
    }
}

impl BudgetRule {
    pub fn budget(&self, p_t: f64, relays: usize) -> Result<PowerBudget> {
        match self {
            BudgetRule::EqualSplit => PowerBudget::equal_split(p_t, relays),
            BudgetRule::Explicit(shares) => {
                if shares.len() != relays {
                    return Err(Error::invalid(
                        "budget_rule",
                        format!("{} shares given for {relays} relays", shares.len()),
                    ));
                }
                let sum: f64 = shares.iter().sum();
                PowerBudget::new(shares.iter().map(|s| p_t * s / sum).collect())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SweepVariable {
    #[serde(rename = "P_T", alias = "p_t")]
    TotalPower,
    #[serde(rename = "M", alias = "m")]
    Relays,
}

impl SweepVariable {
    pub fn label(self) -> &'static str {
        match self {
            SweepVariable::TotalPower => "P_T",
            SweepVariable::Relays => "M",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub variable: SweepVariable,
    /// Defaults to `DEFAULT_PT_GRID` or `DEFAULT_M_GRID`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Vec<f64>>,
}

impl Sweep {
    pub fn grid(&self) -> Vec<f64> {
        match (&self.grid, self.variable) {
            (Some(g), _) => g.clone(),
            (None, SweepVariable::TotalPower) => DEFAULT_PT_GRID.to_vec(),
            (None, SweepVariable::Relays) => DEFAULT_M_GRID.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub fading: FadingConfig,
    pub n0: f64,
    #[serde(default)]
    pub n_relays_noise: PerRelay,
    #[serde(default)]
    pub budget_rule: BudgetRule,
    pub sweep: Sweep,
    /// Total relay power held fixed during a relay-count sweep.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_t: Option<f64>,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    pub trials: usize,
    /// Overrides `fading.seed`; `CRB_SEED` overrides both.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// First-hop source power; enables the end-to-end rate columns.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_s: Option<f64>,
    #[serde(default)]
    pub solver: SolverConfig,
}

fn default_methods() -> Vec<Method> {
    DEFAULT_METHODS.to_vec()
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(
            field,
            format!("{v} is not a positive number"),
        ))
    }
}

impl ExperimentSpec {
    /// Parses and validates a JSON experiment description.
    pub fn parse(text: &str) -> Result<Self> {
        let spec: ExperimentSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    /// Applies `CRB_SEED` if set.
    pub fn with_env_overrides(mut self) -> Result<Self> {
        if let Ok(raw) = std::env::var(SEED_ENV) {
            let seed = raw
                .trim()
                .parse::<u64>()
                .map_err(|e| Error::invalid(SEED_ENV, format!("{raw:?}: {e}")))?;
            self.seed = Some(seed);
        }
        Ok(self)
    }

    pub fn seed(&self) -> u64 {
        self.seed.or(self.fading.seed).unwrap_or(0)
    }

    pub fn grid(&self) -> Vec<f64> {
        self.sweep.grid()
    }

    /// Relay count at a grid value.
    pub fn relays_at(&self, value: f64) -> usize {
        match self.sweep.variable {
            SweepVariable::TotalPower => self.fading.relays.unwrap_or(0),
            SweepVariable::Relays => value as usize,
        }
    }

    /// Total relay power at a grid value.
    pub fn power_at(&self, value: f64) -> f64 {
        match self.sweep.variable {
            SweepVariable::TotalPower => value,
            SweepVariable::Relays => self.p_t.unwrap_or(f64::NAN),
        }
    }

    pub fn fading_at(&self, value: f64) -> FadingSpec {
        FadingSpec {
            sigma_g: self.fading.sigma_g,
            sigma_h: self.fading.sigma_h,
            sigma_z: self.fading.sigma_z,
            relays: self.relays_at(value),
            seed: self.seed(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        positive("fading.sigma_g", self.fading.sigma_g)?;
        positive("fading.sigma_h", self.fading.sigma_h)?;
        positive("fading.sigma_z", self.fading.sigma_z)?;
        positive("n0", self.n0)?;
        for v in self.n_relays_noise.values() {
            positive("n_relays_noise", *v)?;
        }
        if let BudgetRule::Explicit(shares) = &self.budget_rule {
            if shares.is_empty() {
                return Err(Error::invalid(
                    "budget_rule",
                    "explicit share list is empty",
                ));
            }
            for s in shares {
                positive("budget_rule", *s)?;
            }
        }
        if self.trials == 0 {
            return Err(Error::invalid("trials", "must be at least 1"));
        }
        if self.methods.is_empty() {
            return Err(Error::invalid("methods", "at least one method is required"));
        }
        for (i, m) in self.methods.iter().enumerate() {
            if self.methods[..i].contains(m) {
                return Err(Error::invalid("methods", format!("{m} listed twice")));
            }
        }
        if let Some(p_s) = self.p_s {
            positive("p_s", p_s)?;
        }
        self.solver.validate()?;

        let grid = self.grid();
        if grid.is_empty() {
            return Err(Error::invalid("sweep.grid", "grid is empty"));
        }
        if grid.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::invalid(
                "sweep.grid",
                "grid must be strictly ascending",
            ));
        }
        match self.sweep.variable {
            SweepVariable::TotalPower => {
                for v in &grid {
                    positive("sweep.grid", *v)?;
                }
                match self.fading.relays {
                    Some(m) if (1..=MAX_DIM).contains(&m) => {}
                    Some(m) => {
                        return Err(Error::invalid(
                            "fading.relays",
                            format!("{m} is outside 1..={MAX_DIM}"),
                        ))
                    }
                    None => {
                        return Err(Error::invalid(
                            "fading.relays",
                            "required when sweeping P_T",
                        ))
                    }
                }
            }
            SweepVariable::Relays => {
                for v in &grid {
                    if !(v.fract() == 0.0 && *v >= 1.0 && *v <= MAX_DIM as f64) {
                        return Err(Error::invalid(
                            "sweep.grid",
                            format!("relay count {v} is not an integer in 1..={MAX_DIM}"),
                        ));
                    }
                }
                match self.p_t {
                    Some(p) => positive("p_t", p)?,
                    None => return Err(Error::invalid("p_t", "required when sweeping M")),
                }
            }
        }
        for v in &grid {
            let m = self.relays_at(*v);
            self.n_relays_noise.expand(m)?;
            if let BudgetRule::Explicit(_) = self.budget_rule {
                self.budget_rule.budget(self.power_at(*v), m)?;
            }
        }
        Ok(())
    }
}

/// Parses a comma- or whitespace-separated list of per-relay budgets.
pub fn parse_budget_list(text: &str) -> Result<PowerBudget> {
    let values = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|e| Error::invalid("budgets", format!("{s:?}: {e}")))
        })
        .collect::<Result<Vec<f64>>>()?;
    PowerBudget::new(values)
}
