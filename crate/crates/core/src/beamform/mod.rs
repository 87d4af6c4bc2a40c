//! Beamformer designs for the relay→destination hop.
//!
//! [`total`] holds the closed-form designs under a sum-power budget;
//! [`individual`] holds the per-relay budget solvers built on bisection over
//! the achievable SNR ratio.

pub mod individual;
pub mod total;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::ChannelRealization;
use crate::linalg::CVector;

pub use individual::{
    default_t_hi, feasibility_sdr, feasibility_socp, feasibility_value, oracle_grid,
    solve_individual, solve_suboptimal, BarrierConfig, BisectionConfig, BisectionStep,
    FeasibilityWitness, IndividualPath, IndividualSolution, PowerBudget, SolveDiagnostics,
    SolverConfig, Witness, RANK_ONE_TOL,
};
pub use total::{solve_low_snr, solve_null_space, solve_total, total_eigenpair, LowSnrDesign};

/// Which design produced a beamformer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Total,
    NullSpace,
    LowSnr,
    IndividualSdr,
    IndividualSocp,
    Suboptimal,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Total,
        Method::IndividualSdr,
        Method::IndividualSocp,
        Method::Suboptimal,
        Method::NullSpace,
        Method::LowSnr,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Total => "total",
            Method::NullSpace => "null-space",
            Method::LowSnr => "low-snr",
            Method::IndividualSdr => "individual-sdr",
            Method::IndividualSocp => "individual-socp",
            Method::Suboptimal => "suboptimal",
        }
    }

    /// Whether the method consumes per-relay budgets rather than a total.
    pub fn uses_individual_budget(self) -> bool {
        matches!(
            self,
            Method::IndividualSdr | Method::IndividualSocp | Method::Suboptimal
        )
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Method::ALL.iter().map(|m| m.name()).collect();
                format!(
                    "unknown method `{s}` (expected one of {})",
                    names.join(", ")
                )
            })
    }
}

/// Relay weights plus bookkeeping. The global phase is fixed so that `h†w`
/// is real and nonnegative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Beamformer {
    pub w: CVector,
    pub method: Method,
    pub power_used: f64,
}

impl Beamformer {
    pub fn new(ch: &ChannelRealization, w: CVector, method: Method) -> Self {
        let w = align_phase(&ch.h, w);
        let power_used = w.norm_sqr();
        Beamformer {
            w,
            method,
            power_used,
        }
    }

    pub fn zero(m: usize, method: Method) -> Self {
        Beamformer {
            w: CVector::zeros(m),
            method,
            power_used: 0.0,
        }
    }

    /// `|w_m|²` per relay.
    pub fn relay_powers(&self) -> Vec<f64> {
        self.w.iter().map(|c| c.norm_sqr()).collect()
    }
}

/// Rotates `w` so that `h†w` is real nonnegative.
pub(crate) fn align_phase(h: &CVector, w: CVector) -> CVector {
    let a = h.dot(&w);
    let mag = a.norm();
    if mag == 0.0 {
        return w;
    }
    w.scale(a.conj() / mag)
}

/// A beamformer together with the secrecy rate it achieves (bits/use).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Design {
    pub beamformer: Beamformer,
    pub rate: f64,
}

pub(crate) fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}
