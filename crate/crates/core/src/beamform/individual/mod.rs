//! Secrecy-rate maximization under per-relay power caps `|w_m|² ≤ p_m`.
//!
//! The objective `(N0 + |h†w|²)/(N0 + |z†w|²)` is quasiconvex in the sense
//! that every super-level set `{ratio ≥ t}` is convex after lifting, so the
//! optimum `t_max` is found by bisection on `t` with a convex feasibility
//! test at each step. Two independent tests are provided:
//!
//! * **SDR**: lift to `X = w w†` and compare
//!   `φ(t) = max { tr((h h† − t z z†) X) : X ⪰ 0, diag X ≤ p }` against
//!   `N0 (t − 1)`. `φ` is computed with a log-det barrier method.
//! * **SOCP**: fix the global phase so `h†w` is real and test the cone
//!   constraint `Re(h†w)/√t ≥ ‖(z†w, √((1 − 1/t) N0))‖` directly over `w`.
//!
//! After bisection the weights are extracted at `t_max` (minus one tolerance
//! width, so the constraint set keeps an interior): minimum trace `X` with a
//! principal-component readout for SDR, minimum norm `w` for SOCP.

mod barrier;
mod oracle;
mod sdr;
mod socp;
mod suboptimal;

use serde::{Deserialize, Serialize};

pub use oracle::oracle_grid;
pub use sdr::{feasibility_sdr, feasibility_value};
pub use socp::feasibility_socp;
pub use suboptimal::solve_suboptimal;

use super::{Beamformer, Design, Method};
use crate::channel::ChannelRealization;
use crate::error::{Error, Result, SolverError};
use crate::linalg::{herm_eig, CMatrix, CVector};

/// Largest tolerated `λ₂/λ₁` of the extracted SDR matrix.
pub const RANK_ONE_TOL: f64 = 1e-6;

/// Per-relay power caps `p_m` (linear units).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PowerBudget(Vec<f64>);

impl PowerBudget {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::invalid(
                "budgets",
                "at least one relay budget is required",
            ));
        }
        if let Some(bad) = p.iter().find(|x| !(**x > 0.0 && x.is_finite())) {
            return Err(Error::invalid(
                "budgets",
                format!("budget {bad} is not positive"),
            ));
        }
        Ok(PowerBudget(p))
    }

    /// `p_m = P_T / M` for every relay.
    pub fn equal_split(p_t: f64, relays: usize) -> Result<Self> {
        Self::new(vec![p_t / relays as f64; relays])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn relays(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    fn check(&self, ch: &ChannelRealization) -> Result<()> {
        if self.relays() != ch.relays() {
            return Err(Error::invalid(
                "budgets",
                format!("expected {} budgets, got {}", ch.relays(), self.relays()),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BisectionConfig {
    /// Initial lower bound; `t = 1` is always feasible (`w = 0`).
    pub t_lo: f64,
    /// Initial upper bound. `None` uses `1 + (Σ √p_m |h_m|)² / N0`.
    pub t_hi: Option<f64>,
    /// Stop once `(u − l)/l ≤ tol_rel`.
    pub tol_rel: f64,
    pub max_iters: usize,
    /// Doublings of `t_hi − 1` tried when the upper bound is feasible.
    pub max_doublings: usize,
}

impl Default for BisectionConfig {
    fn default() -> Self {
        BisectionConfig {
            t_lo: 1.0,
            t_hi: None,
            tol_rel: 1e-6,
            max_iters: 60,
            max_doublings: 30,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BarrierConfig {
    /// Relative duality-gap target.
    pub gap_tol: f64,
    /// Multiplier applied to the barrier weight between centerings.
    pub tau_growth: f64,
    /// Centering stops when half the squared Newton decrement is below this.
    pub newton_tol: f64,
    /// Newton steps allowed per barrier solve.
    pub max_newton_steps: usize,
    /// Centering rounds allowed per barrier solve.
    pub max_outer: usize,
}

impl Default for BarrierConfig {
    fn default() -> Self {
        BarrierConfig {
            gap_tol: 1e-9,
            tau_growth: 10.0,
            newton_tol: 1e-10,
            max_newton_steps: 5000,
            max_outer: 80,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub bisection: BisectionConfig,
    pub barrier: BarrierConfig,
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let b = &self.bisection;
        if !(b.t_lo >= 1.0 && b.t_lo.is_finite()) {
            return Err(Error::invalid("bisection.t_lo", "must be at least 1"));
        }
        if let Some(hi) = b.t_hi {
            if !(hi > b.t_lo && hi.is_finite()) {
                return Err(Error::invalid("bisection.t_hi", "must exceed t_lo"));
            }
        }
        if !(b.tol_rel > 0.0) {
            return Err(Error::invalid("bisection.tol_rel", "must be positive"));
        }
        if !(self.barrier.gap_tol > 0.0) {
            return Err(Error::invalid("barrier.gap_tol", "must be positive"));
        }
        if !(self.barrier.tau_growth > 1.0) {
            return Err(Error::invalid("barrier.tau_growth", "must exceed 1"));
        }
        Ok(())
    }
}

/// Which convex feasibility test drives the bisection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IndividualPath {
    Sdr,
    Socp,
}

impl IndividualPath {
    pub fn method(self) -> Method {
        match self {
            IndividualPath::Sdr => Method::IndividualSdr,
            IndividualPath::Socp => Method::IndividualSocp,
        }
    }
}

/// Certificate returned by a feasibility test.
#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    /// Lifted matrix `X ⪰ 0` with `diag X ≤ p`.
    Matrix(CMatrix),
    /// Weight vector with `|w_m|² ≤ p_m`.
    Vector(CVector),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityWitness {
    pub t: f64,
    pub feasible: bool,
    pub witness: Witness,
    /// Margin of the witness in its defining constraint. SDR:
    /// `tr(A_t X) − N0 (t − 1)`; SOCP: `Re(h†w)/√t − ‖(z†w, √((1 − 1/t) N0))‖`.
    /// Nonnegative exactly when `feasible`.
    pub slack: f64,
    pub newton_steps: usize,
}

impl FeasibilityWitness {
    /// Recomputes `(N0 + |h†w|²) − t (N0 + |z†w|²)` (vector witness) or
    /// `tr(A_t X) − N0 (t − 1)` (matrix witness) from scratch.
    pub fn recomputed_margin(&self, ch: &ChannelRealization) -> f64 {
        let t = self.t;
        let n0 = ch.noise_rx;
        match &self.witness {
            Witness::Vector(w) => {
                let hw = ch.h.dot(w).norm_sqr();
                let zw = ch.z.dot(w).norm_sqr();
                hw - t * zw - n0 * (t - 1.0)
            }
            Witness::Matrix(x) => x.quad_form(&ch.h) - t * x.quad_form(&ch.z) - n0 * (t - 1.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BisectionStep {
    pub t: f64,
    pub feasible: bool,
    pub slack: f64,
    pub newton_steps: usize,
}

/// Structured record of one individual-budget solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveDiagnostics {
    pub path: IndividualPath,
    /// Answer came from the `z = 0` closed form; no bisection ran.
    pub closed_form: bool,
    pub t_hi: f64,
    pub doublings: usize,
    pub steps: Vec<BisectionStep>,
    pub newton_steps: usize,
    pub extraction_t: Option<f64>,
    pub extraction_newton_steps: usize,
    /// `λ₂/λ₁` of the extracted SDR matrix.
    pub rank_ratio: Option<f64>,
}

impl SolveDiagnostics {
    fn new(path: IndividualPath) -> Self {
        SolveDiagnostics {
            path,
            closed_form: false,
            t_hi: 1.0,
            doublings: 0,
            steps: Vec::new(),
            newton_steps: 0,
            extraction_t: None,
            extraction_newton_steps: 0,
            rank_ratio: None,
        }
    }

    pub fn rank_one_ok(&self) -> bool {
        self.rank_ratio.map_or(true, |r| r <= RANK_ONE_TOL)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndividualSolution {
    /// Weights and `rate = log2 t_max`.
    pub design: Design,
    /// Largest ratio certified feasible by the bisection.
    pub t_max: f64,
    pub diagnostics: SolveDiagnostics,
}

/// Upper bracket `1 + (Σ √p_m |h_m|)² / N0`: the numerator of the ratio
/// cannot exceed `N0 + (Σ √p_m |h_m|)²` and the denominator is at least `N0`.
pub fn default_t_hi(ch: &ChannelRealization, budget: &PowerBudget) -> f64 {
    1.0 + aligned_gain(ch, budget) / ch.noise_rx
}

/// `(Σ √p_m |h_m|)²`, the largest `|h†w|²` under the caps.
fn aligned_gain(ch: &ChannelRealization, budget: &PowerBudget) -> f64 {
    let s: f64 =
        ch.h.iter()
            .zip(budget.as_slice())
            .map(|(h, p)| p.sqrt() * h.norm())
            .sum();
    s * s
}

/// Full-power weights co-phased with `h`: `w_m = √p_m e^{j arg h_m}`.
fn aligned_weights(ch: &ChannelRealization, budget: &PowerBudget) -> CVector {
    CVector::new(
        ch.h.iter()
            .zip(budget.as_slice())
            .map(|(h, p)| {
                let mag = h.norm();
                let phase = if mag > 0.0 {
                    h / mag
                } else {
                    super::c64(1.0, 0.0)
                };
                phase * p.sqrt()
            })
            .collect(),
    )
}

/// Maximizes the secrecy ratio under per-relay caps by bisection over `t`.
pub fn solve_individual(
    ch: &ChannelRealization,
    budget: &PowerBudget,
    cfg: &SolverConfig,
    path: IndividualPath,
) -> Result<IndividualSolution> {
    budget.check(ch)?;
    cfg.validate()?;
    let method = path.method();
    let mut diag = SolveDiagnostics::new(path);

    if ch.z.is_zero() {
        let t_max = default_t_hi(ch, budget);
        diag.closed_form = true;
        diag.t_hi = t_max;
        let w = aligned_weights(ch, budget);
        return Ok(IndividualSolution {
            design: Design {
                beamformer: Beamformer::new(ch, w, method),
                rate: t_max.log2(),
            },
            t_max,
            diagnostics: diag,
        });
    }

    let bc = &cfg.bisection;
    let test = |t: f64| -> Result<FeasibilityWitness> {
        match path {
            IndividualPath::Sdr => feasibility_sdr(ch, budget, t, &cfg.barrier),
            IndividualPath::Socp => feasibility_socp(ch, budget, t, &cfg.barrier),
        }
    };
    let record = |diag: &mut SolveDiagnostics, fw: &FeasibilityWitness| {
        diag.newton_steps += fw.newton_steps;
        diag.steps.push(BisectionStep {
            t: fw.t,
            feasible: fw.feasible,
            slack: fw.slack,
            newton_steps: fw.newton_steps,
        });
    };

    let m = ch.relays();
    let mut lo = 1.0;
    let mut lo_witness = match path {
        IndividualPath::Sdr => Witness::Matrix(CMatrix::zeros(m, m)),
        IndividualPath::Socp => Witness::Vector(CVector::zeros(m)),
    };
    let mut hi = bc.t_hi.unwrap_or_else(|| default_t_hi(ch, budget));
    if bc.t_lo > 1.0 {
        let fw = test(bc.t_lo)?;
        record(&mut diag, &fw);
        if fw.feasible {
            lo = bc.t_lo;
            lo_witness = fw.witness;
        } else {
            hi = bc.t_lo;
        }
    }

    // The bracket must end on an infeasible point.
    if hi > lo {
        let mut doublings = 0;
        loop {
            let fw = test(hi)?;
            record(&mut diag, &fw);
            if !fw.feasible {
                break;
            }
            lo = hi;
            lo_witness = fw.witness;
            if doublings == bc.max_doublings {
                return Err(SolverError::BracketTooSmall {
                    t_hi: hi,
                    doublings,
                }
                .into());
            }
            doublings += 1;
            hi = 1.0 + 2.0 * (hi - 1.0);
        }
        diag.doublings = doublings;
    }
    diag.t_hi = hi;

    let mut iters = 0;
    while hi > lo && (hi - lo) / lo > bc.tol_rel {
        if iters == bc.max_iters {
            return Err(SolverError::BisectionStalled {
                iterations: iters,
                width: (hi - lo) / lo,
            }
            .into());
        }
        iters += 1;
        let mid = 0.5 * (lo + hi);
        let fw = test(mid)?;
        record(&mut diag, &fw);
        if fw.feasible {
            lo = mid;
            lo_witness = fw.witness;
        } else {
            hi = mid;
        }
    }
    let t_max = lo;

    let t_extract = t_max * (1.0 - bc.tol_rel);
    let level = ch.noise_rx * (t_extract - 1.0);
    let w = if t_max <= 1.0 || level <= 1e-12 * ch.noise_rx {
        CVector::zeros(m)
    } else {
        diag.extraction_t = Some(t_extract);
        match path {
            IndividualPath::Sdr => {
                let (x, steps) = sdr::min_trace(ch, budget, t_extract, &cfg.barrier)?;
                diag.extraction_newton_steps = steps;
                let (w, ratio) = principal_component(&x)?;
                diag.rank_ratio = Some(ratio);
                if ratio > RANK_ONE_TOL {
                    log::warn!(
                        "SDR extraction is not rank one: lambda2/lambda1 = {ratio:e}, t = {t_extract}, channel = {}",
                        ch.to_json()
                    );
                }
                cap_to_budget(w, budget)
            }
            IndividualPath::Socp => {
                let start = match lo_witness {
                    Witness::Vector(w) => w,
                    Witness::Matrix(_) => unreachable!("SOCP bisection yields vector witnesses"),
                };
                let (w, steps) = socp::min_norm(ch, budget, t_extract, &start, &cfg.barrier)?;
                diag.extraction_newton_steps = steps;
                cap_to_budget(w, budget)
            }
        }
    };

    Ok(IndividualSolution {
        design: Design {
            beamformer: Beamformer::new(ch, w, method),
            rate: t_max.log2(),
        },
        t_max,
        diagnostics: diag,
    })
}

/// `√λ₁ v₁` of a Hermitian PSD matrix and its `λ₂/λ₁` ratio.
fn principal_component(x: &CMatrix) -> Result<(CVector, f64)> {
    let eig = herm_eig(x)?;
    let l1 = eig.values[0];
    if l1 <= 0.0 {
        return Ok((CVector::zeros(x.rows()), 0.0));
    }
    let l2 = eig.values.get(1).copied().unwrap_or(0.0).max(0.0);
    Ok((eig.vectors[0].scale_real(l1.sqrt()), l2 / l1))
}

/// Scales `w` down uniformly if any relay exceeds its cap.
fn cap_to_budget(w: CVector, budget: &PowerBudget) -> CVector {
    let worst = w
        .iter()
        .zip(budget.as_slice())
        .map(|(c, p)| c.norm() / p.sqrt())
        .fold(0.0, f64::max);
    if worst > 1.0 {
        w.scale_real(1.0 / worst)
    } else {
        w
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beamform::c64;
    use crate::channel::secrecy_rate;

    fn channel(h: CVector, z: CVector) -> ChannelRealization {
        let m = h.dim();
        ChannelRealization::new(CVector::from_real(&vec![1.0; m]), h, z, vec![1.0; m], 1.0).unwrap()
    }

    #[test]
    fn budget_validation() {
        assert!(PowerBudget::new(vec![]).is_err());
        assert!(PowerBudget::new(vec![1.0, 0.0]).is_err());
        assert!(PowerBudget::new(vec![1.0, f64::INFINITY]).is_err());
        let b = PowerBudget::equal_split(10.0, 5).unwrap();
        assert_eq!(b.as_slice(), &[2.0; 5]);
        assert!((b.total() - 10.0).abs() < 1e-15);
    }

    #[test]
    fn config_validation() {
        let mut cfg = SolverConfig::default();
        assert!(cfg.validate().is_ok());
        cfg.bisection.t_lo = 0.5;
        assert!(cfg.validate().is_err());
        cfg.bisection.t_lo = 2.0;
        cfg.bisection.t_hi = Some(1.5);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn zero_eavesdropper_closed_form() {
        let ch = channel(CVector::from_real(&[1.0, 1.0]), CVector::zeros(2));
        let budget = PowerBudget::new(vec![1.0, 1.0]).unwrap();
        for path in [IndividualPath::Sdr, IndividualPath::Socp] {
            let sol = solve_individual(&ch, &budget, &SolverConfig::default(), path).unwrap();
            assert!((sol.t_max - 5.0).abs() < 1e-12);
            assert!((sol.design.rate - 5f64.log2()).abs() < 1e-12);
            assert!(
                sol.design
                    .beamformer
                    .w
                    .sub(&CVector::from_real(&[1.0, 1.0]))
                    .norm()
                    < 1e-12
            );
            assert!(sol.diagnostics.closed_form);
        }
    }

    #[test]
    fn identical_channels_have_no_positive_rate() {
        let h = CVector::new(vec![c64(0.5, 1.0), c64(-1.0, 0.2)]);
        let ch = channel(h.clone(), h);
        let budget = PowerBudget::new(vec![1.0, 1.0]).unwrap();
        for path in [IndividualPath::Sdr, IndividualPath::Socp] {
            let sol = solve_individual(&ch, &budget, &SolverConfig::default(), path).unwrap();
            assert_eq!(sol.t_max, 1.0);
            assert_eq!(sol.design.rate, 0.0);
            assert!(sol.design.beamformer.w.is_zero());
        }
    }

    #[test]
    fn both_paths_on_a_complex_instance() {
        let ch = channel(
            CVector::new(vec![c64(1.2, -0.4), c64(0.3, 0.9), c64(-0.7, 0.1)]),
            CVector::new(vec![c64(0.5, 0.5), c64(-0.2, 0.4), c64(0.9, -0.3)]),
        );
        let budget = PowerBudget::new(vec![0.7, 1.5, 1.1]).unwrap();
        let cfg = SolverConfig::default();
        let sdr = solve_individual(&ch, &budget, &cfg, IndividualPath::Sdr).unwrap();
        let socp = solve_individual(&ch, &budget, &cfg, IndividualPath::Socp).unwrap();
        assert!(
            (sdr.t_max - socp.t_max).abs() <= 2.0 * cfg.bisection.tol_rel * sdr.t_max,
            "{} vs {}",
            sdr.t_max,
            socp.t_max
        );
        for sol in [&sdr, &socp] {
            let w = &sol.design.beamformer.w;
            for (c, p) in w.iter().zip(budget.as_slice()) {
                assert!(c.norm_sqr() <= p * (1.0 + 1e-6));
            }
            let achieved = secrecy_rate(&ch, w).unwrap();
            assert!(
                achieved >= sol.design.rate - 1e-4,
                "{achieved} < {}",
                sol.design.rate
            );
            let hw = ch.h.dot(w);
            assert!(hw.im.abs() <= 1e-12 * hw.norm().max(1.0) && hw.re >= 0.0);
        }
        assert!(
            sdr.diagnostics.rank_one_ok(),
            "{:?}",
            sdr.diagnostics.rank_ratio
        );
        let total = crate::beamform::solve_total(&ch, budget.total()).unwrap();
        assert!(sdr.design.rate <= total.rate + 1e-9);
    }

    #[test]
    fn budget_length_must_match() {
        let ch = channel(
            CVector::from_real(&[1.0, 0.0]),
            CVector::from_real(&[0.0, 1.0]),
        );
        let budget = PowerBudget::new(vec![1.0]).unwrap();
        assert!(
            solve_individual(&ch, &budget, &SolverConfig::default(), IndividualPath::Sdr).is_err()
        );
    }

    #[test]
    fn infeasible_explicit_bracket_is_doubled() {
        let ch = channel(
            CVector::from_real(&[1.0, 0.0]),
            CVector::from_real(&[0.0, 1.0]),
        );
        let budget = PowerBudget::new(vec![1.0, 1.0]).unwrap();
        let mut cfg = SolverConfig::default();
        cfg.bisection.t_hi = Some(1.25);
        let sol = solve_individual(&ch, &budget, &cfg, IndividualPath::Socp).unwrap();
        assert!(sol.diagnostics.doublings >= 1);
        // h ⟂ z: full power on relay 1, ratio 1 + 1 = 2.
        assert!((sol.t_max - 2.0).abs() <= 2e-6 * 2.0, "{}", sol.t_max);
        cfg.bisection.max_doublings = 0;
        let err = solve_individual(&ch, &budget, &cfg, IndividualPath::Socp).unwrap_err();
        assert!(matches!(
            err,
            Error::Solver(SolverError::BracketTooSmall { .. })
        ));
    }
}
