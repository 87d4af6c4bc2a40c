//! Lifted (semidefinite) feasibility test and min-trace extraction.
//!
//! Both problems are solved with the barrier `−ln det X − Σ ln(p_m − X_mm)`.
//! Its central path is tracked in dual coordinates: for the value problem
//! `max tr(A X)` the centrality conditions give `X = S⁻¹/τ` with
//! `S = Diag(y) − A` and `p_m − X_mm = 1/(τ y_m)`, so Newton runs over the
//! `M` multipliers `y` instead of the `M²` real entries of `X`. Every iterate
//! yields a certified interval: `pᵀy` bounds the optimum from above, and
//! `S⁻¹/τ` scaled into the caps is a feasible `X` bounding it from below.

use super::barrier::{center, Barrier, Centering};
use super::{BarrierConfig, FeasibilityWitness, PowerBudget, Witness};
use crate::channel::ChannelRealization;
use crate::error::{Result, SolverError};
use crate::linalg::{chol_factor, CMatrix, CVector};

/// `A_t = h h† − t z z†`
fn lifted_objective(h: &CVector, z: &CVector, t: f64) -> CMatrix {
    h.outer().sub(&z.outer().scale(t))
}

/// Dual barrier `τ pᵀy − ln det(Diag(y) − A) − Σ ln y` of the value problem.
struct ValueBarrier<'a> {
    a: &'a CMatrix,
    p: &'a [f64],
}

impl ValueBarrier<'_> {
    fn slack(&self, y: &[f64]) -> CMatrix {
        let mut s = self.a.scale(-1.0);
        for (i, yi) in y.iter().enumerate() {
            s[(i, i)] += yi;
        }
        s
    }

    /// `S⁻¹` when `y` is strictly dual feasible.
    fn slack_inverse(&self, y: &[f64]) -> Option<CMatrix> {
        if y.iter().any(|v| !(*v > 0.0)) {
            return None;
        }
        chol_factor(&self.slack(y)).ok().map(|c| c.inverse())
    }
}

impl Barrier for ValueBarrier<'_> {
    fn value(&self, y: &[f64], tau: f64) -> Option<f64> {
        if y.iter().any(|v| !(*v > 0.0)) {
            return None;
        }
        let chol = chol_factor(&self.slack(y)).ok()?;
        let linear: f64 = self.p.iter().zip(y).map(|(p, v)| p * v).sum();
        Some(tau * linear - chol.ln_det() - y.iter().map(|v| v.ln()).sum::<f64>())
    }

    fn derivatives(&self, y: &[f64], tau: f64) -> Option<(Vec<f64>, Vec<f64>)> {
        let inv = self.slack_inverse(y)?;
        let m = y.len();
        let g = (0..m)
            .map(|i| tau * self.p[i] - inv[(i, i)].re - 1.0 / y[i])
            .collect();
        let mut h = vec![0.0; m * m];
        for i in 0..m {
            for j in 0..m {
                h[i * m + j] = inv[(i, j)].norm_sqr();
            }
            h[i * m + i] += 1.0 / (y[i] * y[i]);
        }
        Some((g, h))
    }
}

/// Certified bracket on `φ` and the feasible `X` behind the lower end.
struct Bounds {
    lower: f64,
    upper: f64,
    x: CMatrix,
}

fn bounds(barrier: &ValueBarrier<'_>, y: &[f64], tau: f64) -> Option<Bounds> {
    let inv = barrier.slack_inverse(y)?;
    let upper: f64 = barrier.p.iter().zip(y).map(|(p, v)| p * v).sum();
    let mut scale: f64 = 1.0 / tau;
    for (i, p) in barrier.p.iter().enumerate() {
        let d = inv[(i, i)].re / tau;
        if d > *p {
            scale = scale.min(p / inv[(i, i)].re);
        }
    }
    let x = inv.scale(scale);
    let lower = (0..y.len())
        .flat_map(|i| (0..y.len()).map(move |j| (i, j)))
        .map(|(i, j)| (barrier.a[(i, j)] * x[(j, i)]).re)
        .sum();
    Some(Bounds { lower, upper, x })
}

/// Runs the barrier method until `target` is decided (if given) or the
/// relative gap closes. Returns the final bounds and Newton step count.
fn solve_value(
    a: &CMatrix,
    budget: &PowerBudget,
    target: Option<f64>,
    cfg: &BarrierConfig,
) -> Result<(Bounds, usize), SolverError> {
    let p = budget.as_slice();
    let m = p.len();
    let barrier = ValueBarrier { a, p };
    // ‖A‖_F bounds λ_max(A), so this y is strictly dual feasible.
    let bound = a.norm() + 1.0;
    let mut y = vec![bound; m];
    let nu = 2.0 * m as f64;
    let mut tau = nu / p.iter().map(|pi| pi * bound).sum::<f64>();
    let mut steps = 0;
    let mut latest: Option<Bounds> = None;

    for _ in 0..cfg.max_outer {
        let mut monitor = |y: &[f64]| -> bool {
            let Some(b) = bounds(&barrier, y, tau) else {
                return false;
            };
            let decided = match target {
                Some(c) => b.lower >= c || b.upper < c,
                None => false,
            };
            latest = Some(b);
            decided
        };
        let outcome = center(&barrier, &mut y, tau, cfg, &mut steps, &mut monitor)?;
        let b = latest
            .take()
            .ok_or(SolverError::SingularNewtonSystem(steps))?;
        if outcome == Centering::Stopped {
            return Ok((b, steps));
        }
        let gap = b.upper - b.lower;
        if gap <= cfg.gap_tol * b.upper.abs().max(1.0) {
            return Ok((b, steps));
        }
        latest = Some(b);
        tau *= cfg.tau_growth;
    }
    let gap = latest.map_or(f64::NAN, |b| b.upper - b.lower);
    Err(SolverError::BarrierNoConvergence {
        iterations: steps,
        gap,
    })
}

/// `φ(t) = max { tr((h h† − t z z†) X) : X ⪰ 0, diag X ≤ p }` and a
/// feasible maximizer. The value is that of the returned `X`, within the
/// barrier's gap tolerance of the optimum.
pub fn feasibility_value(
    ch: &ChannelRealization,
    budget: &PowerBudget,
    t: f64,
    cfg: &BarrierConfig,
) -> Result<(f64, CMatrix)> {
    budget.check(ch)?;
    check_t(t)?;
    let a = lifted_objective(&ch.h, &ch.z, t);
    let (b, _) = solve_value(&a, budget, None, cfg)?;
    Ok((b.lower, b.x))
}

/// Decides whether some `X ⪰ 0` with `diag X ≤ p` reaches
/// `tr((h h† − t z z†) X) ≥ N0 (t − 1)`.
///
/// `feasible` is reported only with a certified witness. Inside the solver's
/// gap tolerance of the boundary the answer is "infeasible".
pub fn feasibility_sdr(
    ch: &ChannelRealization,
    budget: &PowerBudget,
    t: f64,
    cfg: &BarrierConfig,
) -> Result<FeasibilityWitness> {
    budget.check(ch)?;
    check_t(t)?;
    let target = ch.noise_rx * (t - 1.0);
    let a = lifted_objective(&ch.h, &ch.z, t);
    let (b, steps) = solve_value(&a, budget, Some(target), cfg)?;
    let slack = b.lower - target;
    Ok(FeasibilityWitness {
        t,
        feasible: slack >= 0.0,
        witness: Witness::Matrix(b.x),
        slack,
        newton_steps: steps,
    })
}

fn check_t(t: f64) -> Result<()> {
    if !(t >= 1.0 && t.is_finite()) {
        return Err(crate::error::Error::invalid("t", format!("{t} is below 1")));
    }
    Ok(())
}

/// Dual barrier of `min tr X  s.t. tr(A X) ≥ c, diag X ≤ p, X ⪰ 0`:
/// `τ(pᵀy − μc) − ln det(I + Diag(y) − μA) − Σ ln y − ln μ` over `(y, μ)`.
struct TraceBarrier<'a> {
    a: &'a CMatrix,
    c: f64,
    p: &'a [f64],
}

impl TraceBarrier<'_> {
    fn slack(&self, x: &[f64]) -> CMatrix {
        let m = self.p.len();
        let mut s = self.a.scale(-x[m]);
        for i in 0..m {
            s[(i, i)] += 1.0 + x[i];
        }
        s
    }

    fn in_domain(x: &[f64]) -> bool {
        x.iter().all(|v| *v > 0.0)
    }
}

impl Barrier for TraceBarrier<'_> {
    fn value(&self, x: &[f64], tau: f64) -> Option<f64> {
        if !Self::in_domain(x) {
            return None;
        }
        let m = self.p.len();
        let chol = chol_factor(&self.slack(x)).ok()?;
        let linear: f64 = self.p.iter().zip(x).map(|(p, v)| p * v).sum::<f64>() - x[m] * self.c;
        Some(tau * linear - chol.ln_det() - x.iter().map(|v| v.ln()).sum::<f64>())
    }

    fn derivatives(&self, x: &[f64], tau: f64) -> Option<(Vec<f64>, Vec<f64>)> {
        if !Self::in_domain(x) {
            return None;
        }
        let m = self.p.len();
        let n = m + 1;
        let inv = chol_factor(&self.slack(x)).ok()?.inverse();
        let k = inv.matmul(self.a); // S⁻¹ A
        let kinv = k.matmul(&inv); // S⁻¹ A S⁻¹
        let mut g = vec![0.0; n];
        for i in 0..m {
            g[i] = tau * self.p[i] - inv[(i, i)].re - 1.0 / x[i];
        }
        g[m] = -tau * self.c + k.trace().re - 1.0 / x[m];
        let mut h = vec![0.0; n * n];
        for i in 0..m {
            for j in 0..m {
                h[i * n + j] = inv[(i, j)].norm_sqr();
            }
            h[i * n + i] += 1.0 / (x[i] * x[i]);
            h[i * n + m] = -kinv[(i, i)].re;
            h[m * n + i] = -kinv[(i, i)].re;
        }
        h[m * n + m] = k.matmul(&k).trace().re + 1.0 / (x[m] * x[m]);
        Some((g, h))
    }
}

/// Minimum-trace `X` with `tr((h h† − t z z†) X) ≥ N0 (t − 1)` under the
/// caps. Requires the constraint set to have an interior (`t < t_max`).
pub(crate) fn min_trace(
    ch: &ChannelRealization,
    budget: &PowerBudget,
    t: f64,
    cfg: &BarrierConfig,
) -> Result<(CMatrix, usize), SolverError> {
    let a = lifted_objective(&ch.h, &ch.z, t);
    let p = budget.as_slice();
    let m = p.len();
    let c = ch.noise_rx * (t - 1.0);
    let barrier = TraceBarrier { a: &a, c, p };
    // I + I − μA ≻ 0 whenever μ‖A‖ < 1.
    let mut x = vec![1.0; m + 1];
    x[m] = 0.5 / (1.0 + a.norm());
    let nu = (2 * m + 1) as f64;
    let mut tau = nu / budget.total();
    let mut steps = 0;
    // Unbounded dual multipliers mean the primal has no interior.
    let mu_cap = 1e12 * (1.0 + 1.0 / c.max(f64::MIN_POSITIVE));
    // Primal X is only trustworthy at a centered dual point.
    let mut centered: Option<CMatrix> = None;
    for _ in 0..cfg.max_outer {
        let outcome = center(&barrier, &mut x, tau, cfg, &mut steps, &mut |x| {
            x[m] > mu_cap
        })?;
        if x[m] > mu_cap {
            return Err(SolverError::ExtractionInfeasible(t));
        }
        if outcome == Centering::Stalled {
            if let Some(xmat) = centered {
                return Ok((xmat, steps));
            }
        }
        let inv = chol_factor(&barrier.slack(&x))?.inverse();
        let xmat = inv.scale(1.0 / tau);
        let trace = xmat.trace().re;
        if nu / tau <= cfg.gap_tol * trace.max(1.0) {
            return Ok((xmat, steps));
        }
        centered = Some(xmat);
        tau *= cfg.tau_growth;
    }
    Err(SolverError::BarrierNoConvergence {
        iterations: steps,
        gap: nu / tau,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beamform::c64;

    fn channel(h: CVector, z: CVector) -> ChannelRealization {
        let m = h.dim();
        ChannelRealization::new(CVector::from_real(&vec![1.0; m]), h, z, vec![1.0; m], 1.0).unwrap()
    }

    /// Brute-force `max |h†w|² − |z†w|²` over a phase/magnitude grid at M = 2.
    fn grid_max_gain(h: &CVector, z: &CVector, p: &[f64]) -> f64 {
        let k = 400;
        let mut best: f64 = 0.0;
        for a in 0..=k {
            for r in 0..=k {
                for b in 0..k {
                    let w = CVector::new(vec![
                        c64(p[0].sqrt() * a as f64 / k as f64, 0.0),
                        num_complex::Complex64::from_polar(
                            p[1].sqrt() * r as f64 / k as f64,
                            std::f64::consts::TAU * b as f64 / k as f64,
                        ),
                    ]);
                    best = best.max(h.dot(&w).norm_sqr() - z.dot(&w).norm_sqr());
                }
            }
        }
        best
    }

    #[test]
    fn value_at_t_one_without_eavesdropper_is_aligned_gain() {
        let h = CVector::new(vec![c64(0.6, -0.8), c64(1.5, 0.5)]);
        let ch = channel(h, CVector::zeros(2));
        let budget = PowerBudget::new(vec![0.8, 1.7]).unwrap();
        let (phi, x) = feasibility_value(&ch, &budget, 1.0, &BarrierConfig::default()).unwrap();
        let closed: f64 = (0.8f64.sqrt() * 1.0 + 1.7f64.sqrt() * 2.5f64.sqrt()).powi(2);
        assert!((phi - closed).abs() <= 1e-7, "{phi} vs {closed}");
        for (d, p) in x.diag_real().iter().zip(budget.as_slice()) {
            assert!(*d <= p + 1e-8);
        }
    }

    #[test]
    fn value_at_t_one_matches_grid_search() {
        let h = CVector::new(vec![c64(0.6, -0.8), c64(1.5, 0.5)]);
        let z = CVector::new(vec![c64(0.3, 0.3), c64(-0.4, 1.0)]);
        let ch = channel(h.clone(), z.clone());
        let budget = PowerBudget::new(vec![0.8, 1.7]).unwrap();
        let (phi, _) = feasibility_value(&ch, &budget, 1.0, &BarrierConfig::default()).unwrap();
        let grid = grid_max_gain(&h, &z, budget.as_slice());
        assert!(
            grid <= phi + 1e-9 && phi - grid < 1e-2,
            "{phi} vs grid {grid}"
        );
    }

    #[test]
    fn value_without_eavesdropper_is_constant() {
        let ch = channel(CVector::from_real(&[1.0, 1.0]), CVector::zeros(2));
        let budget = PowerBudget::new(vec![1.0, 1.0]).unwrap();
        for t in [1.0, 2.0, 7.5] {
            let (phi, _) = feasibility_value(&ch, &budget, t, &BarrierConfig::default()).unwrap();
            assert!((phi - 4.0).abs() <= 1e-7, "t={t}: {phi}");
        }
    }

    #[test]
    fn value_with_zero_destination_channel() {
        let ch = channel(CVector::zeros(2), CVector::from_real(&[1.0, 0.5]));
        let budget = PowerBudget::new(vec![1.0, 1.0]).unwrap();
        for t in [1.0, 3.0] {
            let (phi, _) = feasibility_value(&ch, &budget, t, &BarrierConfig::default()).unwrap();
            assert!(phi.abs() <= 1e-7, "{phi}");
        }
    }

    #[test]
    fn decisions_around_known_threshold() {
        // h = [1, 1], z = 0: t_max = 1 + 4 = 5.
        let ch = channel(CVector::from_real(&[1.0, 1.0]), CVector::zeros(2));
        let budget = PowerBudget::new(vec![1.0, 1.0]).unwrap();
        let cfg = BarrierConfig::default();
        let yes = feasibility_sdr(&ch, &budget, 4.9, &cfg).unwrap();
        assert!(yes.feasible);
        assert!(yes.recomputed_margin(&ch) >= -1e-8);
        let no = feasibility_sdr(&ch, &budget, 5.1, &cfg).unwrap();
        assert!(!no.feasible);
    }

    #[test]
    fn min_trace_is_rank_one_and_feasible() {
        let h = CVector::new(vec![c64(1.0, 0.2), c64(-0.5, 0.7), c64(0.1, -1.1)]);
        let z = CVector::new(vec![c64(0.2, 0.1), c64(0.6, -0.3), c64(-0.4, 0.2)]);
        let ch = channel(h, z);
        let budget = PowerBudget::new(vec![1.0, 0.5, 2.0]).unwrap();
        let cfg = BarrierConfig::default();
        let (phi, _) = feasibility_value(&ch, &budget, 2.0, &cfg).unwrap();
        assert!(phi > 1.0, "instance should be feasible at t = 2");
        let (x, _) = min_trace(&ch, &budget, 2.0, &cfg).unwrap();
        let eig = crate::linalg::herm_eig(&x).unwrap();
        assert!(eig.values[1] / eig.values[0] < 1e-6, "{:?}", eig.values);
        let a = lifted_objective(&ch.h, &ch.z, 2.0);
        let achieved: f64 = (0..3)
            .flat_map(|i| (0..3).map(move |j| (i, j)))
            .map(|(i, j)| (a[(i, j)] * x[(j, i)]).re)
            .sum();
        assert!(achieved >= 1.0 - 1e-9);
    }

    #[test]
    fn rejects_t_below_one() {
        let ch = channel(CVector::from_real(&[1.0, 1.0]), CVector::zeros(2));
        let budget = PowerBudget::new(vec![1.0, 1.0]).unwrap();
        assert!(feasibility_sdr(&ch, &budget, 0.5, &BarrierConfig::default()).is_err());
    }
}
