//! Second-order cone feasibility test and minimum-norm extraction.
//!
//! With the global phase fixed so that `h†w` is real, the super-level set
//! `{ratio ≥ t}` is the cone `Re(h†w)/√t ≥ ‖(Re z†w, Im z†w, √((1 − 1/t) N0))‖`
//! intersected with the discs `|w_m|² ≤ p_m`. Replacing `h†w` by its real
//! part is harmless: any feasible `w` can be rotated so that `h†w ≥ 0`.
//!
//! Coordinates are `u = (Re w, Im w)`, plus a slack `s` for the test.

use super::barrier::{center, Barrier, Centering};
use super::{BarrierConfig, FeasibilityWitness, PowerBudget, Witness};
use crate::beamform::c64;
use crate::channel::ChannelRealization;
use crate::error::{Error, Result, SolverError};
use crate::linalg::CVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Objective {
    /// Maximize `s` in `Re(h†w)/√t − s ≥ ‖v‖`.
    MaxSlack,
    /// Minimize `‖w‖²` subject to `Re(h†w)/√t ≥ ‖v‖`.
    MinNorm,
}

struct ConeBarrier<'a> {
    /// `Re(h†w)/√t = α·u`
    alpha: Vec<f64>,
    /// `Re(z†w) = β₁·u`, `Im(z†w) = β₂·u`
    beta1: Vec<f64>,
    beta2: Vec<f64>,
    /// `√((1 − 1/t) N0)`
    c: f64,
    p: &'a [f64],
    objective: Objective,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl<'a> ConeBarrier<'a> {
    fn new(ch: &ChannelRealization, p: &'a [f64], t: f64, objective: Objective) -> Self {
        let m = p.len();
        let rt = t.sqrt();
        let mut alpha = vec![0.0; 2 * m];
        let mut beta1 = vec![0.0; 2 * m];
        let mut beta2 = vec![0.0; 2 * m];
        for i in 0..m {
            let (h, z) = (ch.h[i], ch.z[i]);
            alpha[i] = h.re / rt;
            alpha[m + i] = h.im / rt;
            beta1[i] = z.re;
            beta1[m + i] = z.im;
            beta2[i] = -z.im;
            beta2[m + i] = z.re;
        }
        let c = ((1.0 - 1.0 / t) * ch.noise_rx).max(0.0).sqrt();
        ConeBarrier {
            alpha,
            beta1,
            beta2,
            c,
            p,
            objective,
        }
    }

    fn relays(&self) -> usize {
        self.p.len()
    }

    fn slack_var(&self, x: &[f64]) -> f64 {
        match self.objective {
            Objective::MaxSlack => x[2 * self.relays()],
            Objective::MinNorm => 0.0,
        }
    }

    /// `Re(h†w)/√t − ‖(v₁, v₂, c)‖` at the weights encoded in `x`.
    fn margin(&self, x: &[f64]) -> f64 {
        let u = &x[..2 * self.relays()];
        let v1 = dot(&self.beta1, u);
        let v2 = dot(&self.beta2, u);
        dot(&self.alpha, u) - (v1 * v1 + v2 * v2 + self.c * self.c).sqrt()
    }

    /// `(q, v₁, v₂, q² − ‖v‖²)` and the cap slacks, if strictly inside.
    fn interior(&self, x: &[f64]) -> Option<(f64, f64, f64, f64, Vec<f64>)> {
        let m = self.relays();
        let u = &x[..2 * m];
        let q = dot(&self.alpha, u) - self.slack_var(x);
        let v1 = dot(&self.beta1, u);
        let v2 = dot(&self.beta2, u);
        let f = q * q - v1 * v1 - v2 * v2 - self.c * self.c;
        if !(q > 0.0 && f > 0.0) {
            return None;
        }
        let caps: Vec<f64> = (0..m)
            .map(|i| self.p[i] - u[i] * u[i] - u[m + i] * u[m + i])
            .collect();
        if caps.iter().any(|g| !(*g > 0.0)) {
            return None;
        }
        Some((q, v1, v2, f, caps))
    }

    fn weights(&self, x: &[f64]) -> CVector {
        let m = self.relays();
        CVector::new((0..m).map(|i| c64(x[i], x[m + i])).collect())
    }

    /// Number of barrier terms counted with their degree.
    fn degree(&self) -> f64 {
        (2 + self.relays()) as f64
    }
}

impl Barrier for ConeBarrier<'_> {
    fn value(&self, x: &[f64], tau: f64) -> Option<f64> {
        let (_, _, _, f, caps) = self.interior(x)?;
        let m = self.relays();
        let obj = match self.objective {
            Objective::MaxSlack => -x[2 * m],
            Objective::MinNorm => dot(&x[..2 * m], &x[..2 * m]),
        };
        Some(tau * obj - f.ln() - caps.iter().map(|g| g.ln()).sum::<f64>())
    }

    fn derivatives(&self, x: &[f64], tau: f64) -> Option<(Vec<f64>, Vec<f64>)> {
        let (q, v1, v2, f, caps) = self.interior(x)?;
        let m = self.relays();
        let n = x.len();
        let mut g = vec![0.0; n];
        let mut h = vec![0.0; n * n];

        // −ln f with f = q² − v₁² − v₂² − c².
        let mut gamma = vec![0.0; n];
        gamma[..2 * m].copy_from_slice(&self.alpha);
        if self.objective == Objective::MaxSlack {
            gamma[2 * m] = -1.0;
        }
        let mut b1 = vec![0.0; n];
        b1[..2 * m].copy_from_slice(&self.beta1);
        let mut b2 = vec![0.0; n];
        b2[..2 * m].copy_from_slice(&self.beta2);
        let df: Vec<f64> = (0..n)
            .map(|i| 2.0 * (q * gamma[i] - v1 * b1[i] - v2 * b2[i]))
            .collect();
        for i in 0..n {
            g[i] -= df[i] / f;
            for j in 0..n {
                let d2f = 2.0 * (gamma[i] * gamma[j] - b1[i] * b1[j] - b2[i] * b2[j]);
                h[i * n + j] += df[i] * df[j] / (f * f) - d2f / f;
            }
        }

        // −ln(p_i − u_re² − u_im²)
        for (i, gi) in caps.iter().enumerate() {
            let idx = [i, m + i];
            for &a in &idx {
                g[a] += 2.0 * x[a] / gi;
                for &b in &idx {
                    h[a * n + b] += 4.0 * x[a] * x[b] / (gi * gi);
                }
                h[a * n + a] += 2.0 / gi;
            }
        }

        match self.objective {
            Objective::MaxSlack => g[2 * m] -= tau,
            Objective::MinNorm => {
                for i in 0..2 * m {
                    g[i] += 2.0 * tau * x[i];
                    h[i * n + i] += 2.0 * tau;
                }
            }
        }
        Some((g, h))
    }
}

/// Decides whether some `w` with `|w_m|² ≤ p_m` reaches ratio `t`, through
/// `max s  s.t.  Re(h†w)/√t − s ≥ ‖(z†w, √((1 − 1/t) N0))‖`.
///
/// `feasible` is reported only with a witness whose exact margin is
/// nonnegative. Inside the solver's gap tolerance of the boundary the answer
/// is "infeasible".
pub fn feasibility_socp(
    ch: &ChannelRealization,
    budget: &PowerBudget,
    t: f64,
    cfg: &BarrierConfig,
) -> Result<FeasibilityWitness> {
    budget.check(ch)?;
    if !(t >= 1.0 && t.is_finite()) {
        return Err(Error::invalid("t", format!("{t} is below 1")));
    }
    let p = budget.as_slice();
    let m = p.len();
    let barrier = ConeBarrier::new(ch, p, t, Objective::MaxSlack);
    let mut x = vec![0.0; 2 * m + 1];
    x[2 * m] = -(barrier.c + 1.0);
    let nu = barrier.degree();
    // Re(h†w)/√t never exceeds Σ √p_m (|Re h_m| + |Im h_m|)/√t.
    let reach: f64 = (0..m)
        .map(|i| p[i].sqrt() * (barrier.alpha[i].abs() + barrier.alpha[m + i].abs()))
        .sum::<f64>()
        + barrier.c
        + 1.0;
    let mut tau = nu / reach;
    let mut steps = 0;

    let finish = |x: &[f64], feasible: bool, steps: usize| {
        let slack = barrier.margin(x);
        FeasibilityWitness {
            t,
            feasible: feasible && slack >= 0.0,
            witness: Witness::Vector(barrier.weights(x)),
            slack,
            newton_steps: steps,
        }
    };

    for _ in 0..cfg.max_outer {
        let outcome = center(&barrier, &mut x, tau, cfg, &mut steps, &mut |x| {
            barrier.margin(x) >= 0.0
        })?;
        if outcome == Centering::Stopped {
            return Ok(finish(&x, true, steps));
        }
        let upper = x[2 * m] + nu / tau;
        if upper < 0.0 || nu / tau <= cfg.gap_tol * x[2 * m].abs().max(1.0) {
            return Ok(finish(&x, false, steps));
        }
        tau *= cfg.tau_growth;
    }
    Err(SolverError::BarrierNoConvergence {
        iterations: steps,
        gap: nu / tau,
    }
    .into())
}

/// Minimum-norm `w` meeting ratio `t` under the caps, starting from a
/// strictly feasible `start`.
pub(crate) fn min_norm(
    ch: &ChannelRealization,
    budget: &PowerBudget,
    t: f64,
    start: &CVector,
    cfg: &BarrierConfig,
) -> Result<(CVector, usize), SolverError> {
    let p = budget.as_slice();
    let m = p.len();
    let barrier = ConeBarrier::new(ch, p, t, Objective::MinNorm);
    // Rotate so that h†w is real and nonnegative, then enter the interior.
    let hw = ch.h.dot(start);
    let rot = if hw.norm() > 0.0 {
        hw.conj() / hw.norm()
    } else {
        c64(1.0, 0.0)
    };
    let mut x = vec![0.0; 2 * m];
    for i in 0..m {
        let w = start[i] * rot;
        x[i] = w.re;
        x[m + i] = w.im;
    }
    if barrier.interior(&x).is_none() {
        return Err(SolverError::ExtractionInfeasible(t));
    }
    let nu = barrier.degree();
    let mut tau = nu / budget.total();
    let mut steps = 0;
    for _ in 0..cfg.max_outer {
        center(&barrier, &mut x, tau, cfg, &mut steps, &mut |_| false)?;
        let norm = dot(&x, &x);
        if nu / tau <= cfg.gap_tol * norm.max(1.0) {
            return Ok((barrier.weights(&x), steps));
        }
        tau *= cfg.tau_growth;
    }
    Err(SolverError::BarrierNoConvergence {
        iterations: steps,
        gap: nu / tau,
    })
}
