//! Exhaustive grid search over `w_m = r_m √p_m e^{jθ_m}` for small `M`.
//!
//! The maximum over the grid is exact: whole subtrees are skipped only when
//! an upper bound on every completion cannot beat the incumbent.

use num_complex::Complex64;

use super::PowerBudget;
use crate::channel::ChannelRealization;
use crate::error::{Error, Result};

/// Largest relay count the grid search accepts.
pub const ORACLE_MAX_RELAYS: usize = 3;

struct Search<'a> {
    /// `conj(h_m) √p_m` and `conj(z_m) √p_m`, so `h†w = Σ a_m r_m e^{jθ_m}`.
    a: Vec<Complex64>,
    b: Vec<Complex64>,
    /// `Σ_{k ≥ m} |a_k|` and `Σ_{k ≥ m} |b_k|`.
    a_tail: Vec<f64>,
    b_tail: Vec<f64>,
    radii: Vec<f64>,
    phasors: &'a [Complex64],
    n0: f64,
    best: f64,
}

impl Search<'_> {
    fn ratio(&self, num: f64, den: f64) -> f64 {
        (self.n0 + num) / (self.n0 + den)
    }

    /// Best ratio any completion of relays `m..` can reach from partial sums.
    fn bound(&self, sa: f64, sb: f64) -> f64 {
        let num = sa;
        let den = sb.max(0.0);
        self.ratio(num * num, den * den)
    }

    fn visit(&mut self, m: usize, acc_a: Complex64, acc_b: Complex64) {
        let last = m + 1 == self.a.len();
        let rest_a = self.a_tail.get(m + 1).copied().unwrap_or(0.0);
        let rest_b = self.b_tail.get(m + 1).copied().unwrap_or(0.0);
        let (am, bm) = (self.a[m].norm(), self.b[m].norm());
        let phasors: &[Complex64] = if m == 0 {
            &self.phasors[..1]
        } else {
            self.phasors
        };
        for i in 0..self.radii.len() {
            let r = self.radii[i];
            let ub = self.bound(
                acc_a.norm() + r * am + rest_a,
                acc_b.norm() - r * bm - rest_b,
            );
            if ub <= self.best {
                continue;
            }
            let (ra, rb) = (self.a[m] * r, self.b[m] * r);
            for e in phasors {
                let na = acc_a + ra * e;
                let nb = acc_b + rb * e;
                if last {
                    let v = self.ratio(na.norm_sqr(), nb.norm_sqr());
                    if v > self.best {
                        self.best = v;
                    }
                } else if self.bound(na.norm() + rest_a, nb.norm() - rest_b) > self.best {
                    self.visit(m + 1, na, nb);
                }
            }
        }
    }
}

/// Best secrecy rate (bits) over the grid `r_m ∈ {0, 1/K, …, 1}`,
/// `θ_m ∈ {0, 2π/K, …}` with `θ_1 = 0`, where `K = resolution`.
pub fn oracle_grid(
    ch: &ChannelRealization,
    budget: &PowerBudget,
    resolution: usize,
) -> Result<f64> {
    budget.check(ch)?;
    let m = ch.relays();
    if m > ORACLE_MAX_RELAYS {
        return Err(Error::invalid(
            "relays",
            format!("grid search supports at most {ORACLE_MAX_RELAYS} relays, got {m}"),
        ));
    }
    if resolution == 0 {
        return Err(Error::invalid("resolution", "must be positive"));
    }
    let k = resolution;
    let phasors: Vec<Complex64> = (0..k)
        .map(|i| Complex64::from_polar(1.0, std::f64::consts::TAU * i as f64 / k as f64))
        .collect();
    // Largest radius first so strong incumbents appear early.
    let radii: Vec<f64> = (0..=k).rev().map(|i| i as f64 / k as f64).collect();
    let sqrt_p: Vec<f64> = budget.as_slice().iter().map(|p| p.sqrt()).collect();
    let a: Vec<Complex64> =
        ch.h.iter()
            .zip(&sqrt_p)
            .map(|(h, s)| h.conj() * s)
            .collect();
    let b: Vec<Complex64> =
        ch.z.iter()
            .zip(&sqrt_p)
            .map(|(z, s)| z.conj() * s)
            .collect();
    let tail = |v: &[Complex64]| -> Vec<f64> {
        let mut out = vec![0.0; v.len()];
        let mut acc = 0.0;
        for i in (0..v.len()).rev() {
            acc += v[i].norm();
            out[i] = acc;
        }
        out
    };
    let mut search = Search {
        a_tail: tail(&a),
        b_tail: tail(&b),
        a,
        b,
        radii,
        phasors: &phasors,
        n0: ch.noise_rx,
        best: 1.0,
    };
    let zero = Complex64::new(0.0, 0.0);
    search.visit(0, zero, zero);
    Ok(search.best.log2().max(0.0))
}
