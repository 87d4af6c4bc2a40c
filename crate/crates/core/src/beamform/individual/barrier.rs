//! Damped Newton centering shared by the barrier solvers.

use super::BarrierConfig;
use crate::error::SolverError;
use crate::linalg::real::solve_spd;

/// A barrier-augmented objective `τ·f₀(x) + φ(x)` in real coordinates.
pub(crate) trait Barrier {
    /// Objective value, or `None` outside the barrier domain.
    fn value(&self, x: &[f64], tau: f64) -> Option<f64>;

    /// Gradient and row-major Hessian. Only called inside the domain.
    fn derivatives(&self, x: &[f64], tau: f64) -> Option<(Vec<f64>, Vec<f64>)>;
}

const MAX_DAMPED_STEPS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Centering {
    Centered,
    /// The caller's monitor asked to stop.
    Stopped,
    /// No further decrease is representable in floating point, though the
    /// Newton decrement is still above tolerance.
    Stalled,
}

/// Newton iterations on `b` at fixed `tau` until the Newton decrement is
/// below tolerance or `monitor` returns `true`.
pub(crate) fn center<B: Barrier>(
    b: &B,
    x: &mut [f64],
    tau: f64,
    cfg: &BarrierConfig,
    steps: &mut usize,
    monitor: &mut dyn FnMut(&[f64]) -> bool,
) -> Result<Centering, SolverError> {
    let mut damped = 0;
    loop {
        if monitor(x) {
            return Ok(Centering::Stopped);
        }
        let f0 = b
            .value(x, tau)
            .ok_or(SolverError::SingularNewtonSystem(*steps))?;
        let (g, h) = b
            .derivatives(x, tau)
            .ok_or(SolverError::SingularNewtonSystem(*steps))?;
        let neg: Vec<f64> = g.iter().map(|v| -v).collect();
        let dx = solve_spd(&h, &neg).ok_or(SolverError::SingularNewtonSystem(*steps))?;
        let slope: f64 = g.iter().zip(&dx).map(|(a, b)| a * b).sum();
        if -slope / 2.0 <= cfg.newton_tol {
            return Ok(Centering::Centered);
        }
        *steps += 1;
        if *steps > cfg.max_newton_steps {
            return Err(SolverError::BarrierNoConvergence {
                iterations: *steps,
                gap: f64::NAN,
            });
        }

        let mut alpha = 1.0;
        let mut trial = vec![0.0; x.len()];
        let mut accepted = None;
        for _ in 0..60 {
            for ((t, xi), di) in trial.iter_mut().zip(x.iter()).zip(&dx) {
                *t = xi + alpha * di;
            }
            if trial == x {
                break;
            }
            if let Some(f) = b.value(&trial, tau) {
                if f <= f0 + 0.25 * alpha * slope {
                    accepted = Some(f);
                    break;
                }
            }
            alpha *= 0.5;
        }
        match accepted {
            Some(f) if f < f0 => x.copy_from_slice(&trial),
            _ => {
                // Values no longer resolve the decrease; fall back to the
                // damped step 1/(1 + λ), which stays in the domain of a
                // self-concordant barrier without comparing values.
                if damped == MAX_DAMPED_STEPS {
                    return Ok(Centering::Stalled);
                }
                damped += 1;
                let step = 1.0 / (1.0 + (-slope).sqrt());
                for ((t, xi), di) in trial.iter_mut().zip(x.iter()).zip(&dx) {
                    *t = xi + step * di;
                }
                if trial == x || b.value(&trial, tau).is_none() {
                    return Ok(Centering::Stalled);
                }
                x.copy_from_slice(&trial);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// τ·x − ln x − ln(1 − x), minimized at the analytic center shifted by τ.
    struct Interval;

    impl Barrier for Interval {
        fn value(&self, x: &[f64], tau: f64) -> Option<f64> {
            let v = x[0];
            (v > 0.0 && v < 1.0).then(|| tau * v - v.ln() - (1.0 - v).ln())
        }

        fn derivatives(&self, x: &[f64], tau: f64) -> Option<(Vec<f64>, Vec<f64>)> {
            let v = x[0];
            Some((
                vec![tau - 1.0 / v + 1.0 / (1.0 - v)],
                vec![1.0 / (v * v) + 1.0 / ((1.0 - v) * (1.0 - v))],
            ))
        }
    }

    #[test]
    fn follows_central_path_of_interval() {
        let cfg = BarrierConfig::default();
        let mut x = vec![0.5];
        let mut steps = 0;
        let mut tau = 1.0;
        while 2.0 / tau > 1e-9 {
            let r = center(&Interval, &mut x, tau, &cfg, &mut steps, &mut |_| false).unwrap();
            assert_eq!(r, Centering::Centered);
            tau *= 10.0;
        }
        assert!(x[0] > 0.0 && x[0] < 1e-8, "{x:?}");
    }

    #[test]
    fn reaches_center_at_large_weight() {
        let cfg = BarrierConfig::default();
        let mut x = vec![0.5];
        let mut steps = 0;
        let tau = 1e13;
        center(&Interval, &mut x, tau, &cfg, &mut steps, &mut |_| false).unwrap();
        let exact = 1.0 / tau;
        assert!((x[0] - exact).abs() <= 1e-6 * exact, "{} vs {exact}", x[0]);
    }

    #[test]
    fn monitor_stops_early() {
        let cfg = BarrierConfig::default();
        let mut x = vec![0.5];
        let mut steps = 0;
        let r = center(&Interval, &mut x, 100.0, &cfg, &mut steps, &mut |x| {
            x[0] < 0.2
        })
        .unwrap();
        assert_eq!(r, Centering::Stopped);
        assert!(x[0] < 0.2);
    }
}
