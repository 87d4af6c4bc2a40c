//! Real symmetric positive definite solves for Newton steps.

/// Solves `H x = b` for symmetric positive definite row-major `H` (n×n).
///
/// Barrier Hessians near the boundary can be badly scaled, so the system is
/// first equilibrated by the diagonal. If the Cholesky pivots still break
/// down, a growing diagonal jitter is added.
pub(crate) fn solve_spd(h: &[f64], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    debug_assert_eq!(h.len(), n * n);
    if (0..n).any(|i| !(h[i * n + i] > 0.0) || !h[i * n + i].is_finite()) {
        return None;
    }
    let d: Vec<f64> = (0..n).map(|i| 1.0 / h[i * n + i].sqrt()).collect();
    let mut scaled = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            scaled[i * n + j] = h[i * n + j] * d[i] * d[j];
        }
    }
    let rhs: Vec<f64> = b.iter().zip(&d).map(|(x, s)| x * s).collect();

    let mut jitter = 0.0;
    for _ in 0..6 {
        if let Some(l) = cholesky(&scaled, n, jitter) {
            let mut y = rhs.clone();
            for i in 0..n {
                let mut s = y[i];
                for k in 0..i {
                    s -= l[i * n + k] * y[k];
                }
                y[i] = s / l[i * n + i];
            }
            for i in (0..n).rev() {
                let mut s = y[i];
                for k in (i + 1)..n {
                    s -= l[k * n + i] * y[k];
                }
                y[i] = s / l[i * n + i];
            }
            return Some(y.iter().zip(&d).map(|(x, s)| x * s).collect());
        }
        jitter = if jitter == 0.0 { 1e-14 } else { jitter * 100.0 };
    }
    None
}

fn cholesky(a: &[f64], n: usize, jitter: f64) -> Option<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let mut d = a[j * n + j] + jitter;
        for k in 0..j {
            d -= l[j * n + k] * l[j * n + k];
        }
        if !(d > 0.0) || !d.is_finite() {
            return None;
        }
        let djj = d.sqrt();
        l[j * n + j] = djj;
        for i in (j + 1)..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = s / djj;
        }
    }
    Some(l)
}
