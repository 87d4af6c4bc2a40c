use num_complex::Complex64;

use super::chol::factor;
use super::{CMatrix, CVector, LinalgError};

const MAX_SWEEPS: usize = 100;

/// Eigendecomposition of a Hermitian matrix, eigenvalues in descending order.
#[derive(Debug, Clone)]
pub struct HermEig {
    pub values: Vec<f64>,
    pub vectors: Vec<CVector>,
}

impl HermEig {
    /// `Σ λ_i v_i v_i†`
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.values.len();
        let mut m = CMatrix::zeros(n, n);
        for (lambda, v) in self.values.iter().zip(&self.vectors) {
            m = m.add(&v.outer().scale(*lambda));
        }
        m
    }
}

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
///
/// Each rotation first strips the phase of the pivot `a_pq`, then applies a
/// real Givens rotation that annihilates it. Sweeps stop once the
/// off-diagonal mass is negligible relative to the Frobenius norm.
pub fn herm_eig(a: &CMatrix) -> Result<HermEig, LinalgError> {
    let n = a.check_hermitian()?;
    let mut m = a.hermitian_part();
    let mut v = CMatrix::identity(n);
    let total = m.norm();
    let threshold = (f64::EPSILON * total).powi(2);

    let mut converged = n == 1 || total == 0.0;
    let mut sweep = 0;
    while !converged && sweep < MAX_SWEEPS {
        sweep += 1;
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)].norm_sqr())
            .sum();
        converged = off <= threshold;
    }
    if !converged {
        return Err(LinalgError::NoConvergence(MAX_SWEEPS));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(j, j)].re.total_cmp(&m[(i, i)].re));
    let values = order.iter().map(|&i| m[(i, i)].re).collect();
    let vectors = order.iter().map(|&i| v.column(i)).collect();
    Ok(HermEig { values, vectors })
}

fn rotate(m: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = m[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    // Skip rotations that cannot change the diagonal in floating point.
    if r < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        m[(p, q)] = Complex64::new(0.0, 0.0);
        m[(q, p)] = Complex64::new(0.0, 0.0);
        return;
    }
    let phase = apq / r;
    let theta = (aqq - app) / (2.0 * r);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    // U restricted to (p, q): [[c, s], [-s e^{-iφ}, c e^{-iφ}]]
    let ph = phase.conj();
    let u_pp = Complex64::new(c, 0.0);
    let u_pq = Complex64::new(s, 0.0);
    let u_qp = ph * (-s);
    let u_qq = ph * c;

    let n = m.rows();
    for i in 0..n {
        let x = m[(i, p)];
        let y = m[(i, q)];
        m[(i, p)] = x * u_pp + y * u_qp;
        m[(i, q)] = x * u_pq + y * u_qq;
    }
    for j in 0..n {
        let x = m[(p, j)];
        let y = m[(q, j)];
        m[(p, j)] = u_pp.conj() * x + u_qp.conj() * y;
        m[(q, j)] = u_pq.conj() * x + u_qq.conj() * y;
    }
    m[(p, q)] = Complex64::new(0.0, 0.0);
    m[(q, p)] = Complex64::new(0.0, 0.0);
    m[(p, p)] = Complex64::new(m[(p, p)].re, 0.0);
    m[(q, q)] = Complex64::new(m[(q, q)].re, 0.0);
    for i in 0..n {
        let x = v[(i, p)];
        let y = v[(i, q)];
        v[(i, p)] = x * u_pp + y * u_qp;
        v[(i, q)] = x * u_pq + y * u_qq;
    }
}

/// Rotates `v` so its largest-magnitude entry is real and nonnegative.
/// The first entry wins ties.
pub fn normalize_phase(v: &CVector) -> CVector {
    let mut best = 0;
    let mut best_mag = -1.0;
    for (i, c) in v.iter().enumerate() {
        let mag = c.norm();
        // Relative slack keeps the choice stable under rounding noise.
        if mag > best_mag * (1.0 + 1e-12) {
            best = i;
            best_mag = mag;
        }
    }
    if best_mag <= 0.0 {
        return v.clone();
    }
    let rot = v[best].conj() / best_mag;
    let mut out = v.scale(rot);
    out[best] = Complex64::new(out[best].norm(), 0.0);
    out
}

/// Largest generalized eigenpair of `(A, B)` with `B` positive definite.
///
/// Reduces to the standard problem `L⁻¹ A L⁻† y = λ y` with `B = L L†` and
/// maps back through `u = L⁻† y`. The returned `u` has unit Euclidean norm
/// and its largest-magnitude entry is real nonnegative.
pub fn gen_eig_max(a: &CMatrix, b: &CMatrix) -> Result<(f64, CVector), LinalgError> {
    let n = a.check_hermitian()?;
    let nb = b.check_hermitian()?;
    if n != nb {
        return Err(LinalgError::DimensionMismatch {
            expected: n,
            got: nb,
        });
    }
    let chol = factor(b)?;
    let reduced = chol.congruence(a);
    let eig = herm_eig(&reduced)?;
    let lambda = eig.values[0];
    let mut u = eig.vectors[0].clone().into_inner();
    chol.backward(&mut u);
    let u = CVector::new(u);
    let norm = u.norm();
    Ok((lambda, normalize_phase(&u.scale_real(1.0 / norm))))
}
