use num_complex::Complex64;

use super::{CMatrix, CVector, LinalgError};

/// Pivots below this fraction of the largest diagonal entry are treated as
/// a loss of positive definiteness.
const PIVOT_TOL: f64 = 1e-12;

/// Lower-triangular Cholesky factor `L` with `L L† = B`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    l: CMatrix,
}

/// Factors a Hermitian positive definite matrix.
pub fn cholesky(b: &CMatrix) -> Result<Cholesky, LinalgError> {
    b.check_hermitian()?;
    factor(b)
}

/// Factorization without the symmetry check. Only the lower triangle of `b`
/// is read.
pub(crate) fn factor(b: &CMatrix) -> Result<Cholesky, LinalgError> {
    let n = b.rows();
    let scale = (0..n).map(|i| b[(i, i)].re.abs()).fold(0.0, f64::max);
    factor_with_floor(b, PIVOT_TOL * scale.max(f64::MIN_POSITIVE))
}

/// Factorization accepting any positive pivot. Barrier slack matrices become
/// nearly singular on purpose as the barrier weight grows.
pub(crate) fn factor_positive(b: &CMatrix) -> Result<Cholesky, LinalgError> {
    factor_with_floor(b, 0.0)
}

fn factor_with_floor(b: &CMatrix, floor: f64) -> Result<Cholesky, LinalgError> {
    let n = b.rows();
    let mut l = CMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = b[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !(d > floor) {
            return Err(LinalgError::NotPositiveDefinite { pivot: j, value: d });
        }
        let djj = d.sqrt();
        l[(j, j)] = Complex64::new(djj, 0.0);
        for i in (j + 1)..n {
            let mut s = b[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / djj;
        }
    }
    Ok(Cholesky { l })
}

impl Cholesky {
    pub fn l(&self) -> &CMatrix {
        &self.l
    }

    pub fn into_l(self) -> CMatrix {
        self.l
    }

    pub fn dim(&self) -> usize {
        self.l.rows()
    }

    /// `ln det B = 2 Σ ln L_ii`
    pub fn ln_det(&self) -> f64 {
        (0..self.dim()).map(|i| self.l[(i, i)].re.ln()).sum::<f64>() * 2.0
    }

    /// Solves `L x = b` in place.
    pub fn forward(&self, x: &mut [Complex64]) {
        let n = self.dim();
        for i in 0..n {
            let mut s = x[i];
            for k in 0..i {
                s -= self.l[(i, k)] * x[k];
            }
            x[i] = s / self.l[(i, i)].re;
        }
    }

    /// Solves `L† x = b` in place.
    pub fn backward(&self, x: &mut [Complex64]) {
        let n = self.dim();
        for i in (0..n).rev() {
            let mut s = x[i];
            for k in (i + 1)..n {
                s -= self.l[(k, i)].conj() * x[k];
            }
            x[i] = s / self.l[(i, i)].re;
        }
    }

    /// Solves `B x = b`.
    pub fn solve(&self, b: &CVector) -> CVector {
        let mut x = b.clone().into_inner();
        self.forward(&mut x);
        self.backward(&mut x);
        CVector::new(x)
    }

    /// `B⁻¹`, returned exactly Hermitian.
    pub fn inverse(&self) -> CMatrix {
        let n = self.dim();
        let mut inv = CMatrix::zeros(n, n);
        for j in 0..n {
            let mut col = vec![Complex64::new(0.0, 0.0); n];
            col[j] = Complex64::new(1.0, 0.0);
            self.forward(&mut col);
            self.backward(&mut col);
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        inv.hermitian_part()
    }

    /// `L⁻¹ A L⁻†` for Hermitian `A`, returned exactly Hermitian.
    pub fn congruence(&self, a: &CMatrix) -> CMatrix {
        let n = self.dim();
        // Y = L⁻¹ A, column by column.
        let mut y = CMatrix::zeros(n, n);
        for j in 0..n {
            let mut col: Vec<Complex64> = (0..n).map(|i| a[(i, j)]).collect();
            self.forward(&mut col);
            for i in 0..n {
                y[(i, j)] = col[i];
            }
        }
        // C = Y L⁻†, i.e. C† = L⁻¹ Y†.
        let yh = y.adjoint();
        let mut ch = CMatrix::zeros(n, n);
        for j in 0..n {
            let mut col: Vec<Complex64> = (0..n).map(|i| yh[(i, j)]).collect();
            self.forward(&mut col);
            for i in 0..n {
                ch[(i, j)] = col[i];
            }
        }
        ch.adjoint().hermitian_part()
    }
}
