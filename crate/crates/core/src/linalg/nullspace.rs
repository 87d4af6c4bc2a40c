use num_complex::Complex64;

use super::{CMatrix, CVector, LinalgError, MAX_DIM};

/// Orthonormal basis of `{x : z† x = 0}` as an `M×(M−1)` matrix.
///
/// Uses a complex Householder reflector `Q` with `Q z = α e₁`. `Q` is unitary
/// and Hermitian, so its first column is parallel to `z` and the remaining
/// columns span the orthogonal complement.
pub fn null_space_basis(z: &CVector) -> Result<CMatrix, LinalgError> {
    z.validate()?;
    let m = z.dim();
    if m > MAX_DIM {
        return Err(LinalgError::TooLarge(m));
    }
    if m == 1 {
        return Err(LinalgError::EmptyNullSpace);
    }
    let norm = z.norm();
    if norm == 0.0 {
        return Err(LinalgError::DegenerateChannel);
    }
    let z1 = z[0];
    let phase = if z1.norm() == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        z1 / z1.norm()
    };
    // α = −e^{i arg z₁}‖z‖ avoids cancellation in v₁ = z₁ − α.
    let alpha = -phase * norm;
    let mut v = z.clone();
    v[0] -= alpha;
    let vnorm2 = v.norm_sqr();

    let mut basis = CMatrix::zeros(m, m - 1);
    for col in 1..m {
        // Column `col` of Q = I − 2 v v† / (v† v).
        let coef = v[col].conj() * (2.0 / vnorm2);
        for row in 0..m {
            let delta = if row == col { 1.0 } else { 0.0 };
            basis[(row, col - 1)] = Complex64::new(delta, 0.0) - v[row] * coef;
        }
    }
    Ok(basis)
}
