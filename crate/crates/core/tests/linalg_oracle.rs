//! Eigen solvers checked against nalgebra.

use approx::assert_relative_eq;
use nalgebra::{Complex, DMatrix};
use num_complex::Complex64;
use proptest::prelude::*;
use secrelay_core::linalg::{gen_eig_max, herm_eig, null_space_basis, CMatrix, CVector};

fn complex_vec(max: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-3.0..3.0f64, -3.0..3.0f64), 1..=max).prop_map(|v| {
        v.into_iter()
            .map(|(re, im)| Complex64::new(re, im))
            .collect()
    })
}

fn hermitian(n: usize) -> impl Strategy<Value = CMatrix> {
    prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64), n * n).prop_map(move |v| {
        let data: Vec<Complex64> = v
            .into_iter()
            .map(|(re, im)| Complex64::new(re, im))
            .collect();
        CMatrix::from_rows(n, n, data).hermitian_part()
    })
}

fn to_nalgebra(a: &CMatrix) -> DMatrix<Complex<f64>> {
    DMatrix::from_fn(a.rows(), a.cols(), |i, j| a[(i, j)])
}

fn sorted_desc(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| b.partial_cmp(a).unwrap());
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn eigenvalues_match_nalgebra(a in (1usize..=8).prop_flat_map(hermitian)) {
        let ours = herm_eig(&a).unwrap();
        let theirs = sorted_desc(to_nalgebra(&a).symmetric_eigen().eigenvalues.iter().copied().collect());
        for (x, y) in ours.values.iter().zip(&theirs) {
            assert_relative_eq!(*x, *y, epsilon = 1e-10 * (1.0 + a.norm()));
        }
        prop_assert!(ours.reconstruct().sub(&a).norm() <= 1e-10 * (1.0 + a.norm()));
    }

    #[test]
    fn generalized_maximum_matches_nalgebra(h in complex_vec(8), z_seed in complex_vec(8), p in 0.01..100.0f64) {
        let m = h.len();
        let z: Vec<Complex64> = (0..m).map(|i| z_seed[i % z_seed.len()]).collect();
        let h = CVector::new(h);
        let z = CVector::new(z);
        let a = h.outer().scale(p).shift_diag(1.0);
        let b = z.outer().scale(p).shift_diag(1.0);
        let (lambda, u) = gen_eig_max(&a, &b).unwrap();

        // B^{-1/2} A B^{-1/2} through nalgebra's Cholesky.
        let chol = to_nalgebra(&b).cholesky().unwrap();
        let l_inv = chol.l().try_inverse().unwrap();
        let c = &l_inv * to_nalgebra(&a) * l_inv.adjoint();
        let c = (&c + c.adjoint()) * Complex::new(0.5, 0.0);
        let top = c.symmetric_eigen().eigenvalues.iter().cloned().fold(f64::MIN, f64::max);
        assert_relative_eq!(lambda, top, max_relative = 1e-10);

        let r = a.matvec(&u).sub(&b.matvec(&u).scale_real(lambda));
        prop_assert!(r.norm() <= 1e-9 * (a.norm() + lambda * b.norm()) * u.norm());
    }

    #[test]
    fn null_space_is_orthonormal_complement(z in complex_vec(8)) {
        let z = CVector::new(z);
        prop_assume!(z.norm() > 1e-6 && z.dim() >= 2);
        let basis = null_space_basis(&z).unwrap();
        prop_assert_eq!(basis.cols(), z.dim() - 1);
        let gram = basis.adjoint().matmul(&basis);
        prop_assert!(gram.sub(&CMatrix::identity(z.dim() - 1)).norm() < 1e-12);
        prop_assert!(basis.adjoint_matvec(&z).norm() < 1e-12 * z.norm());
    }
}
