mod common;

use common::{density_from, hermitian_from, raw, unitary_from};
use faer::Mat;
use proptest::prelude::*;
use qspoof_core::c64;
use qspoof_core::qmat::{
    eig_hermitian, expm, matrix_function, partial_trace, tensor_product, trace_norm, HermitianOperator,
};

fn conjugate(a: &HermitianOperator, u: &Mat<c64>) -> HermitianOperator {
    a.conjugate_by(u.as_ref()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn partial_trace_inverts_tensor(d1 in 1usize..4, d2 in 1usize..4, ra in raw(3), rb in raw(3)) {
        let a = hermitian_from(d1, &ra);
        let b = hermitian_from(d2, &rb);
        let ab = tensor_product(&a, &b);
        let first = partial_trace(&ab, &[d1, d2], &[0]).unwrap();
        prop_assert!(first.max_abs_diff(&a.scaled(b.trace())).unwrap() <= 1e-12);
        let second = partial_trace(&ab, &[d1, d2], &[1]).unwrap();
        prop_assert!(second.max_abs_diff(&b.scaled(a.trace())).unwrap() <= 1e-12);
    }

    #[test]
    fn spectral_functions_commute_with_unitaries(d in 1usize..6, ra in raw(5), ru in raw(5)) {
        let a = hermitian_from(d, &ra);
        let u = unitary_from(d, &ru);
        let lhs = expm(&conjugate(&a, &u)).unwrap();
        let rhs = conjugate(&expm(&a).unwrap(), &u);
        prop_assert!(lhs.max_abs_diff(&rhs).unwrap() <= 1e-9);

        let cube = |x: f64| x * x * x - 0.5 * x;
        let lhs = matrix_function(&conjugate(&a, &u), cube).unwrap();
        let rhs = conjugate(&matrix_function(&a, cube).unwrap(), &u);
        prop_assert!(lhs.max_abs_diff(&rhs).unwrap() <= 1e-9);
    }

    #[test]
    fn trace_norm_is_a_norm(d in 1usize..6, ra in raw(5), rb in raw(5), s in -3.0..3.0f64) {
        let a = hermitian_from(d, &ra);
        let b = hermitian_from(d, &rb);
        let na = trace_norm(&a).unwrap();
        let nb = trace_norm(&b).unwrap();
        prop_assert!(trace_norm(&(&a + &b)).unwrap() <= na + nb + 1e-9);
        prop_assert!((trace_norm(&a.scaled(s)).unwrap() - s.abs() * na).abs() <= 1e-9);
        prop_assert!(na >= 0.0);
    }

    #[test]
    fn eigen_reconstruction(d in 1usize..24, seed in prop::collection::vec(-1.0..1.0f64, 2 * 23 * 23)) {
        let a = hermitian_from(d, &seed);
        let s = eig_hermitian(&a).unwrap();
        prop_assert!(s.reconstruct().max_abs_diff(&a).unwrap() <= 1e-9);
        prop_assert!(s.orthonormality_residual() <= 1e-9);
        prop_assert!(s.eigenvalues().windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn density_trace_norm_is_one(d in 1usize..5, r in raw(4)) {
        let rho = density_from(d, &r, false);
        prop_assert!((trace_norm(rho.operator()).unwrap() - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn eigen_reconstruction_at_scale() {
    // 3^6 = 729 = largest power of the radar dimension used in number-mode tests
    let d = 729;
    let a = HermitianOperator::from_fn(d, |i, j| {
        let x = ((i * 31 + j * 17) % 101) as f64 / 101.0 - 0.5;
        let y = ((i * 7 + j * 13) % 53) as f64 / 53.0 - 0.5;
        c64::new(x, y)
    });
    let s = eig_hermitian(&a).unwrap();
    assert!(s.reconstruct().max_abs_diff(&a).unwrap() <= 1e-9);
}
