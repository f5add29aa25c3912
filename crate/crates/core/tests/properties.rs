//! Property tests for the structural invariants that hold on all inputs.

use microcosm_core::dim2::SplitQuaternion;
use microcosm_core::efuncs::{self, EntireFn};
use microcosm_core::matcore::{self, cx, re, CMatrix};
use proptest::prelude::*;

fn small_complex() -> impl Strategy<Value = (f64, f64)> {
    (-0.9..0.9f64).prop_flat_map(|a| ((Just(a)), -0.9..0.9f64))
}

fn cmatrix(n: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    proptest::collection::vec(small_complex(), n * n)
}

fn to_matrix(n: usize, v: &[(f64, f64)]) -> CMatrix {
    CMatrix::from_fn(n, n, |i, j| {
        let (a, b) = v[i * n + j];
        cx(a, b)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sym_skew_split_reassembles(v in cmatrix(3)) {
        let a = to_matrix(3, &v);
        let (s, k) = matcore::sym_skew_split(&a);
        prop_assert!((s.clone() + &k - &a).norm() < 1.0e-13);
        prop_assert!(matcore::sym_residual(&s) < 1.0e-13);
        prop_assert!(matcore::skew_residual(&k) < 1.0e-13);
    }

    #[test]
    fn subspace_maps_codomain_split(v in cmatrix(3)) {
        let a = to_matrix(3, &v);
        let m = matcore::subspace_maps(&a, 0.0).unwrap();
        let lhs = &m.im * m.im.adjoint() + &m.ker_t * m.ker_t.adjoint();
        prop_assert!((lhs - matcore::eye(3)).norm() < 1.0e-10);
        // frames orthonormal
        prop_assert!((m.im.adjoint() * &m.im - matcore::eye(m.rank)).norm() < 1.0e-12);
    }

    #[test]
    fn t_u_reciprocal(z in small_complex()) {
        let z = cx(z.0 * 0.5, z.1 * 0.5);
        let t = efuncs::eval_scalar(EntireFn::T, z).unwrap();
        let u = efuncs::eval_scalar(EntireFn::U, z).unwrap();
        prop_assert!((t * u - re(1.0)).norm() < 1.0e-12);
    }

    #[test]
    fn sigma_gamma_doubling(z in small_complex()) {
        let z = cx(z.0, z.1);
        let sg = efuncs::eval_scalar(EntireFn::Sigma, z).unwrap();
        let g2 = efuncs::eval_scalar(EntireFn::Gamma, re(2.0) * z).unwrap();
        prop_assert!((sg * sg - g2).norm() < 1.0e-12);
    }

    #[test]
    fn split_quaternion_matrix_homomorphism(
        x in proptest::collection::vec(small_complex(), 4),
        y in proptest::collection::vec(small_complex(), 4),
    ) {
        let qx = SplitQuaternion::new(cx(x[0].0, x[0].1), cx(x[1].0, x[1].1), cx(x[2].0, x[2].1), cx(x[3].0, x[3].1));
        let qy = SplitQuaternion::new(cx(y[0].0, y[0].1), cx(y[1].0, y[1].1), cx(y[2].0, y[2].1), cx(y[3].0, y[3].1));
        let lhs = qx.mul(&qy).to_matrix();
        let rhs = qx.to_matrix() * qy.to_matrix();
        prop_assert!((lhs - rhs).norm() < 1.0e-12);
    }

    #[test]
    fn mat_exp_inverse_is_exp_of_negation(v in cmatrix(3)) {
        let a = to_matrix(3, &v);
        let e = matcore::mat_exp(&a);
        let em = matcore::mat_exp(&(-a.clone()));
        prop_assert!((e * em - matcore::eye(3)).norm() < 1.0e-11);
    }

    #[test]
    fn hamiltonian_frames_are_lagrangian(v in cmatrix(4)) {
        // Z = J·sym(v) is Hamiltonian for any complex symmetric matrix
        let s = matcore::symmetrize(&to_matrix(4, &v));
        let z = matcore::symplectic_j(2) * s;
        let h = microcosm_core::riccati::HamiltonianMatrix::from_matrix(z).unwrap();
        let f = microcosm_core::riccati::invariant_lagrangian_frame(&h).unwrap();
        let (inv, lag, orth) = f.residuals(&h);
        prop_assert!(inv < 1.0e-8 * (1.0 + h.z().norm()));
        prop_assert!(lag < 1.0e-8);
        prop_assert!(orth < 1.0e-8);
    }
}
