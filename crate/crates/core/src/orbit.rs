//! Construction of the one-parameter symplectic group generator W whose orbit
//! realizes the microcosm's curve in the Lagrangian Grassmannian, covering
//! generic and resonant cases, with recovery of a real generator from the
//! complex one.

use crate::error::{Error, Result};
use crate::matcore::{self, CMatrix};

/// Generator data: A = −(S₀+ω), a symmetric pair (H₀, M₀) with
/// A·H₀ + H₀·Aᵀ + M₀ = I and AᵀM₀ + M₀A = 0, and the Hamiltonian
/// W = [[−Aᵀ, 0], [M₀, A]] generating the Grassmannian curve
/// [I; H(u)] ~ e^{uW}[I; H₀].
#[derive(Debug, Clone)]
pub struct OrbitGenerator {
    pub a: CMatrix,
    pub h0: CMatrix,
    pub m0: CMatrix,
    pub w: CMatrix,
}

impl OrbitGenerator {
    /// Assemble from explicitly given parts, validating the identities.
    pub fn with_parts(a: CMatrix, h0: CMatrix, m0: CMatrix) -> Result<Self> {
        let n = a.nrows();
        if !a.is_square() || h0.nrows() != n || m0.nrows() != n {
            return Err(Error::invalid("OrbitGenerator: shape mismatch"));
        }
        let scale = 1.0 + a.norm() * (1.0 + h0.norm() + m0.norm());
        let resid = (&a * &h0 + &h0 * a.transpose() + &m0 - matcore::eye(n)).norm();
        if resid > 1.0e-9 * scale {
            return Err(Error::invalid(format!(
                "OrbitGenerator: AH₀ + H₀Aᵀ + M₀ − I residual {resid:.3e}"
            )));
        }
        let kernel = (a.transpose() * &m0 + &m0 * &a).norm();
        if kernel > 1.0e-9 * scale {
            return Err(Error::invalid(format!(
                "OrbitGenerator: AᵀM₀ + M₀A residual {kernel:.3e}"
            )));
        }
        let w = matcore::block2x2(
            &(-a.transpose()),
            &matcore::zeros(n, n),
            &m0,
            &a,
        );
        Ok(Self { a, h0, m0, w })
    }

    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    /// Generator from a directly supplied A (the worked-example form).
    pub fn from_matrix_a(a: &CMatrix) -> Result<Self> {
        let (h0, m0) = matcore::sylvester_symmetric(a, &matcore::eye(a.nrows()))?;
        Self::with_parts(a.clone(), h0, m0)
    }
}

/// Build the generator from a constant Sachs solution: A = −(S₀ + ω).
/// In the generic case (spectra of ω±S₀ disjoint) M₀ = 0 falls out of the
/// Sylvester projection automatically.
pub fn build_generator(s0: &CMatrix, omega: &CMatrix) -> Result<OrbitGenerator> {
    if s0.nrows() != omega.nrows() {
        return Err(Error::invalid("build_generator: dimension mismatch"));
    }
    if !matcore::is_symmetric(s0, 1.0e-8) || !matcore::is_skew(omega, 1.0e-10) {
        return Err(Error::invalid(
            "build_generator: s0 must be symmetric and ω skew",
        ));
    }
    let a = -(s0 + omega);
    OrbitGenerator::from_matrix_a(&a)
}

/// A point of the curve in the Lagrangian Grassmannian.  `h` is present when
/// the frame's top block is invertible; points at infinity are first-class
/// values, not errors.
#[derive(Debug, Clone)]
pub struct GrassmannCurvePoint {
    pub u: f64,
    pub frame: CMatrix,
    pub h: Option<CMatrix>,
}

/// Evaluate the orbit frame e^{uW}·[I; H₀] and extract the affine chart
/// H = bottom·top⁻¹ when the top block is invertible.
pub fn orbit_point(g: &OrbitGenerator, u: f64) -> GrassmannCurvePoint {
    let n = g.n();
    let seed = matcore::vstack(&matcore::eye(n), &g.h0);
    let frame = matcore::mat_exp(&g.w.scale(u)) * seed;
    let top = matcore::top_block(&frame, n);
    let bottom = matcore::bottom_block(&frame, n);
    let h = if matcore::sigma_min(&top) > 1.0e-12 * (1.0 + matcore::sigma_max(&frame)) {
        matcore::solve(&top.transpose(), &bottom.transpose())
            .ok()
            .map(|ht| matcore::symmetrize(&ht.transpose()))
    } else {
        None
    };
    GrassmannCurvePoint { u, frame, h }
}

#[derive(Debug, Clone)]
pub struct OrbitReport {
    /// max over samples of ‖Ḣ(u) − e^{uA}e^{uAᵀ}‖ (centered differences)
    pub max_hdot_err: f64,
    /// max over samples of ‖frameᵀ J frame‖
    pub max_lagrangian_residual: f64,
    pub samples_checked: usize,
    pub samples_at_infinity: usize,
    pub pass: bool,
}

/// Verify the defining ODE Ḣ = e^{uA}e^{uAᵀ} and the Lagrangian property of
/// the orbit frames over the given samples.
pub fn verify_orbit(g: &OrbitGenerator, samples: &[f64]) -> OrbitReport {
    let n = g.n();
    let j = matcore::symplectic_j(n);
    let fd = 1.0e-5;
    let mut max_hdot = 0.0f64;
    let mut max_lag = 0.0f64;
    let mut checked = 0usize;
    let mut at_inf = 0usize;
    for &u in samples {
        let pt = orbit_point(g, u);
        max_lag = max_lag.max((pt.frame.transpose() * &j * &pt.frame).norm());
        let hp = orbit_point(g, u + fd).h;
        let hm = orbit_point(g, u - fd).h;
        match (hp, hm) {
            (Some(hp), Some(hm)) => {
                let hdot = (hp - hm).scale(0.5 / fd);
                let expect =
                    matcore::mat_exp(&g.a.scale(u)) * matcore::mat_exp(&g.a.transpose().scale(u));
                max_hdot = max_hdot.max((hdot - expect).norm());
                checked += 1;
            }
            _ => at_inf += 1,
        }
    }
    OrbitReport {
        max_hdot_err: max_hdot,
        max_lagrangian_residual: max_lag,
        samples_checked: checked,
        samples_at_infinity: at_inf,
        pass: checked > 0 && max_hdot <= 1.0e-6 && max_lag <= 1.0e-6,
    }
}

/// The symplectic change of frame from the Σ-adapted complex Lagrangian basis
/// to the real canonical Jacobi basis (initial-condition coordinates
/// z = (X(0), Ẋ(0))).  A Jacobi field X = L·(a + (H−H₀)b) has
/// ζ = (b, H₀b − a) = Ξz with Ξ = [[−Σ, I], [−H₀Σ−I, H₀]]; this returns
/// basis_map = Ξ⁻¹ (exactly symplectic, computed as −JΞᵀJ).
pub fn sigma_adapted_basis_map(sigma: &CMatrix, h0: &CMatrix) -> Result<CMatrix> {
    let n = sigma.nrows();
    if !matcore::is_symmetric(sigma, 1.0e-8) || !matcore::is_symmetric(h0, 1.0e-8) {
        return Err(Error::invalid(
            "sigma_adapted_basis_map: Σ and H₀ must be symmetric",
        ));
    }
    let xi = matcore::block2x2(
        &(-sigma.clone()),
        &matcore::eye(n),
        &(-(h0 * sigma) - matcore::eye(n)),
        h0,
    );
    let j = matcore::symplectic_j(n);
    let xi_inv = -(&j * xi.transpose() * &j);
    // Gram check: Ξ must be symplectic to machine accuracy by construction
    let gram = (xi.transpose() * &j * &xi - &j).norm();
    if gram > 1.0e-9 * (1.0 + xi.norm() * xi.norm()) {
        return Err(Error::Consistency(format!(
            "sigma_adapted_basis_map: frame Gram mismatch {gram:.3e}"
        )));
    }
    Ok(xi_inv)
}

/// Recover the real Hamiltonian generator: X = Re(B·W·B⁻¹) for the symplectic
/// change of basis B, verifying that exp(uX) reproduces the (real) curve
/// `B·e^{uW}[I;H₀]` at 20 sampled u.  Failure of that verification contradicts
/// the group-orbit theorem and is reported as a consistency error.
pub fn realize_real_generator(g: &OrbitGenerator, basis_map: &CMatrix) -> Result<CMatrix> {
    let n = g.n();
    let j = matcore::symplectic_j(n);
    if basis_map.nrows() != 2 * n || basis_map.ncols() != 2 * n {
        return Err(Error::invalid("realize_real_generator: basis_map shape"));
    }
    let symp = (basis_map.transpose() * &j * basis_map - &j).norm();
    if symp > 1.0e-9 * (1.0 + basis_map.norm() * basis_map.norm()) {
        return Err(Error::invalid(format!(
            "realize_real_generator: basis_map not symplectic (residual {symp:.3e})"
        )));
    }
    let b_inv = -(&j * basis_map.transpose() * &j);
    let x_complex = basis_map * &g.w * &b_inv;
    let x_real = x_complex.map(|z| matcore::re(z.re));

    // verification per Goto's criterion: the real generator must reproduce
    // the curve of subspaces
    let seed = matcore::vstack(&matcore::eye(n), &g.h0);
    let frame0 = basis_map * &seed;
    for k in 0..20 {
        let u = -1.0 + 2.0 * k as f64 / 19.0;
        let target = basis_map * matcore::mat_exp(&g.w.scale(u)) * &seed;
        let moved = matcore::mat_exp(&x_real.scale(u)) * &frame0;
        let gap = matcore::subspace_gap(&target, &moved);
        if gap > 1.0e-6 {
            return Err(Error::Consistency(format!(
                "real generator does not reproduce the orbit at u = {u}: gap {gap:.3e}"
            )));
        }
    }
    Ok(x_real)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{cx, eye, from_real_rows, re, zeros};
    use crate::riccati;
    use rand::rngs::StdRng;
    use rand::{RngExt, SeedableRng};

    fn nilpotent_generator() -> OrbitGenerator {
        // A = [[0,1],[0,0]]: M₀ = [[0,0],[0,1]], H₀ = ½[[0,1],[1,0]]
        let a = from_real_rows(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        OrbitGenerator::from_matrix_a(&a).unwrap()
    }

    #[test]
    fn nilpotent_generator_parts() {
        let g = nilpotent_generator();
        let m0_ref = from_real_rows(2, 2, &[0.0, 0.0, 0.0, 1.0]);
        assert!((&g.m0 - &m0_ref).norm() < 1.0e-12, "m0 = {}", g.m0);
        let h0_ref = from_real_rows(2, 2, &[0.0, 0.5, 0.5, 0.0]);
        assert!((&g.h0 - &h0_ref).norm() < 1.0e-12, "h0 = {}", g.h0);
    }

    #[test]
    fn nilpotent_generator_curve() {
        // H(u) = [[u³/3+u, u²/2],[u²/2, u]] + H₀
        let g = nilpotent_generator();
        for &u in &[-1.0, -0.3, 0.0, 0.4, 1.0] {
            let pt = orbit_point(&g, u);
            let h = pt.h.expect("top block invertible here");
            let poly = from_real_rows(
                2,
                2,
                &[u * u * u / 3.0 + u, u * u / 2.0, u * u / 2.0, u],
            );
            let expect = poly + &g.h0;
            assert!((&h - &expect).norm() < 1.0e-11, "u = {u}: {h} vs {expect}");
        }
    }

    #[test]
    fn hyperbolic_generator_and_curve() {
        // A = diag(1,−1): M₀ = 0, H₀ = A/2, Ḣ = diag(e^{2u}, e^{−2u})
        let a = from_real_rows(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        let g = OrbitGenerator::from_matrix_a(&a).unwrap();
        assert!(g.m0.norm() < 1.0e-12);
        assert!((&g.h0 - a.scale(0.5)).norm() < 1.0e-12);
        let samples: Vec<f64> = (0..21).map(|k| -1.0 + 0.1 * k as f64).collect();
        let rep = verify_orbit(&g, &samples);
        assert!(rep.pass, "report: {rep:?}");
        assert!(rep.max_hdot_err < 1.0e-8);
    }

    #[test]
    fn flat_generator() {
        // a = 0: m0 = I, h0 = 0, H(u) = u·I
        let g = OrbitGenerator::from_matrix_a(&zeros(2, 2)).unwrap();
        assert!((&g.m0 - eye(2)).norm() < 1.0e-13);
        assert!(g.h0.norm() < 1.0e-13);
        let pt = orbit_point(&g, 0.7);
        assert!((pt.h.unwrap() - eye(2).scale(0.7)).norm() < 1.0e-12);
        let rep = verify_orbit(&g, &[-0.5, 0.1, 0.9]);
        assert!(rep.pass);
    }

    #[test]
    fn w_is_hamiltonian() {
        let mut rng = StdRng::seed_from_u64(31);
        for _ in 0..10 {
            let n = 3;
            let raw = CMatrix::from_fn(n, n, |_, _| re(rng.random::<f64>() - 0.5));
            let g = OrbitGenerator::from_matrix_a(&raw).unwrap();
            let j = matcore::symplectic_j(n);
            let resid = (g.w.transpose() * &j + &j * &g.w).norm();
            assert!(resid < 1.0e-10);
        }
    }

    #[test]
    fn orbit_frames_lagrangian() {
        let g = nilpotent_generator();
        let j = matcore::symplectic_j(2);
        for k in 0..15 {
            let u = -1.5 + 0.2 * k as f64;
            let pt = orbit_point(&g, u);
            assert!((pt.frame.transpose() * &j * &pt.frame).norm() < 1.0e-9);
        }
    }

    #[test]
    fn generic_case_m0_vanishes_and_h_matches() {
        // random real s0, ω with generic spectra: m0 = 0 and
        // H(u) = e^{uA}H₀e^{uAᵀ} reproduces orbit_point
        let s0 = from_real_rows(3, 3, &[1.1, 0.2, 0.0, 0.2, -0.7, 0.1, 0.0, 0.1, 0.4]);
        let omega = from_real_rows(3, 3, &[0.0, 0.3, -0.1, -0.3, 0.0, 0.2, 0.1, -0.2, 0.0]);
        assert!(riccati::genericity_check(&s0, &omega).unwrap());
        let g = build_generator(&s0, &omega).unwrap();
        assert!(g.m0.norm() < 1.0e-9, "m0 = {:.3e}", g.m0.norm());
        for &u in &[-0.8, 0.2, 0.9] {
            let pt = orbit_point(&g, u);
            let ea = matcore::mat_exp(&g.a.scale(u));
            let expect = &ea * &g.h0 * ea.transpose();
            assert!((pt.h.unwrap() - expect).norm() < 1.0e-9);
        }
    }

    #[test]
    fn random_real_pair_verifies() {
        let mut rng = StdRng::seed_from_u64(33);
        let n = 3;
        let raw = CMatrix::from_fn(n, n, |_, _| re(rng.random::<f64>() - 0.5));
        let s0 = matcore::symmetrize(&raw);
        let raw2 = CMatrix::from_fn(n, n, |_, _| re(rng.random::<f64>() - 0.5));
        let omega = (raw2.clone() - raw2.transpose()).scale(0.5);
        let g = build_generator(&s0, &omega).unwrap();
        let samples: Vec<f64> = (0..20).map(|k| -1.0 + 0.1 * k as f64 + 0.05).collect();
        let rep = verify_orbit(&g, &samples);
        assert!(rep.pass, "{rep:?}");
    }

    #[test]
    fn real_generator_fixed_point_for_real_data() {
        // real generator data is a fixed point: X_real = W exactly
        let g = nilpotent_generator();
        let b = eye(4);
        let x = realize_real_generator(&g, &b).unwrap();
        assert!((&x - &g.w).norm() < 1.0e-12);
    }

    #[test]
    fn real_generator_positive_energy() {
        // ω=0, p=I (n=2): Σ = ±iI is forced complex; recover the real generator
        let omega = zeros(2, 2);
        let p = eye(2);
        let sigma = riccati::solve_algebraic_sachs(&omega, &p).unwrap();
        assert!(sigma.map(|z| z.im).norm() > 0.5, "Σ should be complex");
        let g = build_generator(&sigma, &omega).unwrap();
        let b = sigma_adapted_basis_map(&sigma, &g.h0).unwrap();
        let x = realize_real_generator(&g, &b).unwrap();
        // the recovered generator is real by construction; check it is
        // Hamiltonian and genuinely reproduces the curve (done inside),
        // and that it is not just the trivial zero matrix
        assert!(x.norm() > 1.0e-3);
        let j = matcore::symplectic_j(2);
        assert!((x.transpose() * &j + &j * &x).norm() < 1.0e-9);
    }

    #[test]
    fn isotropic_intertwiner() {
        // S·[(−2i)e^{2iu}; 1] = [i(e^{2iu}+1); e^{2iu}−1] with
        // S = [[−½, i],[½i, −1]] (n = 1 scalar blocks)
        let s = matcore::block2x2(
            &(eye(1) * re(-0.5)),
            &(eye(1) * cx(0.0, 1.0)),
            &(eye(1) * cx(0.0, 0.5)),
            &(eye(1) * re(-1.0)),
        );
        for &u in &[0.0, 0.3, 1.2] {
            let e2iu = (cx(0.0, 2.0 * u)).exp();
            let mut v = zeros(2, 1);
            v[(0, 0)] = cx(0.0, -2.0) * e2iu;
            v[(1, 0)] = re(1.0);
            let lhs = &s * v;
            let mut rhs = zeros(2, 1);
            rhs[(0, 0)] = cx(0.0, 1.0) * (e2iu + re(1.0));
            rhs[(1, 0)] = e2iu - re(1.0);
            assert!((lhs - rhs).norm() < 1.0e-13, "u = {u}");
        }
    }

    #[test]
    fn with_parts_validates() {
        let a = from_real_rows(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let bad_h0 = eye(2);
        let bad_m0 = zeros(2, 2);
        assert!(OrbitGenerator::with_parts(a, bad_h0, bad_m0).is_err());
    }
}
