//! Constant complex symmetric solutions of the algebraic Sachs equation
//! X² − ωX + Xω + p = 0, via the Hamiltonian matrix Z = [[ω, I], [−p, ω]]
//! and recursive symplectic upper triangularization.

use crate::error::{Error, Result};
use crate::matcore::{self, re, CMatrix, C64};

const FRAME_TOL: f64 = 1.0e-9;

/// A Hamiltonian matrix with respect to the fixed form `J = [[0,−I],[I,0]]`:
/// ZᵀJ + JZ = 0.
#[derive(Debug, Clone)]
pub struct HamiltonianMatrix {
    z: CMatrix,
    n: usize,
}

impl HamiltonianMatrix {
    /// Wrap a general 2n×2n matrix, validating the Hamiltonian identity.
    pub fn from_matrix(z: CMatrix) -> Result<Self> {
        let rows = z.nrows();
        if !z.is_square() || !rows.is_multiple_of(2) || rows == 0 {
            return Err(Error::invalid("HamiltonianMatrix: need a 2n×2n matrix"));
        }
        let n = rows / 2;
        let j = matcore::symplectic_j(n);
        let resid = (z.transpose() * &j + &j * &z).norm();
        if resid > 1.0e-12 * (1.0 + z.norm()) {
            return Err(Error::invalid(format!(
                "HamiltonianMatrix: ZᵀJ + JZ residual {resid:.3e}"
            )));
        }
        Ok(Self { z, n })
    }

    pub fn z(&self) -> &CMatrix {
        &self.z
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn j(&self) -> CMatrix {
        matcore::symplectic_j(self.n)
    }
}

/// Z = [[ω, I], [−p, ω]] for skew ω and symmetric p.
pub fn build_hamiltonian(omega: &CMatrix, p: &CMatrix) -> Result<HamiltonianMatrix> {
    let n = omega.nrows();
    if p.nrows() != n || p.ncols() != n || omega.ncols() != n {
        return Err(Error::invalid("build_hamiltonian: shape mismatch"));
    }
    if !matcore::is_skew(omega, 1.0e-12) {
        return Err(Error::invalid("build_hamiltonian: ω is not skew"));
    }
    if !matcore::is_symmetric(p, 1.0e-12) {
        return Err(Error::invalid("build_hamiltonian: p is not symmetric"));
    }
    let z = matcore::block2x2(omega, &matcore::eye(n), &(-p.clone()), omega);
    HamiltonianMatrix::from_matrix(z)
}

/// A 2n×n frame U spanning a Z-invariant Lagrangian subspace:
/// Z·U = U·Σ (Σ upper triangular), UᵀJU = 0, U*U = I.
#[derive(Debug, Clone)]
pub struct LagrangianFrame {
    pub u: CMatrix,
    pub sigma: CMatrix,
}

impl LagrangianFrame {
    /// Residuals of the three defining identities, for diagnostics/tests.
    pub fn residuals(&self, h: &HamiltonianMatrix) -> (f64, f64, f64) {
        let inv = (h.z() * &self.u - &self.u * &self.sigma).norm();
        let lag = (self.u.transpose() * h.j() * &self.u).norm();
        let orth = (self.u.adjoint() * &self.u - matcore::eye(h.n())).norm();
        (inv, lag, orth)
    }
}

/// Eigenvalue ordering: descending real part, then descending imaginary part.
fn sorted_eigenvalues(z: &CMatrix) -> Result<Vec<C64>> {
    let mut ev = matcore::eigenvalues(z)?;
    ev.sort_by(|a, b| {
        b.re.partial_cmp(&a.re)
            .unwrap()
            .then(b.im.partial_cmp(&a.im).unwrap())
    });
    // collapse numerically repeated eigenvalues so each candidate is tried once
    let mut out: Vec<C64> = Vec::new();
    for lam in ev {
        if !out.iter().any(|m| (m - lam).norm() < 1.0e-10) {
            out.push(lam);
        }
    }
    Ok(out)
}

/// Orthonormal nullspace frame of (z − λI), from the SVD.
fn eigen_nullspace(z: &CMatrix, lam: C64) -> Result<CMatrix> {
    let m = z.nrows();
    let shifted = z - matcore::eye(m) * lam;
    let svd = shifted.clone().svd(true, true);
    let v = svd.v_t.as_ref().unwrap().adjoint();
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cut = (1.0e-8 * (1.0 + smax)).max(1.0e-13);
    let mut null_count = svd
        .singular_values
        .iter()
        .filter(|s| **s < cut)
        .count();
    if null_count == 0 {
        // defective / inaccurate eigenvalue: take the weakest direction anyway
        null_count = 1;
    }
    Ok(v.view((0, m - null_count), (m, null_count)).into_owned())
}

/// Fix the phase so the largest-magnitude component is real positive.
fn fix_phase(v: &CMatrix) -> CMatrix {
    let mut best = (0usize, 0.0f64);
    for i in 0..v.nrows() {
        let a = v[(i, 0)].norm();
        if a > best.1 {
            best = (i, a);
        }
    }
    let z = v[(best.0, 0)];
    if z.norm() == 0.0 {
        return v.clone();
    }
    v * (z.conj() / re(z.norm()))
}

/// The recursive deflation of the symplectic upper triangularization lemma.
/// `phi` embeds the current compressed space into the original C^{2N};
/// `top_rows`, when set, activates the complementary-subspace eigenvector
/// selection (first n components of the embedded eigenvector must not vanish).
fn lagrangian_recursion(
    z: &CMatrix,
    j: &CMatrix,
    phi: &CMatrix,
    top_rows: Option<usize>,
) -> Result<CMatrix> {
    let dim = z.nrows();
    debug_assert!(dim >= 2 && dim.is_multiple_of(2));

    // eigenvector selection
    let mut chosen: Option<CMatrix> = None;
    for lam in sorted_eigenvalues(z)? {
        let nullsp = eigen_nullspace(z, lam)?;
        let v = match top_rows {
            None => fix_phase(&nullsp.view((0, nullsp.ncols() - 1), (dim, 1)).into_owned()),
            Some(nt) => {
                // maximize the original-coordinates top-block content over the
                // eigenspace: top right-singular vector of P·Φ·N
                let top_map = (phi * &nullsp).view((0, 0), (nt, nullsp.ncols())).into_owned();
                let svd = top_map.clone().svd(false, true);
                let vt = svd.v_t.as_ref().unwrap();
                let coef = CMatrix::from_fn(nullsp.ncols(), 1, |i, _| vt[(0, i)].conj());
                let cand = &nullsp * &coef;
                let nrm = cand.norm();
                if nrm < 1.0e-13 {
                    continue;
                }
                let cand = cand.scale(1.0 / nrm);
                let top_norm = (phi * &cand).view((0, 0), (nt, 1)).norm();
                if top_norm <= 1.0e-8 {
                    continue;
                }
                fix_phase(&cand)
            }
        };
        chosen = Some(v);
        break;
    }
    let v = chosen.ok_or_else(|| {
        Error::Degeneracy(
            "no admissible eigenvector with nonvanishing top block (B not invertible?)".into(),
        )
    })?;

    if dim == 2 {
        return Ok(v);
    }

    // deflation: e spans ker(vᵀJ) ⊖ span(v); the v-component of kv is
    // structurally zero (vᵀJv = 0 identically), so the rank decision uses a
    // tolerance well above rounding noise
    let vtj = v.transpose() * j;
    let kv = matcore::kernel_frame(&vtj, 0.0)?; // dim × (dim−1)
    let b = &kv - &v * (v.adjoint() * &kv);
    let maps = matcore::subspace_maps(&b, 1.0e-10)?;
    if maps.rank != dim - 2 {
        return Err(Error::numerical(format!(
            "deflation rank {} ≠ {} (ill-conditioned form pullback)",
            maps.rank,
            dim - 2
        )));
    }
    let e = maps.im;
    let j1 = e.transpose() * j * &e;
    let z1 = e.adjoint() * z * &e;
    let phi1 = phi * &e;
    let u1 = lagrangian_recursion(&z1, &j1, &phi1, top_rows)?;

    // assemble [v | e·u1]
    let mut u = matcore::zeros(dim, dim / 2);
    u.view_mut((0, 0), (dim, 1)).copy_from(&v);
    if dim / 2 > 1 {
        let tail = &e * &u1;
        u.view_mut((0, 1), (dim, dim / 2 - 1)).copy_from(&tail);
    }
    Ok(u)
}

fn finish_frame(h: &HamiltonianMatrix, u: CMatrix) -> Result<LagrangianFrame> {
    let sigma = u.adjoint() * h.z() * &u;
    let frame = LagrangianFrame { u, sigma };
    let (inv, lag, orth) = frame.residuals(h);
    let scale = 1.0 + h.z().norm();
    if inv > FRAME_TOL * scale || lag > FRAME_TOL || orth > FRAME_TOL {
        return Err(Error::numerical(format!(
            "Lagrangian frame residuals too large: inv {inv:.2e}, lag {lag:.2e}, orth {orth:.2e}"
        )));
    }
    Ok(frame)
}

/// An invariant Lagrangian frame of a Hamiltonian matrix (any one).
pub fn invariant_lagrangian_frame(h: &HamiltonianMatrix) -> Result<LagrangianFrame> {
    let u = lagrangian_recursion(h.z(), &h.j(), &matcore::eye(2 * h.n()), None)?;
    finish_frame(h, u)
}

/// An invariant Lagrangian frame complementary to im[0; I] (top block α
/// invertible).  Requires the top-right block of Z to be invertible, which
/// holds for every Z from [`build_hamiltonian`].
pub fn complementary_frame(h: &HamiltonianMatrix) -> Result<LagrangianFrame> {
    let n = h.n();
    let u = lagrangian_recursion(h.z(), &h.j(), &matcore::eye(2 * n), Some(n))?;
    let frame = finish_frame(h, u)?;
    let alpha = matcore::top_block(&frame.u, n);
    let smin = matcore::sigma_min(&alpha);
    if smin <= 1.0e-10 * (1.0 + matcore::sigma_max(&frame.u)) {
        return Err(Error::Degeneracy(format!(
            "complementary_frame: top block singular (σ_min = {smin:.3e})"
        )));
    }
    // γα⁻¹ symmetry is a theorem for symplectic frames with α invertible
    let gamma = matcore::bottom_block(&frame.u, n);
    let x = matcore::solve(&alpha.transpose(), &gamma.transpose())?.transpose();
    if matcore::sym_residual(&x) > 1.0e-8 * (1.0 + x.norm()) {
        return Err(Error::Consistency(format!(
            "γα⁻¹ not symmetric (residual {:.3e})",
            matcore::sym_residual(&x)
        )));
    }
    Ok(frame)
}

/// One constant complex symmetric solution X of X² − ωX + Xω + p = 0,
/// X = γα⁻¹ from the complementary frame.
pub fn solve_algebraic_sachs(omega: &CMatrix, p: &CMatrix) -> Result<CMatrix> {
    let h = build_hamiltonian(omega, p)?;
    let n = h.n();
    let frame = complementary_frame(&h)?;
    let alpha = matcore::top_block(&frame.u, n);
    let gamma = matcore::bottom_block(&frame.u, n);
    let x = matcore::solve(&alpha.transpose(), &gamma.transpose())?.transpose();
    let x = matcore::symmetrize(&x);
    let resid = algebraic_residual(&x, omega, p);
    let scale = 1.0 + p.norm() + omega.norm() * omega.norm();
    if resid > 1.0e-8 * scale {
        return Err(Error::numerical(format!(
            "solve_algebraic_sachs: residual {resid:.3e} (scale {scale:.3e})"
        )));
    }
    Ok(x)
}

/// ‖X² − ωX + Xω + p‖.
pub fn algebraic_residual(x: &CMatrix, omega: &CMatrix, p: &CMatrix) -> f64 {
    (x * x - omega * x + x * omega + p).norm()
}

/// True iff spec(ω−s0) and spec(ω+s0) are disjoint beyond tolerance 1e-8.
pub fn genericity_check(s0: &CMatrix, omega: &CMatrix) -> Result<bool> {
    let minus = omega - s0;
    let plus = omega + s0;
    let ev_m = matcore::eigenvalues(&minus)?;
    let ev_p = matcore::eigenvalues(&plus)?;
    let mut min_dist = f64::INFINITY;
    for a in &ev_m {
        for b in &ev_p {
            min_dist = min_dist.min((a - b).norm());
        }
    }
    Ok(min_dist > 1.0e-8)
}
