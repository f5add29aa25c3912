//! Bernoulli-like Taylor recursion for the canonical blowing-up solution of
//! the general Sachs equation Ṡ + S² + p(u) = 0:
//!
//!   S(u) = (u−t)⁻¹ I − Σₙ (u−t)ⁿ Sₙ / n!,
//!   S_{n+1} = (n+1)/(n+3) · (pₙ + Σₘ C(n,m) Sₘ S_{n−m}),
//!
//! where pₙ are the derivatives of p at the base point t.  For constant
//! scalar p the coefficients reproduce the cotangent/Bernoulli pattern.

use crate::error::{Error, Result};
use crate::matcore::{self, CMatrix};

/// Factorial growth makes double-precision coefficients useless beyond this.
pub const MAX_ORDER: usize = 30;

#[derive(Debug, Clone)]
pub struct SachsJet {
    /// Base point t of the expansion.
    pub base: f64,
    /// S₀ … S_N (S₀ = 0).
    pub coeffs: Vec<CMatrix>,
    /// p₀ … (derivatives of p at t; shorter lists are zero-padded).
    pub p_jets: Vec<CMatrix>,
}

/// Run the recursion up to order N (clamped to [`MAX_ORDER`]).
pub fn recursion_coeffs(base: f64, p_jets: &[CMatrix], order: usize) -> Result<SachsJet> {
    if p_jets.is_empty() {
        return Err(Error::invalid("recursion_coeffs: need at least p₀"));
    }
    let n = p_jets[0].nrows();
    for (k, p) in p_jets.iter().enumerate() {
        if p.nrows() != n || p.ncols() != n {
            return Err(Error::invalid("recursion_coeffs: jet shape mismatch"));
        }
        if !matcore::is_symmetric(p, 1.0e-12) {
            return Err(Error::invalid(format!(
                "recursion_coeffs: p_jets[{k}] is not symmetric"
            )));
        }
    }
    let order = order.min(MAX_ORDER);

    // binomial table
    let mut binom = vec![vec![0.0f64; order + 1]; order + 1];
    for i in 0..=order {
        binom[i][0] = 1.0;
        for j in 1..=i {
            binom[i][j] = binom[i - 1][j - 1] + if j < i { binom[i - 1][j] } else { 0.0 };
        }
    }

    let p_at = |k: usize| -> CMatrix {
        p_jets
            .get(k)
            .cloned()
            .unwrap_or_else(|| matcore::zeros(n, n))
    };

    let mut coeffs: Vec<CMatrix> = Vec::with_capacity(order + 1);
    coeffs.push(matcore::zeros(n, n)); // S₀ = 0
    for m in 0..order {
        // S_{m+1} = (m+1)/(m+3) (pₘ + Σ C(m,k) Sₖ S_{m−k})
        let mut acc = p_at(m);
        for k in 0..=m {
            acc += (&coeffs[k] * &coeffs[m - k]).scale(binom[m][k]);
        }
        let s_next = acc.scale((m as f64 + 1.0) / (m as f64 + 3.0));
        coeffs.push(matcore::symmetrize(&s_next));
    }

    Ok(SachsJet {
        base,
        coeffs,
        p_jets: p_jets.to_vec(),
    })
}

/// Evaluate the truncated series (u−t)⁻¹I − Σ (u−t)ⁿ Sₙ/n! at u ≠ t.
pub fn eval_truncated(jet: &SachsJet, u: f64) -> Result<CMatrix> {
    let d = u - jet.base;
    if d.abs() < 1.0e-300 {
        return Err(Error::pole(Some(jet.base), "eval_truncated at the base point"));
    }
    let n = jet.coeffs[0].nrows();
    let mut out = matcore::eye(n).scale(1.0 / d);
    let mut pow = 1.0; // (u−t)ⁿ/n!
    for (k, s) in jet.coeffs.iter().enumerate() {
        if k > 0 {
            pow *= d / k as f64;
        }
        out -= s.scale(pow);
    }
    Ok(out)
}
