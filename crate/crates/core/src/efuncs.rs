//! Evaluation of the entire functions c, s, T, U, E, σ, γ on scalar and
//! matrix arguments, with removable singularities handled exactly.
//!
//! Definitions:  c(z) = Σ(−z)ⁿ/(2n)!,  s(z) = Σ(−z)ⁿ/(2n+1)!,  T = s/c,
//! U = c/s,  zE(z) = e^z − 1,  σ(z) = sinh(z)/z,  z²γ(z) = 2(cosh z − 1).
//! Equivalently c(z) = cos(√z) and z·s(z) = √z·sin(√z); evenness makes every
//! formula independent of the branch of √z.

use crate::error::{Error, Result};
use crate::matcore::{self, re, CMatrix, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntireFn {
    C,
    S,
    T,
    U,
    E,
    Sigma,
    Gamma,
}

/// Denominators below this relative size report a pole.
const POLE_TOL: f64 = 1.0e-13;
/// Switch from power series to closed forms beyond this modulus.
const SERIES_RADIUS: f64 = 1.0;
const MAX_TERMS: usize = 64;

// ── scalar evaluation ───────────────────────────────────────────────

fn series_c(z: C64) -> C64 {
    // Σ (−z)ⁿ/(2n)!
    let mut term = re(1.0);
    let mut sum = term;
    for n in 1..MAX_TERMS {
        let k = 2.0 * n as f64;
        term *= -z / re(k * (k - 1.0));
        sum += term;
        if term.norm() < 1.0e-18 * sum.norm().max(1.0) {
            break;
        }
    }
    sum
}

fn series_s(z: C64) -> C64 {
    // Σ (−z)ⁿ/(2n+1)!
    let mut term = re(1.0);
    let mut sum = term;
    for n in 1..MAX_TERMS {
        let k = 2.0 * n as f64;
        term *= -z / re(k * (k + 1.0));
        sum += term;
        if term.norm() < 1.0e-18 * sum.norm().max(1.0) {
            break;
        }
    }
    sum
}

fn series_e(z: C64) -> C64 {
    // Σ zⁿ/(n+1)!
    let mut term = re(1.0);
    let mut sum = term;
    for n in 1..MAX_TERMS {
        term *= z / re(n as f64 + 1.0);
        sum += term;
        if term.norm() < 1.0e-18 * sum.norm().max(1.0) {
            break;
        }
    }
    sum
}

fn series_sigma(z: C64) -> C64 {
    // σ(z) = s(−z²)
    series_s(-z * z)
}

fn series_gamma(z: C64) -> C64 {
    // Σ 2 z^{2k}/(2k+2)!
    let z2 = z * z;
    let mut term = re(1.0);
    let mut sum = term;
    for k in 1..MAX_TERMS {
        let m = 2.0 * k as f64;
        term *= z2 / re((m + 1.0) * (m + 2.0));
        sum += term;
        if term.norm() < 1.0e-18 * sum.norm().max(1.0) {
            break;
        }
    }
    sum
}

fn scalar_c(z: C64) -> C64 {
    if z.norm() <= SERIES_RADIUS {
        series_c(z)
    } else {
        z.sqrt().cos()
    }
}

fn scalar_s(z: C64) -> C64 {
    if z.norm() <= SERIES_RADIUS {
        series_s(z)
    } else {
        let w = z.sqrt();
        w.sin() / w
    }
}

fn scalar_e(z: C64) -> C64 {
    if z.norm() <= 0.5 {
        series_e(z)
    } else {
        (z.exp() - re(1.0)) / z
    }
}

fn scalar_sigma(z: C64) -> C64 {
    if z.norm() <= 0.5 {
        series_sigma(z)
    } else {
        z.sinh() / z
    }
}

fn scalar_gamma(z: C64) -> C64 {
    if z.norm() <= 0.5 {
        series_gamma(z)
    } else {
        (z.cosh() - re(1.0)) * re(2.0) / (z * z)
    }
}

/// Nearest pole of T (zeros of c: z = ((k+1/2)π)²) to a given point.
fn nearest_t_pole(z: C64) -> f64 {
    let x = z.re.max(0.0).sqrt();
    let k = ((x / std::f64::consts::PI - 0.5).round()).max(0.0);
    let p = (k + 0.5) * std::f64::consts::PI;
    p * p
}

/// Nearest pole of U (zeros of s: z = (kπ)², k ≥ 1).
fn nearest_u_pole(z: C64) -> f64 {
    let x = z.re.max(0.0).sqrt();
    let k = (x / std::f64::consts::PI).round().max(1.0);
    let p = k * std::f64::consts::PI;
    p * p
}

pub fn eval_scalar(f: EntireFn, z: C64) -> Result<C64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::invalid("eval_scalar: non-finite argument"));
    }
    match f {
        EntireFn::C => Ok(scalar_c(z)),
        EntireFn::S => Ok(scalar_s(z)),
        EntireFn::E => Ok(scalar_e(z)),
        EntireFn::Sigma => Ok(scalar_sigma(z)),
        EntireFn::Gamma => Ok(scalar_gamma(z)),
        EntireFn::T => {
            let c = scalar_c(z);
            let s = scalar_s(z);
            if c.norm() < POLE_TOL * s.norm().max(1.0) {
                Err(Error::pole(
                    None,
                    format!(
                        "T(z): c(z) vanishes near z = {:.6e} (pole ≈ {:.6})",
                        z,
                        nearest_t_pole(z)
                    ),
                ))
            } else {
                Ok(s / c)
            }
        }
        EntireFn::U => {
            let c = scalar_c(z);
            let s = scalar_s(z);
            if s.norm() < POLE_TOL * c.norm().max(1.0) {
                Err(Error::pole(
                    None,
                    format!(
                        "U(z): s(z) vanishes near z = {:.6e} (pole ≈ {:.6})",
                        z,
                        nearest_u_pole(z)
                    ),
                ))
            } else {
                Ok(c / s)
            }
        }
    }
}

// ── matrix evaluation: scaled Taylor plus doubling ──────────────────

/// (c(M), s(M)) by scaling M by 4⁻ᵏ, summing the series, and doubling back
/// with c(4z) = 2c² − 1, s(4z) = s·c.
fn cs_pair_matrix(m: &CMatrix) -> (CMatrix, CMatrix) {
    let n = m.nrows();
    let nrm = matcore::frob(m);
    let k = if nrm > 0.25 {
        ((nrm / 0.25).ln() / 4.0f64.ln()).ceil() as i32
    } else {
        0
    };
    let ms = m.scale(0.25f64.powi(k));

    let mut c = matcore::eye(n);
    let mut s = matcore::eye(n);
    let mut term_c = matcore::eye(n);
    let mut term_s = matcore::eye(n);
    for j in 1..MAX_TERMS {
        let kk = 2.0 * j as f64;
        term_c = (&term_c * &ms).scale(-1.0 / (kk * (kk - 1.0)));
        term_s = (&term_s * &ms).scale(-1.0 / (kk * (kk + 1.0)));
        c += &term_c;
        s += &term_s;
        if term_c.norm() + term_s.norm() < 1.0e-18 {
            break;
        }
    }
    for _ in 0..k {
        let s_new = &s * &c;
        let c_new = (&c * &c).scale(2.0) - matcore::eye(n);
        s = s_new;
        c = c_new;
    }
    (c, s)
}

/// (σ(M), cosh(M)) via σ(2z) = σ·cosh, cosh(2z) = 2cosh² − 1.
fn sigma_cosh_pair(m: &CMatrix) -> (CMatrix, CMatrix) {
    let n = m.nrows();
    let nrm = matcore::frob(m);
    let k = if nrm > 0.5 {
        (nrm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let ms = m.scale(0.5f64.powi(k));
    let m2 = &ms * &ms;

    let mut sig = matcore::eye(n);
    let mut ch = matcore::eye(n);
    let mut term_sig = matcore::eye(n);
    let mut term_ch = matcore::eye(n);
    for j in 1..MAX_TERMS {
        let kk = 2.0 * j as f64;
        term_sig = (&term_sig * &m2).scale(1.0 / (kk * (kk + 1.0)));
        term_ch = (&term_ch * &m2).scale(1.0 / (kk * (kk - 1.0)));
        sig += &term_sig;
        ch += &term_ch;
        if term_sig.norm() + term_ch.norm() < 1.0e-18 {
            break;
        }
    }
    for _ in 0..k {
        let sig_new = &sig * &ch;
        let ch_new = (&ch * &ch).scale(2.0) - matcore::eye(n);
        sig = sig_new;
        ch = ch_new;
    }
    (sig, ch)
}

/// (E(M), exp(M)) via E(2z) = E(z)(exp(z)+1)/2, exp(2z) = exp(z)².
fn e_exp_pair(m: &CMatrix) -> (CMatrix, CMatrix) {
    let n = m.nrows();
    let nrm = matcore::frob(m);
    let k = if nrm > 0.5 {
        (nrm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let ms = m.scale(0.5f64.powi(k));

    let mut e = matcore::eye(n);
    let mut term = matcore::eye(n);
    for j in 1..MAX_TERMS {
        term = (&term * &ms).scale(1.0 / (j as f64 + 1.0));
        e += &term;
        if term.norm() < 1.0e-18 {
            break;
        }
    }
    let mut ex = &ms * &e + matcore::eye(n);
    for _ in 0..k {
        let e_new = (&e * (&ex + matcore::eye(n))).scale(0.5);
        let ex_new = &ex * &ex;
        e = e_new;
        ex = ex_new;
    }
    (e, ex)
}

pub fn eval_matrix(f: EntireFn, m: &CMatrix) -> Result<CMatrix> {
    if !m.is_square() {
        return Err(Error::invalid("eval_matrix: square matrix required"));
    }
    if !matcore::all_finite(m) {
        return Err(Error::invalid("eval_matrix: non-finite entries"));
    }
    match f {
        EntireFn::C => Ok(cs_pair_matrix(m).0),
        EntireFn::S => Ok(cs_pair_matrix(m).1),
        EntireFn::Sigma => Ok(sigma_cosh_pair(m).0),
        EntireFn::Gamma => {
            let half = m.scale(0.5);
            let (sig, _) = sigma_cosh_pair(&half);
            Ok(&sig * &sig)
        }
        EntireFn::E => Ok(e_exp_pair(m).0),
        EntireFn::T => {
            let (c, s) = cs_pair_matrix(m);
            let smin = matcore::sigma_min(&c);
            if smin < POLE_TOL * (1.0 + matcore::sigma_max(&s)) {
                return Err(pole_from_spectrum(m, EntireFn::T));
            }
            matcore::solve(&c, &s)
        }
        EntireFn::U => {
            let (c, s) = cs_pair_matrix(m);
            let smin = matcore::sigma_min(&s);
            if smin < POLE_TOL * (1.0 + matcore::sigma_max(&c)) {
                return Err(pole_from_spectrum(m, EntireFn::U));
            }
            matcore::solve(&s, &c)
        }
    }
}

fn pole_from_spectrum(m: &CMatrix, f: EntireFn) -> Error {
    let detail = match matcore::eigenvalues(m) {
        Ok(ev) => {
            let mut worst = (f64::INFINITY, re(0.0), 0.0);
            for lam in ev {
                let p = match f {
                    EntireFn::T => nearest_t_pole(lam),
                    _ => nearest_u_pole(lam),
                };
                let d = (lam - re(p)).norm();
                if d < worst.0 {
                    worst = (d, lam, p);
                }
            }
            format!(
                "matrix argument has eigenvalue {:.6e} at/near pole {:.6}",
                worst.1, worst.2
            )
        }
        Err(_) => "matrix argument has spectrum at/near a pole".to_string(),
    };
    Error::pole(None, detail)
}

// ── power-series coefficients ───────────────────────────────────────

/// Taylor coefficients of c(z): (−1)ⁿ/(2n)!.
pub fn c_coeffs(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut v = 1.0;
    out.push(v);
    for k in 1..=n {
        let m = 2.0 * k as f64;
        v *= -1.0 / (m * (m - 1.0));
        out.push(v);
    }
    out
}

/// Taylor coefficients of s(z): (−1)ⁿ/(2n+1)!.
pub fn s_coeffs(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut v = 1.0;
    out.push(v);
    for k in 1..=n {
        let m = 2.0 * k as f64;
        v *= -1.0 / (m * (m + 1.0));
        out.push(v);
    }
    out
}

/// Power-series division num/den (den[0] ≠ 0).
fn series_div(num: &[f64], den: &[f64]) -> Vec<f64> {
    let n = num.len();
    let mut q = vec![0.0; n];
    for k in 0..n {
        let mut acc = num[k];
        for j in 0..k {
            acc -= q[j] * den[k - j];
        }
        q[k] = acc / den[0];
    }
    q
}

/// Taylor coefficients of T(z) = s(z)/c(z): 1, 1/3, 2/15, 17/315, ...
pub fn t_coeffs(n: usize) -> Vec<f64> {
    series_div(&s_coeffs(n), &c_coeffs(n))
}

/// Taylor coefficients of U(z) = c(z)/s(z): 1, −1/3, −1/45, −2/945, ...
pub fn u_coeffs(n: usize) -> Vec<f64> {
    series_div(&c_coeffs(n), &s_coeffs(n))
}
