//! Closed-form solutions of the Sachs matrix Riccati ODE on microcosms:
//! the ω = 0 initial value problem, the general-ω initial value problem, and
//! the constant-p canonical pair (S_t⁰, S_t^∞) with their L factors.

use crate::efuncs::{self, EntireFn};
use crate::error::{Error, Result};
use crate::matcore::{self, CMatrix};

/// Condition number of an inverted factor beyond which the evaluation point
/// is reported as a pole (conjugate-type blow-up) instead of returning noise.
const POLE_COND: f64 = 1.0e12;

/// Initial value problem data for the general microcosm Sachs equation
/// Ṡ + S² + e^{−ωu} p e^{ωu} = 0, together with a constant solution Σ of
/// Σ² + [Σ, ω] + p = 0.
#[derive(Debug, Clone)]
pub struct SachsIVP {
    pub omega: CMatrix,
    pub p: CMatrix,
    pub sigma: CMatrix,
    pub s0: CMatrix,
}

impl SachsIVP {
    pub fn new(omega: CMatrix, p: CMatrix, sigma: CMatrix, s0: CMatrix) -> Result<Self> {
        let n = omega.nrows();
        if p.nrows() != n || sigma.nrows() != n || s0.nrows() != n {
            return Err(Error::invalid("SachsIVP: dimension mismatch"));
        }
        if !matcore::is_skew(&omega, 1.0e-10) {
            return Err(Error::invalid("SachsIVP: ω must be skew"));
        }
        for (name, m) in [("p", &p), ("sigma", &sigma), ("s0", &s0)] {
            if !matcore::is_symmetric(m, 1.0e-8) {
                return Err(Error::invalid(format!("SachsIVP: {name} must be symmetric")));
            }
        }
        let resid = (&sigma * &sigma + &sigma * &omega - &omega * &sigma + &p).norm();
        let scale = 1.0 + p.norm() + sigma.norm() * sigma.norm();
        if resid > 1.0e-8 * scale {
            return Err(Error::invalid(format!(
                "SachsIVP: Σ² + [Σ,ω] + p residual {resid:.3e}"
            )));
        }
        Ok(Self {
            omega,
            p,
            sigma,
            s0,
        })
    }

    /// Tidal matrix of the Brinkmann-form equation, e^{−ωu} p e^{ωu}.
    pub fn tidal_at(&self, u: f64) -> CMatrix {
        let em = matcore::mat_exp(&self.omega.scale(-u));
        let ep = matcore::mat_exp(&self.omega.scale(u));
        em * &self.p * ep
    }
}

/// The canonical pair for constant p: returns
/// (S_t⁰(u), S_t^∞(u), L_t⁰(u), L_t^∞(u)) where
/// S_t⁰ = p(t−u)·T(p(t−u)²), (u−t)·S_t^∞ = U(p(t−u)²),
/// L_t⁰ = c(p(t−u)²), L_t^∞ = (t−u)·s(p(t−u)²).
pub fn constant_p_pair(
    p: &CMatrix,
    t: f64,
    u: f64,
) -> Result<(CMatrix, CMatrix, CMatrix, CMatrix)> {
    if !matcore::is_symmetric(p, 1.0e-10) {
        return Err(Error::invalid("constant_p_pair: p must be symmetric"));
    }
    let d = t - u;
    let arg = p.scale(d * d);
    let t_val = efuncs::eval_matrix(EntireFn::T, &arg).map_err(|e| tag_pole(e, u))?;
    let u_val = efuncs::eval_matrix(EntireFn::U, &arg).map_err(|e| tag_pole(e, u))?;
    let c_val = efuncs::eval_matrix(EntireFn::C, &arg)?;
    let s_val = efuncs::eval_matrix(EntireFn::S, &arg)?;

    let s0 = p.scale(d) * t_val;
    if (u - t).abs() < 1.0e-14 {
        return Err(Error::pole(
            Some(u),
            "S_t^∞ blows up at the base point u = t",
        ));
    }
    let s_inf = u_val.scale(1.0 / (u - t));
    let l0 = c_val;
    let l_inf = s_val.scale(d);
    Ok((s0, s_inf, l0, l_inf))
}

fn tag_pole(e: Error, u: f64) -> Error {
    match e {
        Error::Pole { detail, .. } => Error::pole(Some(u), detail),
        other => other,
    }
}

/// Solution of Ṡ + S² + p = 0 (ω = 0, p = −Σ²) with S(0) = s0:
/// S = Σ + e^{−uΣ}(S₀−Σ)e^{−uΣ}[I + uE(2uΣ)e^{−uΣ}(S₀−Σ)e^{−uΣ}]⁻¹.
pub fn ivp_omega0(sigma: &CMatrix, s0: &CMatrix, u: f64) -> Result<CMatrix> {
    let n = sigma.nrows();
    for (name, m) in [("sigma", sigma), ("s0", s0)] {
        if !matcore::is_symmetric(m, 1.0e-8) {
            return Err(Error::invalid(format!("ivp_omega0: {name} must be symmetric")));
        }
    }
    let em = matcore::mat_exp(&sigma.scale(-u));
    let d = &em * (s0 - sigma) * &em;
    let e_big = efuncs::eval_matrix(EntireFn::E, &sigma.scale(2.0 * u))?;
    let bracket = matcore::eye(n) + e_big.scale(u) * &d;
    if matcore::cond2(&bracket) > POLE_COND {
        return Err(Error::pole(
            Some(u),
            "ivp_omega0: bracket singular (conjugate-point blow-up)",
        ));
    }
    let s = sigma + &d * matcore::inverse(&bracket)?;
    Ok(matcore::symmetrize(&s))
}

/// 15-point Gauss–Legendre nodes/weights on [-1, 1] (positive half; mirrored).
const GL15_X: [f64; 8] = [
    0.0,
    0.201_194_093_997_434_5,
    0.394_151_347_077_563_4,
    0.570_972_172_608_538_8,
    0.724_417_731_360_170,
    0.848_206_583_410_427_2,
    0.937_273_392_400_706,
    0.987_992_518_020_485_4,
];
const GL15_W: [f64; 8] = [
    0.202_578_241_925_561_27,
    0.198_431_485_327_111_6,
    0.186_161_000_015_562_1,
    0.166_269_205_816_993_9,
    0.139_570_677_926_154_3,
    0.107_159_220_467_171_9,
    0.070_366_047_488_108_1,
    0.030_753_241_996_117_3,
];

fn gl15<F: Fn(f64) -> CMatrix>(f: &F, a: f64, b: f64) -> CMatrix {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = f(mid).scale(GL15_W[0]);
    for k in 1..8 {
        let dx = half * GL15_X[k];
        acc += (f(mid + dx) + f(mid - dx)).scale(GL15_W[k]);
    }
    acc.scale(half)
}

/// Adaptive Gauss–Legendre with deterministic bisection refinement.
fn adaptive_quad<F: Fn(f64) -> CMatrix>(f: &F, a: f64, b: f64, tol: f64, depth: usize) -> CMatrix {
    let whole = gl15(f, a, b);
    let mid = 0.5 * (a + b);
    let split = gl15(f, a, mid) + gl15(f, mid, b);
    if (&whole - &split).norm() <= tol * (1.0 + split.norm()) || depth >= 28 {
        split
    } else {
        adaptive_quad(f, a, mid, tol, depth + 1) + adaptive_quad(f, mid, b, tol, depth + 1)
    }
}

/// Solution of the general microcosm Sachs IVP at parameter u
/// (Ṡ + S² + e^{−ωu}pe^{ωu} = 0, S(0) = S₀):
/// S(u) = e^{−ωu}Σe^{ωu} + e^{−ωu}e^{(−Σ+ω)u} F(u)⁻¹ (S₀−Σ) e^{(−Σ−ω)u} e^{ωu},
/// Ḟ = (S₀−Σ)e^{(−Σ−ω)t}e^{(−Σ+ω)t}, F(0) = I.
pub fn ivp_general(ivp: &SachsIVP, u: f64) -> Result<CMatrix> {
    let n = ivp.omega.nrows();
    let diff = &ivp.s0 - &ivp.sigma;
    let a_minus = -(&ivp.sigma + &ivp.omega); // −Σ−ω
    let a_plus = &ivp.omega - &ivp.sigma; // −Σ+ω

    let integrand = {
        let diff = diff.clone();
        let a_minus = a_minus.clone();
        let a_plus = a_plus.clone();
        move |t: f64| -> CMatrix {
            &diff * matcore::mat_exp(&a_minus.scale(t)) * matcore::mat_exp(&a_plus.scale(t))
        }
    };
    let f_mat = if u == 0.0 {
        matcore::eye(n)
    } else {
        let (lo, hi) = if u > 0.0 { (0.0, u) } else { (u, 0.0) };
        let integral = adaptive_quad(&integrand, lo, hi, 1.0e-12, 0);
        let signed = if u > 0.0 { integral } else { -integral };
        matcore::eye(n) + signed
    };
    if matcore::cond2(&f_mat) > POLE_COND {
        return Err(Error::pole(
            Some(u),
            "ivp_general: F(u) singular (conjugate-type blow-up)",
        ));
    }

    let em_omega = matcore::mat_exp(&ivp.omega.scale(-u));
    let ep_omega = matcore::mat_exp(&ivp.omega.scale(u));
    let e_plus = matcore::mat_exp(&a_plus.scale(u));
    let e_minus = matcore::mat_exp(&a_minus.scale(u));

    let core = &e_plus * matcore::inverse(&f_mat)? * &diff * &e_minus;
    let s = &em_omega * &ivp.sigma * &ep_omega + &em_omega * core * &ep_omega;
    Ok(matcore::symmetrize(&s))
}
