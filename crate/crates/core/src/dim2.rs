//! Complete analytic treatment for n = 2: all constant Sachs solutions,
//! reality classification, split-quaternion orbit coefficients, and
//! conjugate-point location/existence.
//!
//! Conventions: `ω = [[0,−w],[w,0]]`, `p = [[A+B, C],[C, A−B]]`,
//! S = [[s+u₀, t],[t, s−u₀]] (the offset in S named u₀ to keep u for the affine parameter), and the
//! constant Sachs system
//!   B + 2su₀ + 2wt = 0,  C + 2st − 2wu₀ = 0,  A + s² + w² + t² + u₀² = 0.

use crate::efuncs::{self, EntireFn};
use crate::error::{Error, Result};
use crate::matcore::{self, cx, re, CMatrix, C64};
use crate::oracle;

#[derive(Debug, Clone, Copy)]
pub struct Dim2Params {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub w: f64,
}

impl Dim2Params {
    pub fn new(a: f64, b: f64, c: f64, w: f64) -> Self {
        Self { a, b, c, w }
    }

    /// |p| = A² − B² − C².
    pub fn det_p(&self) -> f64 {
        self.a * self.a - self.b * self.b - self.c * self.c
    }

    /// F = 4w⁴ + 4Aw² + B² + C².
    pub fn f_scalar(&self) -> f64 {
        4.0 * self.w.powi(4) + 4.0 * self.a * self.w * self.w + self.b * self.b + self.c * self.c
    }

    /// P − ω² = A + w² (positive energy density iff positive).
    pub fn energy_scalar(&self) -> f64 {
        self.a + self.w * self.w
    }

    pub fn conformally_trivial(&self) -> bool {
        self.b == 0.0 && self.c == 0.0
    }

    pub fn p_matrix(&self) -> CMatrix {
        matcore::from_real_rows(
            2,
            2,
            &[self.a + self.b, self.c, self.c, self.a - self.b],
        )
    }

    pub fn omega_matrix(&self) -> CMatrix {
        matcore::from_real_rows(2, 2, &[0.0, -self.w, self.w, 0.0])
    }

    /// Eigenvalues of p: A ± √(B²+C²).
    pub fn p_eigenvalues(&self) -> (f64, f64) {
        let r = (self.b * self.b + self.c * self.c).sqrt();
        (self.a + r, self.a - r)
    }
}

/// One constant solution triple (s, t, u₀) with z = s² + w².
#[derive(Debug, Clone, Copy)]
pub struct Dim2Solution {
    pub s: C64,
    pub t: C64,
    pub u0: C64,
    pub z: C64,
}

impl Dim2Solution {
    /// Residuals of the three defining equations.
    pub fn eq_residual(&self, p: &Dim2Params) -> f64 {
        let w = re(p.w);
        let e1 = re(p.b) + re(2.0) * self.s * self.u0 + re(2.0) * w * self.t;
        let e2 = re(p.c) + re(2.0) * self.s * self.t - re(2.0) * w * self.u0;
        let e3 = re(p.a) + self.s * self.s + w * w + self.t * self.t + self.u0 * self.u0;
        e1.norm().max(e2.norm()).max(e3.norm())
    }

    /// The assembled matrix S = [[s+u₀, t],[t, s−u₀]].
    pub fn s_matrix(&self) -> CMatrix {
        let mut m = matcore::zeros(2, 2);
        m[(0, 0)] = self.s + self.u0;
        m[(0, 1)] = self.t;
        m[(1, 0)] = self.t;
        m[(1, 1)] = self.s - self.u0;
        m
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.s.im.abs() <= tol && self.t.im.abs() <= tol && self.u0.im.abs() <= tol
    }
}

/// Descriptor for the infinite families of the conformally trivial case.
#[derive(Debug, Clone, PartialEq)]
pub enum SolutionFamily {
    /// w = 0, B = C = 0: s = 0 and any (t, u₀) with t² + u₀² = −A
    /// (together with the isolated solutions (±√(−A), 0, 0)).
    CircleTU { minus_a: f64 },
    /// A = 0, w ≠ 0, B = C = 0: s = ±iw with t = ∓i·u₀, u₀ free.
    NullLine { w: f64 },
}

#[derive(Debug, Clone)]
pub struct Dim2Solutions {
    pub isolated: Vec<Dim2Solution>,
    pub family: Option<SolutionFamily>,
}

fn solution_from_s(p: &Dim2Params, s: C64) -> Option<Dim2Solution> {
    let z = s * s + re(p.w * p.w);
    if z.norm() < 1.0e-14 {
        return None;
    }
    let t = -(re(p.b * p.w) + re(p.c) * s) / (re(2.0) * z);
    let u0 = (re(-p.b) * s + re(p.c * p.w)) / (re(2.0) * z);
    Some(Dim2Solution { s, t, u0, z })
}

/// All constant solutions of the n = 2 Sachs system.  For (B,C) ≠ (0,0) the
/// quartic 4s⁴ + 4(A+2w²)s² + (B²+C²+4Aw²+4w⁴) = 0 (discriminant 16|p|) gives
/// between one and four isolated solutions; the conformally trivial case has
/// the distinguished pair (±√(−(A+w²)), 0, 0) plus infinite families unless
/// both A and w are nonzero.
pub fn constant_solutions_2x2(params: &Dim2Params) -> Dim2Solutions {
    let (a, b, c, w) = (params.a, params.b, params.c, params.w);
    if params.conformally_trivial() {
        // distinguished: t = u₀ = 0, s² = −(A+w²)
        let s2 = cx(-(a + w * w), 0.0);
        let s_pos = s2.sqrt();
        let mut isolated = vec![];
        for s in [s_pos, -s_pos] {
            let sol = Dim2Solution {
                s,
                t: re(0.0),
                u0: re(0.0),
                z: s * s + re(w * w),
            };
            isolated.push(sol);
            if s.norm() == 0.0 {
                break; // s = 0 once
            }
        }
        let family = if a != 0.0 && w != 0.0 {
            None
        } else if w == 0.0 {
            Some(SolutionFamily::CircleTU { minus_a: -a })
        } else {
            Some(SolutionFamily::NullLine { w })
        };
        return Dim2Solutions { isolated, family };
    }

    // quadratic in x = s²: 4x² + 4(A+2w²)x + (B²+C²+4Aw²+4w⁴) = 0
    let half_b = a + 2.0 * w * w;
    let c0 = b * b + c * c + 4.0 * a * w * w + 4.0 * w.powi(4);
    let disc = cx(half_b * half_b - c0, 0.0); // = |p|
    let sq = disc.sqrt();
    let x_roots = [(-re(half_b) + sq) * re(0.5), (-re(half_b) - sq) * re(0.5)];

    let mut isolated: Vec<Dim2Solution> = Vec::new();
    for x in x_roots {
        let s_val = x.sqrt();
        for s in [s_val, -s_val] {
            if let Some(sol) = solution_from_s(params, s) {
                if sol.eq_residual(params) < 1.0e-8 * (1.0 + a.abs() + b.abs() + c.abs())
                    && !isolated
                        .iter()
                        .any(|o| (o.s - sol.s).norm() < 1.0e-10)
                {
                    isolated.push(sol);
                }
            }
        }
    }
    Dim2Solutions {
        isolated,
        family: None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RealityClass {
    AllReal,
    AllNonReal,
    Mixed,
}

#[derive(Debug, Clone)]
pub struct RealityReport {
    pub class: RealityClass,
    pub det_p: f64,
    pub f_scalar: f64,
    /// The printed criterion "all non-real ⟺ |p| < 0" agrees with the roots.
    pub nonreal_criterion_agrees: bool,
    /// The printed criterion "all real ⟺ |p| ≥ 0, F ≥ 0, A+2w² ≤ −√|p|"
    /// agrees with the roots.
    pub allreal_criterion_agrees: bool,
}

/// Classify the reality of the constant solutions for (B,C) ≠ (0,0), from the
/// explicitly computed roots; the classical inequality criteria are evaluated
/// alongside and flagged when they disagree.
pub fn reality_classify(params: &Dim2Params) -> Result<RealityReport> {
    if params.conformally_trivial() {
        return Err(Error::invalid(
            "reality_classify: conformally trivial case has its own theorem",
        ));
    }
    let sols = constant_solutions_2x2(params);
    let tol = 1.0e-9;
    let n_real = sols.isolated.iter().filter(|s| s.is_real(tol)).count();
    let class = if n_real == sols.isolated.len() {
        RealityClass::AllReal
    } else if n_real == 0 {
        RealityClass::AllNonReal
    } else {
        RealityClass::Mixed
    };
    let det_p = params.det_p();
    let f_scalar = params.f_scalar();
    let nonreal_pred = det_p < 0.0;
    let allreal_pred =
        det_p >= 0.0 && f_scalar >= 0.0 && params.a + 2.0 * params.w * params.w <= -det_p.max(0.0).sqrt();
    Ok(RealityReport {
        class,
        det_p,
        f_scalar,
        nonreal_criterion_agrees: nonreal_pred == (class == RealityClass::AllNonReal),
        allreal_criterion_agrees: allreal_pred == (class == RealityClass::AllReal),
    })
}

/// Roots (x, y) of z² + Pz + ¼(B²+C²) = 0 with P = A: these are Σ∘² and
/// s² − ω² for any constant solution, and (x−y)² = |p|.
pub fn quadratic_roots_xy(params: &Dim2Params) -> (C64, C64) {
    let disc = cx(params.det_p(), 0.0).sqrt();
    let x = (-re(params.a) + disc) * re(0.5);
    let y = (-re(params.a) - disc) * re(0.5);
    (x, y)
}

// ── split quaternions ───────────────────────────────────────────────

/// A split quaternion a + bJ + cK + dJK with J² = −1, K² = 1, JK = −KJ,
/// realized by `J = [[0,−1],[1,0]]`, `K = [[1,0],[0,−1]]`, `JK = [[0,1],[1,0]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitQuaternion {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
}

impl SplitQuaternion {
    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Self { a, b, c, d }
    }

    pub fn zero() -> Self {
        Self::new(re(0.0), re(0.0), re(0.0), re(0.0))
    }

    pub fn mul(&self, o: &SplitQuaternion) -> SplitQuaternion {
        SplitQuaternion {
            a: self.a * o.a - self.b * o.b + self.c * o.c + self.d * o.d,
            b: self.a * o.b + self.b * o.a - self.c * o.d + self.d * o.c,
            c: self.a * o.c + self.c * o.a - self.b * o.d + self.d * o.b,
            d: self.a * o.d + self.d * o.a + self.b * o.c - self.c * o.b,
        }
    }

    pub fn is_trace_free(&self, tol: f64) -> bool {
        self.a.norm() <= tol
    }

    /// For trace-free X, X² = (−b² + c² + d²)·1 is central.
    pub fn square_scalar(&self) -> C64 {
        -self.b * self.b + self.c * self.c + self.d * self.d
    }

    pub fn to_matrix(&self) -> CMatrix {
        let mut m = matcore::zeros(2, 2);
        m[(0, 0)] = self.a + self.c;
        m[(0, 1)] = -self.b + self.d;
        m[(1, 0)] = self.b + self.d;
        m[(1, 1)] = self.a - self.c;
        m
    }

    pub fn from_matrix(m: &CMatrix) -> Self {
        let a = (m[(0, 0)] + m[(1, 1)]) * re(0.5);
        let c = (m[(0, 0)] - m[(1, 1)]) * re(0.5);
        let b = (m[(1, 0)] - m[(0, 1)]) * re(0.5);
        let d = (m[(1, 0)] + m[(0, 1)]) * re(0.5);
        Self { a, b, c, d }
    }

    /// Σ = Σ∘ + ω for a constant solution: w·J + u₀·K + t·JK.
    pub fn from_solution(sol: &Dim2Solution, w: f64) -> Self {
        Self::new(re(0.0), re(w), sol.u0, sol.t)
    }
}

// ── symplectic group orbit coefficients ─────────────────────────────

/// The three entire coefficients of `H = e^{−2su}(A + B·ΣJΣJ + C·[Σ,J]J)`
/// with H(0) = 0, expressed through divided differences of I(μ) = uE(uμ):
/// `A = e^{2su}(I(m) + (I(μ₊)+I(μ₋))/2)/2`, `B = 2e^{2su}·I[μ₊, m, μ₋]`,
/// `C = e^{2su}·I[μ₊, μ₋]`, where μ± = ±2Σ̂ − 2s, m = −2s, Σ̂² = Σ².
pub fn orbit_coeffs_2x2(s: C64, sigma: &SplitQuaternion, u: f64) -> Result<(C64, C64, C64)> {
    if !sigma.is_trace_free(1.0e-12) {
        return Err(Error::invalid("orbit_coeffs_2x2: Σ must be trace-free"));
    }
    let sigma2 = sigma.square_scalar();
    let sig_hat = sigma2.sqrt();
    let mu_p = re(2.0) * (sig_hat - s);
    let mu_m = re(-2.0) * (sig_hat + s);
    let mid = re(-2.0) * s;

    // divided-difference tableau via the bidiagonal functional calculus
    let mut m3 = matcore::zeros(3, 3);
    m3[(0, 0)] = mu_p;
    m3[(1, 1)] = mid;
    m3[(2, 2)] = mu_m;
    m3[(0, 1)] = re(1.0);
    m3[(1, 2)] = re(1.0);
    let f3 = efuncs::eval_matrix(EntireFn::E, &m3.scale(u))?.scale(u);

    let mut m2 = matcore::zeros(2, 2);
    m2[(0, 0)] = mu_p;
    m2[(1, 1)] = mu_m;
    m2[(0, 1)] = re(1.0);
    let f2 = efuncs::eval_matrix(EntireFn::E, &m2.scale(u))?.scale(u);

    let p_mid = f3[(1, 1)];
    let q_avg = (f3[(0, 0)] + f3[(2, 2)]) * re(0.5);
    let phase = (re(2.0) * s * re(u)).exp();
    let coef_a = phase * (p_mid + q_avg) * re(0.5);
    let coef_b = phase * f3[(0, 2)] * re(2.0);
    let coef_c = phase * f2[(0, 1)];
    Ok((coef_a, coef_b, coef_c))
}

impl SplitQuaternion {
    fn scaled(&self, z: C64) -> SplitQuaternion {
        SplitQuaternion::new(self.a * z, self.b * z, self.c * z, self.d * z)
    }

    fn plus(&self, o: &SplitQuaternion) -> SplitQuaternion {
        SplitQuaternion::new(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)
    }
}

/// Assemble `H(u) = e^{−2su}(A + B·ΣJΣJ + C·[Σ,J]J)`; H(0) = 0 and H symmetric.
pub fn orbit_curve_2x2(s: C64, sigma: &SplitQuaternion, u: f64) -> Result<CMatrix> {
    let (ca, cb, cc) = orbit_coeffs_2x2(s, sigma, u)?;
    let j = SplitQuaternion::new(re(0.0), re(1.0), re(0.0), re(0.0));
    let k1 = sigma.mul(&j).mul(sigma).mul(&j); // ΣJΣJ
    let jsj = j.mul(sigma).mul(&j);
    let k2 = sigma.scaled(re(-1.0)).plus(&jsj.scaled(re(-1.0))); // [Σ,J]J = −Σ − JΣJ
    let phase = (re(-2.0) * s * re(u)).exp();
    let one = SplitQuaternion::new(re(1.0), re(0.0), re(0.0), re(0.0));
    let h = one
        .scaled(ca)
        .plus(&k1.scaled(cb))
        .plus(&k2.scaled(cc))
        .scaled(phase);
    Ok(h.to_matrix())
}

// ── conjugate points ────────────────────────────────────────────────

/// The exactly-divided conjugacy function
/// φ(u) = [(s²−ω²)γ(2su) − (Σ²−ω²)γ(2uΣ)] / (s² − Σ²),
/// evaluated as the divided difference of F(ζ) = (ζ−ω²)γ(2u√ζ) at (s², Σ²)
/// through the bidiagonal functional calculus (the coincident case lands on
/// the exact derivative automatically).  φ(0) = 1.
pub fn conjugate_condition(s: C64, sigma2: C64, omega2: C64, u: f64) -> C64 {
    let mut m = matcore::zeros(2, 2);
    m[(0, 0)] = s * s;
    m[(1, 1)] = sigma2;
    m[(0, 1)] = re(1.0);
    // γ(2u√ζ) = σ²(u√ζ) = s(−u²ζ)² as an entire function of ζ
    let arg = m.scale(-u * u);
    let s_mat = efuncs::eval_matrix(EntireFn::S, &arg).expect("entire function");
    let gamma_mat = &s_mat * &s_mat;
    let f_mat = (&m - matcore::eye(2) * omega2) * gamma_mat;
    f_mat[(0, 1)]
}

/// Fast scalar path for the root scan: g(z) = z·σ²(u√(z+ω²)),
/// φ(u) = (g(x) − g(y))/(x − y), real for real u by conjugate symmetry.
fn phi_fast(x: C64, y: C64, omega2: C64, u: f64) -> C64 {
    let g = |z: C64| -> C64 {
        let psi = (z + omega2).sqrt();
        let sig = efuncs::eval_scalar(EntireFn::Sigma, psi * re(u)).expect("entire");
        z * sig * sig
    };
    if (x - y).norm() > 1.0e-6 * (1.0 + x.norm() + y.norm()) {
        (g(x) - g(y)) / (x - y)
    } else {
        // coincident roots: exact derivative via the matrix path
        let s = (y + omega2).sqrt();
        conjugate_condition(s, x + omega2, omega2, u)
    }
}

/// All conjugate points of u = 0 in (0, u_max], located on the analytic
/// condition by dense sampling with sign-change bisection plus |φ| dip
/// detection (even-multiplicity roots), then verified against the ODE oracle.
pub fn find_conjugate_points(params: &Dim2Params, u_max: f64) -> Result<Vec<f64>> {
    if u_max.is_nan() || u_max <= 0.0 {
        return Err(Error::invalid("find_conjugate_points: u_max must be positive"));
    }
    let (x, y) = quadratic_roots_xy(params);
    let omega2 = re(-params.w * params.w);

    let phi = |u: f64| -> f64 {
        let v = phi_fast(x, y, omega2, u);
        debug_assert!(v.im.abs() < 1.0e-8 * (1.0 + v.re.abs()), "φ must be real");
        v.re
    };

    // dense scan: 10⁴ samples per unit u
    let samples = ((u_max * 1.0e4).ceil() as usize).clamp(1000, 2_000_000);
    let du = u_max / samples as f64;
    let mut vals = Vec::with_capacity(samples + 1);
    for k in 0..=samples {
        vals.push(phi(k as f64 * du));
    }

    let mut roots: Vec<f64> = Vec::new();
    let bisect = |mut lo: f64, mut hi: f64| -> f64 {
        let mut f_lo = phi(lo);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            let f_mid = phi(mid);
            if (f_mid > 0.0) == (f_lo > 0.0) {
                lo = mid;
                f_lo = f_mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1.0e-13 * (1.0 + hi) {
                break;
            }
        }
        0.5 * (lo + hi)
    };

    for k in 1..=samples {
        let (u0, u1) = ((k - 1) as f64 * du, k as f64 * du);
        if vals[k - 1] == 0.0 {
            continue;
        }
        if vals[k - 1].signum() != vals[k].signum() {
            roots.push(bisect(u0, u1));
            continue;
        }
        // dip detection for touch roots
        if k >= 2 && k < samples {
            let (fa, fb, fc) = (vals[k - 1].abs(), vals[k].abs(), vals[k + 1].abs());
            if fb <= fa && fb <= fc {
                let window = vals[k.saturating_sub(200)..(k + 200).min(samples)]
                    .iter()
                    .fold(0.0f64, |m, v| m.max(v.abs()))
                    .max(1.0e-300);
                if fb < 1.0e-4 * window {
                    // ternary search on |φ|
                    let (mut lo, mut hi) = (u0, u1 + du);
                    for _ in 0..200 {
                        let m1 = lo + (hi - lo) / 3.0;
                        let m2 = hi - (hi - lo) / 3.0;
                        if phi(m1).abs() < phi(m2).abs() {
                            hi = m2;
                        } else {
                            lo = m1;
                        }
                        if hi - lo < 1.0e-13 * (1.0 + hi) {
                            break;
                        }
                    }
                    let u_star = 0.5 * (lo + hi);
                    if phi(u_star).abs() <= 1.0e-9 * window && u_star > du {
                        roots.push(u_star);
                    }
                }
            }
        }
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots.dedup_by(|a, b| (*a - *b).abs() < 1.0e-8);
    roots.retain(|u| *u > 1.0e-9);

    // oracle verification: every analytic root must coincide with a
    // det-degeneration of the Jacobi frame
    if !roots.is_empty() {
        let oracle_roots = oracle_conjugate_points(params, u_max * 1.0 + 5.0 * du)?;
        for r in &roots {
            let ok = oracle_roots.iter().any(|o| (o - r).abs() <= 1.0e-6);
            if !ok {
                return Err(Error::Consistency(format!(
                    "analytic conjugate point u = {r} not confirmed by the ODE oracle \
                     (oracle roots: {oracle_roots:?})"
                )));
            }
        }
    }
    Ok(roots)
}

/// Oracle det-roots of the Alekseevsky Jacobi frame with L(0) = 0, L̇(0) = I,
/// using the renormalized long-horizon scanner.
pub fn oracle_conjugate_points(params: &Dim2Params, u_max: f64) -> Result<Vec<f64>> {
    oracle::conjugate_scan(&params.omega_matrix(), &params.p_matrix(), u_max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Existence {
    Exists,
    NotExists,
    Unknown,
}

#[derive(Debug, Clone)]
pub struct ExistenceReport {
    pub exists: Existence,
    pub reasons: Vec<String>,
}

/// Decidable existence of conjugate points from the printed criteria:
/// |p| < 0, positive energy E = P − ω², or a positive eigenvalue of p all
/// force existence; the conformally trivial case with E ≤ 0 excludes it;
/// anything else is Unknown (resolved numerically by find_conjugate_points).
pub fn existence_predicates(params: &Dim2Params) -> ExistenceReport {
    let mut reasons = Vec::new();
    let det_p = params.det_p();
    let e = params.energy_scalar();
    let (lam1, lam2) = params.p_eigenvalues();
    if det_p < 0.0 {
        reasons.push(format!("|p| = {det_p} < 0"));
    }
    if e > 0.0 {
        reasons.push(format!("energy E = P − ω² = {e} > 0"));
    }
    if lam1 > 0.0 || lam2 > 0.0 {
        reasons.push(format!(
            "p has a positive eigenvalue ({})",
            if lam1 > 0.0 { lam1 } else { lam2 }
        ));
    }
    if !reasons.is_empty() {
        return ExistenceReport {
            exists: Existence::Exists,
            reasons,
        };
    }
    if params.conformally_trivial() && e <= 0.0 {
        return ExistenceReport {
            exists: Existence::NotExists,
            reasons: vec![format!(
                "conformally trivial with energy E = {e} ≤ 0 (no conjugate points)"
            )],
        };
    }
    ExistenceReport {
        exists: Existence::Unknown,
        reasons: vec!["no decisive criterion; resolve numerically".into()],
    }
}
