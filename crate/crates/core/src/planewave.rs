//! Metric-form data model (Brinkmann/Alekseevsky/Rosen), conversions between
//! the forms, the Jacobi equation's symplectic form, the Grassmannian curve of
//! a Rosen metric, and the Raychaudhuri conjugate-point bound.

use crate::error::{Error, Result};
use crate::matcore::{self, CMatrix, C64};
use crate::oracle;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricForm {
    Brinkmann,
    Alekseevsky,
}

/// A homogeneous plane wave given by constant matrices: skew ω and symmetric
/// p, interpreted in the stated coordinate form.
#[derive(Debug, Clone)]
pub struct MicrocosmSpec {
    pub n: usize,
    pub omega: CMatrix,
    pub p: CMatrix,
    pub form: MetricForm,
}

impl MicrocosmSpec {
    pub fn new(omega: CMatrix, p: CMatrix, form: MetricForm) -> Result<Self> {
        let n = omega.nrows();
        if p.nrows() != n || p.ncols() != n || omega.ncols() != n || n == 0 {
            return Err(Error::invalid("MicrocosmSpec: shape mismatch"));
        }
        if omega.iter().chain(p.iter()).any(|z| z.im != 0.0) {
            return Err(Error::invalid("MicrocosmSpec: ω and p must be real"));
        }
        if !matcore::is_skew(&omega, 1.0e-12) {
            return Err(Error::invalid("MicrocosmSpec: ω is not skew (ωᵀ = −ω violated)"));
        }
        if !matcore::is_symmetric(&p, 1.0e-12) {
            return Err(Error::invalid("MicrocosmSpec: p is not symmetric (pᵀ = p violated)"));
        }
        Ok(Self { n, omega, p, form })
    }

    /// tr(p) for a Brinkmann form, tr(p − ω²) for an Alekseevsky form:
    /// the (form-invariant) trace of the tidal curvature.
    pub fn energy_trace(&self) -> f64 {
        match self.form {
            MetricForm::Brinkmann => self.p.trace().re,
            MetricForm::Alekseevsky => {
                (self.p.trace() - (&self.omega * &self.omega).trace()).re
            }
        }
    }

    /// The n = 2 theorems' scalar P − ω² = A + w² (half the tidal trace).
    /// Distinct from [`Self::energy_trace`] by the factor n = 2.
    pub fn energy_scalar_dim2(&self) -> Option<f64> {
        if self.n == 2 {
            Some(self.energy_trace() / 2.0)
        } else {
            None
        }
    }

    /// Tidal curvature of the Brinkmann-form Jacobi equation Ẍ + p(u)X = 0.
    pub fn brinkmann_tidal(&self) -> impl Fn(f64) -> CMatrix + '_ {
        let spec_b = convert_form(self, MetricForm::Brinkmann);
        move |u: f64| {
            let em = matcore::mat_exp(&spec_b.omega.scale(-u));
            let ep = matcore::mat_exp(&spec_b.omega.scale(u));
            em * &spec_b.p * ep
        }
    }
}

/// Form conversion: Brinkmann→Alekseevsky replaces p by p + ω², the reverse
/// replaces p by p − ω²; ω is unchanged and the round trip is the identity.
pub fn convert_form(spec: &MicrocosmSpec, target: MetricForm) -> MicrocosmSpec {
    if spec.form == target {
        return spec.clone();
    }
    let om2 = &spec.omega * &spec.omega;
    let p = match target {
        MetricForm::Alekseevsky => &spec.p + &om2,
        MetricForm::Brinkmann => &spec.p - &om2,
    };
    MicrocosmSpec {
        n: spec.n,
        omega: spec.omega.clone(),
        p: matcore::symmetrize(&p),
        form: target,
    }
}

/// e^{−uω} p e^{uω} for a Brinkmann-form spec.
pub fn tidal_at(spec: &MicrocosmSpec, u: f64) -> Result<CMatrix> {
    if spec.form != MetricForm::Brinkmann {
        return Err(Error::invalid("tidal_at: Brinkmann form required"));
    }
    let em = matcore::mat_exp(&spec.omega.scale(-u));
    let ep = matcore::mat_exp(&spec.omega.scale(u));
    Ok(em * &spec.p * ep)
}

/// The Alekseevsky-form symplectic form on Jacobi solutions:
/// Ω(X, Y) = XᵀẎ − YᵀẊ − 2XᵀωY.
pub fn symplectic_form_eval(
    x: &CMatrix,
    xdot: &CMatrix,
    y: &CMatrix,
    ydot: &CMatrix,
    omega: &CMatrix,
) -> C64 {
    let a = (x.transpose() * ydot)[(0, 0)];
    let b = (y.transpose() * xdot)[(0, 0)];
    let c = (x.transpose() * omega * y)[(0, 0)];
    a - b - c * matcore::re(2.0)
}

/// Rosen-form data on a grid: h(u) = L(u)ᵀL(u) positive definite.
#[derive(Debug, Clone)]
pub struct RosenData {
    pub grid: Vec<f64>,
    pub h: Vec<CMatrix>,
    pub l: Vec<CMatrix>,
    /// Set when the Sachs flow blew up or L degenerated inside the requested
    /// grid; the data above are truncated to the regular part.
    pub truncated_at: Option<f64>,
}

/// Integrate the Alekseevsky Sachs system `Ṡ + S² − [ω,S] + p − ω² = 0`,
/// L̇ = (S+ω)L with S(0) = s_init, L(0) = I and emit h = LᵀL.
pub fn alekseevsky_to_rosen(
    spec: &MicrocosmSpec,
    s_init: &CMatrix,
    grid: &[f64],
) -> Result<RosenData> {
    if spec.form != MetricForm::Alekseevsky {
        return Err(Error::invalid("alekseevsky_to_rosen: Alekseevsky form required"));
    }
    let n = spec.n;
    if !matcore::is_symmetric(s_init, 1.0e-8) || s_init.nrows() != n {
        return Err(Error::invalid("alekseevsky_to_rosen: s_init must be symmetric n×n"));
    }
    if grid.len() < 2 || grid[0].abs() > 1.0e-12 {
        return Err(Error::invalid(
            "alekseevsky_to_rosen: grid must start at u = 0 (initial condition L(0) = I)",
        ));
    }
    let omega = spec.omega.clone();
    let q = &spec.p - &omega * &omega;
    let f = {
        let omega = omega.clone();
        move |_u: f64, state: &CMatrix| -> CMatrix {
            let s = matcore::top_block(state, n);
            let l = matcore::bottom_block(state, n);
            let sdot = -(&s * &s) + &omega * &s - &s * &omega - &q;
            let ldot = (&s + &omega) * &l;
            matcore::vstack(&sdot, &ldot)
        }
    };
    let y0 = matcore::vstack(s_init, &matcore::eye(n));
    let stop = |state: &CMatrix| state.norm() > oracle::BLOWUP_NORM;
    let path = oracle::rk4_path(&f, grid, &y0, oracle::DEFAULT_STEP, Some(&stop), false);

    let mut out_grid = Vec::new();
    let mut out_h = Vec::new();
    let mut out_l = Vec::new();
    let mut truncated_at = path.stopped.map(|(_, u)| u);
    for (k, state) in path.states.iter().enumerate() {
        let l = matcore::bottom_block(state, n);
        // positive definiteness of h = LᵀL ⟺ L nonsingular (real L)
        if matcore::sigma_min(&l) <= 1.0e-8 * matcore::sigma_max(&l).max(1.0) {
            truncated_at = Some(grid[k]);
            break;
        }
        out_grid.push(grid[k]);
        out_h.push(matcore::symmetrize(&(l.transpose() * &l)));
        out_l.push(l);
    }
    if out_grid.len() < 2 {
        return Err(Error::numerical(
            "alekseevsky_to_rosen: no regular interval (degenerate immediately)",
        ));
    }
    Ok(RosenData {
        grid: out_grid,
        h: out_h,
        l: out_l,
        truncated_at,
    })
}

/// The curve u ↦ H(u) − H(u₀) with Ḣ = h⁻¹: its degenerations mark the
/// points conjugate to u₀.
#[derive(Debug, Clone)]
pub struct GrassmannCurve {
    pub grid: Vec<f64>,
    /// H(u_k) − H(u₀) at every grid point.
    pub values: Vec<CMatrix>,
    /// h(u_k)⁻¹, the derivative of the curve at the nodes.
    pub hinv: Vec<CMatrix>,
    pub u0_index: usize,
}

impl GrassmannCurve {
    /// Evaluate at u: exact at grid nodes, first-order Hermite between nodes.
    pub fn eval(&self, u: f64) -> Result<CMatrix> {
        let lo = *self.grid.first().unwrap();
        let hi = *self.grid.last().unwrap();
        if u < lo - 1.0e-12 || u > hi + 1.0e-12 {
            return Err(Error::invalid(format!(
                "GrassmannCurve::eval: u = {u} outside [{lo}, {hi}]"
            )));
        }
        let k = match self
            .grid
            .binary_search_by(|g| g.partial_cmp(&u).unwrap())
        {
            Ok(i) => return Ok(self.values[i].clone()),
            Err(i) => i.min(self.grid.len() - 1).max(1) - 1,
        };
        Ok(&self.values[k] + self.hinv[k].scale(u - self.grid[k]))
    }
}

/// Cumulative quadrature of h⁻¹ from the grid point nearest u₀, with local
/// quadratic interpolation (h⁴-accurate like composite Simpson).
pub fn grassmann_curve(rosen: &RosenData, u0: f64) -> Result<GrassmannCurve> {
    let m = rosen.grid.len();
    if m < 3 {
        return Err(Error::invalid("grassmann_curve: need at least 3 grid points"));
    }
    if u0 < rosen.grid[0] - 1.0e-9 || u0 > rosen.grid[m - 1] + 1.0e-9 {
        return Err(Error::invalid("grassmann_curve: u0 outside the grid range"));
    }
    let u0_index = rosen
        .grid
        .iter()
        .enumerate()
        .min_by(|a, b| {
            (a.1 - u0).abs().partial_cmp(&(b.1 - u0).abs()).unwrap()
        })
        .unwrap()
        .0;

    let n = rosen.h[0].nrows();
    let mut hinv = Vec::with_capacity(m);
    for (k, h) in rosen.h.iter().enumerate() {
        let inv = matcore::inverse(h).map_err(|_| {
            Error::numerical(format!("grassmann_curve: h singular at u = {}", rosen.grid[k]))
        })?;
        hinv.push(matcore::symmetrize(&inv));
    }

    // integral over [u_k, u_{k+1}] of the quadratic through three neighbors,
    // evaluated exactly with 2-point Gauss
    let seg_integral = |k: usize| -> CMatrix {
        let idx = if k == 0 {
            [0, 1, 2]
        } else if k + 2 > m - 1 {
            [m - 3, m - 2, m - 1]
        } else {
            [k - 1, k, k + 1]
        };
        let (a, b) = (rosen.grid[k], rosen.grid[k + 1]);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let g1 = mid - half / 3.0f64.sqrt();
        let g2 = mid + half / 3.0f64.sqrt();
        let mut acc = matcore::zeros(n, n);
        for t in [g1, g2] {
            // Lagrange quadratic through the three chosen nodes
            for (ii, &i) in idx.iter().enumerate() {
                let mut w = 1.0;
                for (jj, &jn) in idx.iter().enumerate() {
                    if ii != jj {
                        w *= (t - rosen.grid[jn]) / (rosen.grid[i] - rosen.grid[jn]);
                    }
                }
                acc += hinv[i].scale(w);
            }
        }
        acc.scale(half)
    };

    // cumulative from index 0, then shift so the curve vanishes at u0_index
    let mut cum = Vec::with_capacity(m);
    cum.push(matcore::zeros(n, n));
    for k in 0..m - 1 {
        let next = &cum[k] + seg_integral(k);
        cum.push(next);
    }
    let base = cum[u0_index].clone();
    let values: Vec<CMatrix> = cum.into_iter().map(|c| c - &base).collect();

    Ok(GrassmannCurve {
        grid: rosen.grid.clone(),
        values,
        hinv,
        u0_index,
    })
}

/// Guaranteed conjugate-point horizon π/√e_min, where e_min is a lower bound
/// for the per-direction mean tidal energy tr(p(u))/n on the interval.
pub fn raychaudhuri_bound(e_min: f64) -> Result<f64> {
    if e_min.is_nan() || e_min <= 0.0 {
        return Err(Error::invalid("raychaudhuri_bound: e_min must be positive"));
    }
    Ok(std::f64::consts::PI / e_min.sqrt())
}
