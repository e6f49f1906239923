//! Nonrigorous approximate solutions.
//!
//! The Galerkin truncation `|k| <= N` of the equation is solved on one time
//! step by Chebyshev collocation on the `n` second-kind nodes with a Newton
//! iteration on all node values at once. A fine RK4 integration supplies the
//! starting guess. The linear variational problems are solved directly in
//! Chebyshev coefficient space. Results are plain floating point and are
//! promoted to point intervals before any rigorous use.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::cheb::ChebFourier;
use crate::error::{Error, Result};

/// Settings of one approximate step solve.
#[derive(Clone, Debug, PartialEq)]
pub struct SolveConfig {
    /// Fourier truncation `N`.
    pub nf: usize,
    /// Number of Chebyshev coefficients `n`.
    pub n: usize,
    /// Direction `θ` of the time ray.
    pub theta: f64,
    /// Spatial frequency `ω`.
    pub omega: f64,
    /// Left end of the step.
    pub t_lo: f64,
    /// Right end of the step.
    pub t_hi: f64,
    /// Relative Newton tolerance.
    pub tol: f64,
    /// Maximum Newton iterations.
    pub max_iter: usize,
}

impl SolveConfig {
    fn validate(&self) -> Result<()> {
        if self.nf < 1 || self.n < 2 {
            return Err(Error::Config("solver needs N >= 1 and n >= 2".into()));
        }
        if !(self.theta.abs() < std::f64::consts::FRAC_PI_2) {
            return Err(Error::Config("solver needs |theta| < pi/2".into()));
        }
        if !(self.t_lo < self.t_hi) {
            return Err(Error::Config("solver needs t_lo < t_hi".into()));
        }
        Ok(())
    }

    fn half_step(&self) -> f64 {
        0.5 * (self.t_hi - self.t_lo)
    }
}

/// Chebyshev points of the second kind `x_j = cos(πj/(n-1))`, `j = 0..n`.
pub fn lobatto_nodes(n: usize) -> Vec<f64> {
    (0..n)
        .map(|j| (std::f64::consts::PI * j as f64 / (n - 1) as f64).cos())
        .collect()
}

/// Differentiation matrix on the second-kind nodes.
fn diff_matrix(x: &[f64]) -> Vec<Vec<f64>> {
    let n = x.len();
    let c: Vec<f64> = (0..n)
        .map(|i| {
            let w = if i == 0 || i == n - 1 { 2.0 } else { 1.0 };
            if i % 2 == 0 { w } else { -w }
        })
        .collect();
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        let mut row = 0.0;
        for j in 0..n {
            if i != j {
                d[i][j] = c[i] / c[j] / (x[i] - x[j]);
                row += d[i][j];
            }
        }
        d[i][i] = -row;
    }
    d
}

/// Node values to coefficients in the storage convention (`ā_0 = c_0`, `ā_ℓ = c_ℓ/2`).
fn values_to_coeffs(values: &[Complex64]) -> Vec<Complex64> {
    let n = values.len();
    let m = (n - 1) as f64;
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (l, o) in out.iter_mut().enumerate() {
        let mut s = Complex64::new(0.0, 0.0);
        for (j, v) in values.iter().enumerate() {
            let w = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
            s += v * (w * (std::f64::consts::PI * (l * j) as f64 / m).cos());
        }
        let mut c = s * (2.0 / m);
        if l == 0 || l == n - 1 {
            c *= 0.5;
        }
        *o = if l == 0 { c } else { c * 0.5 };
    }
    out
}

/// Right-hand side of the truncated system in physical time.
fn galerkin_rhs(u: &[Complex64], nf: usize, rot: Complex64, omega: f64, out: &mut [Complex64]) {
    let width = 2 * nf + 1;
    let w2 = omega * omega;
    for ki in 0..width {
        let k = ki as i64 - nf as i64;
        let mut conv = Complex64::new(0.0, 0.0);
        let lo = (k - nf as i64).max(-(nf as i64));
        let hi = (k + nf as i64).min(nf as i64);
        for j in lo..=hi {
            conv += u[(k - j + nf as i64) as usize] * u[(j + nf as i64) as usize];
        }
        out[ki] = rot * (-(k * k) as f64 * w2 * u[ki] + conv);
    }
}

fn rk4(u: &mut [Complex64], dt: f64, steps: usize, nf: usize, rot: Complex64, omega: f64) {
    let len = u.len();
    let mut k1 = vec![Complex64::new(0.0, 0.0); len];
    let mut k2 = k1.clone();
    let mut k3 = k1.clone();
    let mut k4 = k1.clone();
    let mut tmp = k1.clone();
    for _ in 0..steps {
        galerkin_rhs(u, nf, rot, omega, &mut k1);
        for i in 0..len {
            tmp[i] = u[i] + k1[i] * (0.5 * dt);
        }
        galerkin_rhs(&tmp, nf, rot, omega, &mut k2);
        for i in 0..len {
            tmp[i] = u[i] + k2[i] * (0.5 * dt);
        }
        galerkin_rhs(&tmp, nf, rot, omega, &mut k3);
        for i in 0..len {
            tmp[i] = u[i] + k3[i] * dt;
        }
        galerkin_rhs(&tmp, nf, rot, omega, &mut k4);
        for i in 0..len {
            u[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (dt / 6.0);
        }
    }
}

/// Integrates the truncated system with classical RK4 from `u0` over a time
/// span `t`, choosing the substep from a stiffness estimate.
pub fn rk4_integrate(u0: &[Complex64], nf: usize, theta: f64, omega: f64, t: f64) -> Vec<Complex64> {
    let rot = Complex64::from_polar(1.0, theta);
    let mut u = u0.to_vec();
    if t <= 0.0 {
        return u;
    }
    let norm: f64 = u.iter().map(|z| z.norm()).sum();
    let rate = (nf * nf) as f64 * omega * omega + 2.0 * norm + 1.0;
    let steps = ((t * rate / 0.5).ceil() as usize).max(4);
    rk4(&mut u, t / steps as f64, steps, nf, rot, omega);
    u
}

/// Solves one step of the truncated system and returns the approximation as
/// point-valued Chebyshev × Fourier coefficients on `[t_lo, t_hi]`.
pub fn solve_step(u0: &[(f64, f64)], cfg: &SolveConfig) -> Result<ChebFourier> {
    cfg.validate()?;
    let nf = cfg.nf;
    let width = 2 * nf + 1;
    let n = cfg.n;
    let src_nf = (u0.len().saturating_sub(1)) / 2;
    let mut init = vec![Complex64::new(0.0, 0.0); width];
    for k in -(nf.min(src_nf) as i64)..=(nf.min(src_nf) as i64) {
        let (re, im) = u0[(k + src_nf as i64) as usize];
        init[(k + nf as i64) as usize] = Complex64::new(re, im);
    }
    let x = lobatto_nodes(n);
    let d = diff_matrix(&x);
    let half = cfg.half_step();
    let rot = Complex64::from_polar(1.0, cfg.theta);

    // Starting guess: RK4 through the nodes in increasing time (x_{n-1} = -1 first).
    let mut vals = vec![vec![Complex64::new(0.0, 0.0); width]; n];
    vals[n - 1] = init.clone();
    let mut cur = init.clone();
    for j in (0..n - 1).rev() {
        let dt = (x[j] - x[j + 1]) * half;
        cur = rk4_integrate(&cur, nf, cfg.theta, cfg.omega, dt);
        vals[j] = cur.clone();
    }
    if vals.iter().flatten().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Solver("starting guess overflowed".into()));
    }

    let dim = n * width;
    let idx = |j: usize, ki: usize| j * width + ki;
    let scale = rot * half;
    let w2 = cfg.omega * cfg.omega;

    let residual = |vals: &Vec<Vec<Complex64>>| -> Vec<Complex64> {
        let mut r = vec![Complex64::new(0.0, 0.0); dim];
        let mut g = vec![Complex64::new(0.0, 0.0); width];
        for j in 0..n {
            if j == n - 1 {
                for ki in 0..width {
                    r[idx(j, ki)] = vals[j][ki] - init[ki];
                }
                continue;
            }
            galerkin_rhs(&vals[j], nf, Complex64::new(1.0, 0.0), cfg.omega, &mut g);
            for ki in 0..width {
                let mut dv = Complex64::new(0.0, 0.0);
                for (i, vi) in vals.iter().enumerate() {
                    dv += vi[ki] * d[j][i];
                }
                r[idx(j, ki)] = dv - scale * g[ki];
            }
        }
        r
    };

    let jacobian = |vals: &Vec<Vec<Complex64>>| -> DMatrix<Complex64> {
        let mut jm = DMatrix::<Complex64>::zeros(dim, dim);
        for j in 0..n {
            if j == n - 1 {
                for ki in 0..width {
                    jm[(idx(j, ki), idx(j, ki))] = Complex64::new(1.0, 0.0);
                }
                continue;
            }
            for ki in 0..width {
                let row = idx(j, ki);
                for i in 0..n {
                    if d[j][i] != 0.0 {
                        jm[(row, idx(i, ki))] += Complex64::new(d[j][i], 0.0);
                    }
                }
                let k = ki as i64 - nf as i64;
                jm[(row, idx(j, ki))] -= scale * (-(k * k) as f64 * w2);
                for kj in 0..width {
                    let kk = kj as i64 - nf as i64;
                    let diff = k - kk;
                    if diff.unsigned_abs() as usize <= nf {
                        let a = vals[j][(diff + nf as i64) as usize];
                        jm[(row, idx(j, kj))] -= scale * a * 2.0;
                    }
                }
            }
        }
        jm
    };

    let size: f64 = vals.iter().flatten().map(|z| z.norm()).fold(1.0, f64::max);
    let mut lu = jacobian(&vals).lu();
    let mut last_step = f64::INFINITY;
    let mut converged = false;
    for _ in 0..cfg.max_iter {
        let r = residual(&vals);
        let rv = nalgebra::DVector::from_vec(r);
        let delta = lu
            .solve(&rv)
            .ok_or_else(|| Error::Solver("singular collocation Jacobian".into()))?;
        let mut step = 0.0f64;
        for j in 0..n {
            for ki in 0..width {
                let dz = delta[idx(j, ki)];
                vals[j][ki] -= dz;
                step = step.max(dz.norm());
            }
        }
        if !step.is_finite() {
            return Err(Error::Solver("Newton iteration produced non-finite values".into()));
        }
        if step <= cfg.tol * size {
            converged = true;
            break;
        }
        if step > 0.5 * last_step {
            lu = jacobian(&vals).lu();
        }
        last_step = step;
    }
    if !converged {
        return Err(Error::Solver(format!(
            "Newton did not converge in {} iterations",
            cfg.max_iter
        )));
    }

    let mut coeffs = vec![(0.0, 0.0); n * width];
    for ki in 0..width {
        let column: Vec<Complex64> = (0..n).map(|j| vals[j][ki]).collect();
        let c = values_to_coeffs(&column);
        for (l, z) in c.iter().enumerate() {
            coeffs[l * width + ki] = (z.re, z.im);
        }
    }
    Ok(ChebFourier::from_points(cfg.t_lo, cfg.t_hi, n, nf, &coeffs))
}

/// Floating point matrix of the linear Chebyshev system for one variational problem.
///
/// The unknowns are `c_{ℓ,k}` for `ℓ < n`, `|k| <= m`, ordered `ℓ(2m+1) + (k+m)`.
/// Row `(0,k)` is the initial condition `c_{0,k} + 2Σ_{j≥1}(-1)^j c_{j,k}`
/// and row `(ℓ,k)` is `-λ_k c_{ℓ-1,k} + 2ℓ c_{ℓ,k} + λ_k c_{ℓ+1,k} + N_{ℓ+1,k} - N_{ℓ-1,k}`
/// with `λ_k = -σ h e^{iθ} ω² k² / 2` and `N = σ h e^{iθ} (ã * c)`.
/// The forward problem uses `σ = 1` and `ã = ā`; the adjoint problem uses
/// `σ = -1` and the reflected coefficients `ã_k = ā_{-k}`.
#[allow(clippy::too_many_arguments)]
pub fn variational_matrix(
    abar: &[(f64, f64)],
    na: usize,
    nfa: usize,
    m: usize,
    n: usize,
    theta: f64,
    omega: f64,
    h: f64,
    adjoint: bool,
) -> DMatrix<Complex64> {
    let width = 2 * m + 1;
    let wa = 2 * nfa + 1;
    let dim = n * width;
    let sigma = if adjoint { -1.0 } else { 1.0 };
    let rot = Complex64::from_polar(1.0, theta);
    let g = rot * (sigma * h);
    let a = |l: i64, k: i64| -> Complex64 {
        let l = l.unsigned_abs() as usize;
        let k = if adjoint { -k } else { k };
        if l >= na || k.unsigned_abs() as usize > nfa {
            Complex64::new(0.0, 0.0)
        } else {
            let (re, im) = abar[l * wa + (k + nfa as i64) as usize];
            Complex64::new(re, im)
        }
    };
    let lambda = |k: i64| -> Complex64 { rot * (-sigma * h * omega * omega * (k * k) as f64 / 2.0) };
    let col = |l: usize, k: i64| l * width + (k + m as i64) as usize;
    let mut mat = DMatrix::<Complex64>::zeros(dim, dim);
    let mi = m as i64;
    for k in -mi..=mi {
        let row = col(0, k);
        for j in 0..n {
            let w = if j == 0 { 1.0 } else if j % 2 == 1 { -2.0 } else { 2.0 };
            mat[(row, col(j, k))] = Complex64::new(w, 0.0);
        }
    }
    for l in 1..n {
        for k in -mi..=mi {
            let row = col(l, k);
            let lam = lambda(k);
            mat[(row, col(l - 1, k))] -= lam;
            mat[(row, col(l, k))] += Complex64::new((2 * l) as f64, 0.0);
            if l + 1 < n {
                mat[(row, col(l + 1, k))] += lam;
            }
            for q in 0..n {
                for k2 in -mi..=mi {
                    let dk = k - k2;
                    let p1 = (l + 1) as i64;
                    let p0 = (l - 1) as i64;
                    let q = q as i64;
                    let mut dn = a(p1 - q, dk) - a(p0 - q, dk);
                    if q > 0 {
                        dn += a(p1 + q, dk) - a(p0 + q, dk);
                    }
                    if dn != Complex64::new(0.0, 0.0) {
                        mat[(row, col(q as usize, k2))] += g * dn;
                    }
                }
            }
        }
    }
    mat
}

/// Approximate fundamental matrix columns on one step.
#[derive(Clone, Debug)]
pub struct ApproxColumns {
    /// Columns of `Φ`, each a series in the modes `|k| <= m`.
    pub forward: Vec<ChebFourier>,
    /// Columns of `Ψᵀ`, the adjoint solutions with identity initial data.
    pub adjoint: Vec<ChebFourier>,
}

fn columns_from_inverse(inv: &DMatrix<Complex64>, n: usize, m: usize, t_lo: f64, t_hi: f64) -> Vec<ChebFourier> {
    let width = 2 * m + 1;
    (0..width)
        .map(|j| {
            let src = j; // row (0, j - m) has index j
            let vals: Vec<(f64, f64)> = (0..n * width).map(|r| (inv[(r, src)].re, inv[(r, src)].im)).collect();
            ChebFourier::from_points(t_lo, t_hi, n, m, &vals)
        })
        .collect()
}

/// Solves the forward and adjoint variational problems about `ā` for the
/// modes `|k| <= m`, with identity initial data at `t_lo`.
pub fn solve_variational_columns(abar: &ChebFourier, m: usize, n: usize, theta: f64, omega: f64) -> Result<ApproxColumns> {
    if m > abar.fourier_order() {
        return Err(Error::Config("variational order m exceeds N".into()));
    }
    let mids = abar.midpoints();
    let h = abar.t_hi - abar.t_lo;
    let mut out = Vec::with_capacity(2);
    for adjoint in [false, true] {
        let mat = variational_matrix(&mids, abar.cheb_order(), abar.fourier_order(), m, n, theta, omega, h, adjoint);
        let inv = mat
            .try_inverse()
            .ok_or_else(|| Error::Solver("singular variational matrix".into()))?;
        out.push(columns_from_inverse(&inv, n, m, abar.t_lo, abar.t_hi));
    }
    let adjoint = out.pop().expect("two solves");
    let forward = out.pop().expect("two solves");
    Ok(ApproxColumns { forward, adjoint })
}
