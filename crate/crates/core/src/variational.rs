//! Rigorous enclosure of the fundamental matrices of the linearized system.
//!
//! For the modes `|k| <= m` the linearization about `ā` is the
//! `(2m+1)`-dimensional system `c' = e^{iθ}(-k²ω² c + 2 ā * c)`. Each column
//! of `Φ` (and of `Ψᵀ`, the adjoint `Ψ' = -Ψ A`) is written as a Chebyshev
//! series in time and validated as the unique zero of a linear map `f` in the
//! weighted space with norm `Σ |c_{ℓ,k}| ν^ℓ`, using Newton–Kantorovich bounds
//! `Y0`, `Z0`, `Z1`: if `Z0 + Z1 < 1` the true column lies within
//! `r = Y0 / (1 - Z0 - Z1)` of the numerical one.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::approx::solve_variational_columns;
use crate::cheb::ChebFourier;
use crate::error::{Error, Result};
use crate::interval::{ComplexInterval, IntervalMatrix, RealInterval};
use crate::model::EquationParams;

/// Newton–Kantorovich bounds for one column.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiiBounds {
    /// Residual bound `‖A f(c̄)‖_ν`.
    pub y0: RealInterval,
    /// Preconditioner defect bound `‖I - A Df^{(n,m)}‖`.
    pub z0: RealInterval,
    /// Bound on `‖A (Df - A†)‖` from the truncated tail.
    pub z1: RealInterval,
    /// Validation radius.
    pub r: RealInterval,
    /// True when `Z0 + Z1 < 1` rigorously.
    pub success: bool,
}

/// Validated matrix-valued Chebyshev series.
#[derive(Clone, Debug)]
pub struct ChebMatrix {
    /// Columns, each a series in the modes `|k| <= m`.
    pub columns: Vec<ChebFourier>,
    /// Validation radius of each column in the weighted norm.
    pub radii: Vec<f64>,
    /// Per-column bounds.
    pub bounds: Vec<RadiiBounds>,
    /// Chebyshev decay rate used for validation.
    pub nu: f64,
    /// True for the adjoint problem, whose columns are the rows of `Ψ`.
    pub adjoint: bool,
}

/// Problem data shared by every column of one variational problem.
struct ColumnProblem<'a> {
    abar: &'a ChebFourier,
    adjoint: bool,
    m: usize,
    n: usize,
    nu: f64,
    g: ComplexInterval,
    lambdas: Vec<ComplexInterval>,
    h: RealInterval,
}

impl<'a> ColumnProblem<'a> {
    fn new(abar: &'a ChebFourier, m: usize, n: usize, nu: f64, params: &EquationParams, adjoint: bool) -> Self {
        let h = abar.step();
        let sigma = if adjoint { -1.0 } else { 1.0 };
        let g = params.rotation.scale(h * RealInterval::point(sigma));
        let w2 = params.omega.sqr();
        let lambdas = (-(m as i64)..=(m as i64))
            .map(|k| {
                let s = h * w2 * RealInterval::point(-sigma * (k * k) as f64 / 2.0);
                params.rotation.scale(s)
            })
            .collect();
        Self {
            abar,
            adjoint,
            m,
            n,
            nu,
            g,
            lambdas,
            h,
        }
    }

    fn width(&self) -> usize {
        2 * self.m + 1
    }

    fn dim(&self) -> usize {
        self.n * self.width()
    }

    fn col(&self, l: usize, k: i64) -> usize {
        l * self.width() + (k + self.m as i64) as usize
    }

    fn lambda(&self, k: i64) -> ComplexInterval {
        self.lambdas[(k + self.m as i64) as usize]
    }

    /// Multiplier coefficient `ã_{|ℓ|,k}`.
    fn a(&self, l: i64, k: i64) -> ComplexInterval {
        let k = if self.adjoint { -k } else { k };
        self.abar.get(l.unsigned_abs() as usize, k)
    }

    fn multiplier(&self) -> ChebFourier {
        if self.adjoint {
            self.abar.reflect()
        } else {
            self.abar.clone()
        }
    }

    fn nu_pow(&self, l: usize) -> RealInterval {
        RealInterval::point(self.nu).powi(l as u32)
    }

    /// Interval Jacobian `Df^{(n,m)}` of the finite projection.
    fn jacobian(&self) -> IntervalMatrix {
        let dim = self.dim();
        let mi = self.m as i64;
        let mut mat = IntervalMatrix::zeros(dim, dim);
        for k in -mi..=mi {
            let row = self.col(0, k);
            for j in 0..self.n {
                let w = if j == 0 {
                    1.0
                } else if j % 2 == 1 {
                    -2.0
                } else {
                    2.0
                };
                mat.set(row, self.col(j, k), ComplexInterval::point(w, 0.0));
            }
        }
        for l in 1..self.n {
            for k in -mi..=mi {
                let row = self.col(l, k);
                let lam = self.lambda(k);
                *mat.get_mut(row, self.col(l - 1, k)) -= lam;
                *mat.get_mut(row, self.col(l, k)) += ComplexInterval::point((2 * l) as f64, 0.0);
                if l + 1 < self.n {
                    *mat.get_mut(row, self.col(l + 1, k)) += lam;
                }
                let p1 = (l + 1) as i64;
                let p0 = (l - 1) as i64;
                for q in 0..self.n as i64 {
                    for k2 in -mi..=mi {
                        let dk = k - k2;
                        let mut dn = self.a(p1 - q, dk) - self.a(p0 - q, dk);
                        if q > 0 {
                            dn += self.a(p1 + q, dk) - self.a(p0 + q, dk);
                        }
                        if dn != ComplexInterval::ZERO {
                            *mat.get_mut(row, self.col(q as usize, k2)) += self.g * dn;
                        }
                    }
                }
            }
        }
        mat
    }

    /// Full residual `f(c̄)` for the column with initial datum `e_j`, rows
    /// `ℓ = 0 ..= n_a + n - 1` (all nonzero rows).
    fn residual(&self, cbar: &ChebFourier, j: usize) -> Result<Vec<Vec<ComplexInterval>>> {
        let mi = self.m as i64;
        let conv = self.multiplier().cheb_convolve(cbar)?;
        let nrows = self.abar.cheb_order() + self.n;
        let nn = |p: i64| -> Vec<ComplexInterval> {
            (-mi..=mi)
                .map(|k| {
                    if p < 0 {
                        ComplexInterval::ZERO
                    } else {
                        self.g * conv.get(p as usize, k)
                    }
                })
                .collect()
        };
        let mut rows = Vec::with_capacity(nrows);
        let mut first = Vec::with_capacity(self.width());
        for k in -mi..=mi {
            let mut s = cbar.get(0, k);
            for l in 1..self.n {
                let t = cbar.get(l, k).scale(RealInterval::point(2.0));
                if l % 2 == 1 {
                    s -= t;
                } else {
                    s += t;
                }
            }
            if (k + mi) as usize == j {
                s -= ComplexInterval::ONE;
            }
            first.push(s);
        }
        rows.push(first);
        for l in 1..nrows {
            let up = nn(l as i64 + 1);
            let down = nn(l as i64 - 1);
            let mut row = Vec::with_capacity(self.width());
            for (ki, k) in (-mi..=mi).enumerate() {
                let lam = self.lambda(k);
                let v = lam * (cbar.get(l + 1, k) - cbar.get(l - 1, k))
                    + cbar.get(l, k).scale(RealInterval::point((2 * l) as f64))
                    + up[ki]
                    - down[ki];
                row.push(v);
            }
            rows.push(row);
        }
        Ok(rows)
    }

    /// `Y0 = Σ_{ℓ<n} |(A f)_ℓ| ν^ℓ + Σ_{ℓ≥n} |f_ℓ| ν^ℓ / (2ℓ)`.
    fn bound_y0(&self, a: &IntervalMatrix, f: &[Vec<ComplexInterval>]) -> RealInterval {
        let dim = self.dim();
        let mut y = RealInterval::ZERO;
        for i in 0..dim {
            let l = i / self.width();
            let mut s = ComplexInterval::ZERO;
            for c in 0..dim {
                let fc = f[c / self.width()][c % self.width()];
                s += a.get(i, c) * fc;
            }
            y += s.abs() * self.nu_pow(l);
        }
        for (l, row) in f.iter().enumerate().skip(self.n) {
            let w = self.nu_pow(l) / RealInterval::point((2 * l) as f64);
            for v in row {
                y += v.abs() * w;
            }
        }
        y
    }

    /// `Ψ^{(ℓ,k)} = max_{ℓ₂ ≥ n, |k₂| <= m} (|ã_{|ℓ-ℓ₂|,k-k₂}| + |ã_{ℓ+ℓ₂,k-k₂}|) / ν^{ℓ₂}`.
    fn psi(&self, l: usize, k: i64) -> RealInterval {
        let na = self.abar.cheb_order();
        let mi = self.m as i64;
        let mut best = RealInterval::ZERO;
        let top = l + na;
        for l2 in self.n..top.max(self.n) {
            let w = self.nu_pow(l2);
            for k2 in -mi..=mi {
                let v = self.a(l as i64 - l2 as i64, k - k2).abs() + self.a((l + l2) as i64, k - k2).abs();
                if v.hi > 0.0 {
                    best = best.max(&(v / w));
                }
            }
        }
        best
    }

    /// `Z1 = Σ (|A| ẑ)_{ℓ,k} ν^ℓ + (ν + 1/ν)(|λ_m| + 4h‖ã‖_ν)/(2n)`.
    fn bound_z1(&self, a: &IntervalMatrix) -> RealInterval {
        let mi = self.m as i64;
        let dim = self.dim();
        let nu_n = self.nu_pow(self.n);
        let mut zhat = vec![RealInterval::ZERO; dim];
        for k in -mi..=mi {
            zhat[self.col(0, k)] = RealInterval::point(2.0) / nu_n;
            for l in 1..self.n {
                let mut v = (self.psi(l - 1, k) + self.psi(l + 1, k)) * self.h;
                if l == self.n - 1 {
                    v += self.lambda(k).abs() / nu_n;
                }
                zhat[self.col(l, k)] = v;
            }
        }
        let mut finite = RealInterval::ZERO;
        for i in 0..dim {
            let l = i / self.width();
            let mut s = RealInterval::ZERO;
            for (c, z) in zhat.iter().enumerate() {
                if z.hi > 0.0 {
                    s += a.get(i, c).abs() * *z;
                }
            }
            finite += s * self.nu_pow(l);
        }
        let nu = RealInterval::point(self.nu);
        let lam_m = self.lambda(mi).abs();
        let a_norm = self.abar.weighted_norm(self.nu).value;
        let tail = (nu + RealInterval::ONE / nu) * (lam_m + RealInterval::point(4.0) * self.h * a_norm)
            / RealInterval::point((2 * self.n) as f64);
        finite + tail
    }
}

/// Weighted operator norm `max_{(ℓ₂,k₂)} ν^{-ℓ₂} Σ_{(ℓ₁,k₁)} |B| ν^{ℓ₁}` of
/// `B = I - A · A†`, where `A†` is the finite Jacobian.
pub fn bound_z0(a: &IntervalMatrix, a_dagger: &IntervalMatrix, width: usize, nu: f64) -> RealInterval {
    let prod = a.matmul(a_dagger);
    let dim = prod.rows();
    let nu_i = RealInterval::point(nu);
    let mut best = RealInterval::ZERO;
    for c in 0..dim {
        let l2 = (c / width) as u32;
        let mut s = RealInterval::ZERO;
        for r in 0..dim {
            let l1 = (r / width) as u32;
            let id = if r == c { ComplexInterval::ONE } else { ComplexInterval::ZERO };
            let b = id - prod.get(r, c);
            s += b.abs() * nu_i.powi(l1);
        }
        best = best.max(&(s / nu_i.powi(l2)));
    }
    best
}

fn midpoint_inverse(m: &IntervalMatrix) -> Result<IntervalMatrix> {
    let dim = m.rows();
    let mid = DMatrix::<Complex64>::from_fn(dim, dim, |i, j| {
        let (re, im) = m.get(i, j).mid();
        Complex64::new(re, im)
    });
    let inv = mid
        .try_inverse()
        .ok_or_else(|| Error::Solver("singular variational Jacobian".into()))?;
    let mut out = IntervalMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            let z = inv[(i, j)];
            out.set(i, j, ComplexInterval::point(z.re, z.im));
        }
    }
    Ok(out)
}

/// Validates all `2m+1` columns of `Φ` (or of `Ψᵀ` when `adjoint` is set)
/// on the step of `ā`, returning the series and their radii.
pub fn validate_matrix(
    abar: &ChebFourier,
    m: usize,
    n: usize,
    nu: f64,
    params: &EquationParams,
    adjoint: bool,
) -> Result<ChebMatrix> {
    if nu < 1.0 {
        return Err(Error::Config("Chebyshev decay rate must satisfy nu >= 1".into()));
    }
    let problem = ColumnProblem::new(abar, m, n, nu, params, adjoint);
    let approx = solve_variational_columns(abar, m, n, params.theta_f64(), params.omega_f64())?;
    let columns = if adjoint { approx.adjoint } else { approx.forward };
    let jac = problem.jacobian();
    let a = midpoint_inverse(&jac)?;
    let z0 = bound_z0(&a, &jac, problem.width(), nu);
    let z1 = problem.bound_z1(&a);
    let contraction = z0 + z1;
    let bounds: Vec<RadiiBounds> = columns
        .par_iter()
        .enumerate()
        .map(|(j, c)| -> Result<RadiiBounds> {
            let f = problem.residual(c, j)?;
            let y0 = problem.bound_y0(&a, &f);
            let success = contraction.hi < 1.0;
            let r = if success {
                RealInterval::point(1.01) * y0 / (RealInterval::ONE - contraction)
            } else {
                RealInterval::INVALID
            };
            Ok(RadiiBounds {
                y0,
                z0,
                z1,
                r,
                success: success && r.is_valid(),
            })
        })
        .collect::<Result<_>>()?;
    if let Some(b) = bounds.iter().find(|b| !b.success) {
        return Err(Error::Radii {
            y0: b.y0.hi,
            z0: b.z0.hi,
            z1: b.z1.hi,
        });
    }
    let radii = bounds.iter().map(|b| b.r.hi).collect();
    Ok(ChebMatrix {
        columns,
        radii,
        bounds,
        nu,
        adjoint,
    })
}

/// Upper bounds of `|c_k(τ)|` over each of `pieces` equal subintervals of
/// `[-1, 1]`, from the mean-value form and capped by the coefficient majorant.
fn piece_abs_bounds(c: &ChebFourier, pieces: usize) -> Vec<Vec<f64>> {
    let nf = c.fourier_order() as i64;
    let d = c.differentiate_tau();
    let two = RealInterval::point(2.0);
    let majorant: Vec<f64> = (-nf..=nf)
        .map(|k| {
            let mut s = c.get(0, k).abs();
            for l in 1..c.cheb_order() {
                s += c.get(l, k).abs() * two;
            }
            s.hi
        })
        .collect();
    (0..pieces)
        .map(|p| {
            let a = -1.0 + 2.0 * p as f64 / pieces as f64;
            let b = -1.0 + 2.0 * (p + 1) as f64 / pieces as f64;
            let mid = 0.5 * (a + b);
            let half = RealInterval::point((b - mid).max(mid - a).next_up());
            let center = c.eval_tau(RealInterval::point(mid));
            let slope = d.eval_tau(RealInterval::new(a, b));
            (-nf..=nf)
                .enumerate()
                .map(|(i, k)| {
                    let v = center.get(k).abs() + slope.get(k).abs() * half;
                    v.hi.min(majorant[i])
                })
                .collect()
        })
        .collect()
}

/// Pieces used for sup-in-time bounds of matrix norms.
const SUP_PIECES: usize = 8;

impl ChebMatrix {
    /// Size `2m+1` of the matrix.
    pub fn size(&self) -> usize {
        self.columns.len()
    }

    /// Upper bound of `sup_t ‖M(t)‖₁` for the represented matrix `M`
    /// (`Φ`, or `Ψ` when the columns are adjoint solutions).
    pub fn sup_norm1(&self) -> RealInterval {
        let bounds: Vec<Vec<Vec<f64>>> = self.columns.iter().map(|c| piece_abs_bounds(c, SUP_PIECES)).collect();
        let size = self.size();
        let mut best = RealInterval::ZERO;
        for p in 0..SUP_PIECES {
            let norm = if self.adjoint {
                // Ψ_{j,k} is mode k of adjoint column j: column sums of Ψ run over j.
                let mut worst = RealInterval::ZERO;
                for k in 0..size {
                    let mut s = RealInterval::ZERO;
                    for (j, b) in bounds.iter().enumerate() {
                        s += RealInterval::point(b[p][k]) + RealInterval::point(2.0 * self.radii[j]);
                    }
                    worst = worst.max(&s);
                }
                worst
            } else {
                let mut worst = RealInterval::ZERO;
                for (j, b) in bounds.iter().enumerate() {
                    let mut s = RealInterval::point(2.0 * self.radii[j]);
                    for v in &b[p] {
                        s += RealInterval::point(*v);
                    }
                    worst = worst.max(&s);
                }
                worst
            };
            best = best.max(&norm);
        }
        best
    }

    /// Upper bound of `‖M(t_hi)‖₁`.
    pub fn end_norm1(&self) -> RealInterval {
        let ends: Vec<_> = self.columns.iter().map(|c| c.eval_at_end()).collect();
        let size = self.size() as i64;
        let m = (size - 1) / 2;
        let two = RealInterval::point(2.0);
        let mut worst = RealInterval::ZERO;
        if self.adjoint {
            for k in -m..=m {
                let mut s = RealInterval::ZERO;
                for (j, e) in ends.iter().enumerate() {
                    s += e.get(k).abs() + RealInterval::point(self.radii[j]) * two;
                }
                worst = worst.max(&s);
            }
        } else {
            for (j, e) in ends.iter().enumerate() {
                let s = e.ell1_norm() + RealInterval::point(self.radii[j]) * two;
                worst = worst.max(&s);
            }
        }
        worst
    }
}

/// `W_m = sup_t ‖Φ(t)‖₁ · sup_s ‖Ψ(s)‖₁`, including validation radii.
pub fn compute_wm(phi: &ChebMatrix, psi: &ChebMatrix) -> RealInterval {
    phi.sup_norm1() * psi.sup_norm1()
}

/// Validates `Φ` and `Ψ` concurrently, trying the decay rates in `nus` in order.
pub fn validate_pair(abar: &ChebFourier, m: usize, n: usize, nus: &[f64], params: &EquationParams) -> Result<(ChebMatrix, ChebMatrix)> {
    let mut last = Error::Config("no decay rate supplied".into());
    for &nu in nus {
        let (phi, psi) = rayon::join(
            || validate_matrix(abar, m, n, nu, params, false),
            || validate_matrix(abar, m, n, nu, params, true),
        );
        match (phi, psi) {
            (Ok(a), Ok(b)) => return Ok((a, b)),
            (Err(e), _) | (_, Err(e)) => last = e,
        }
    }
    Err(last)
}
