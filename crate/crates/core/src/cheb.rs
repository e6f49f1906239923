//! Chebyshev-in-time, Fourier-in-space coefficient arrays.
//!
//! A [`ChebFourier`] on `[t_lo, t_hi]` represents
//!
//! ```text
//! a(t) = Σ_k ( ā_{0,k} + 2 Σ_{ℓ≥1} ā_{ℓ,k} T_ℓ(τ(t)) ) e^{ikωx},
//! ```
//!
//! with `τ` the affine map of `[t_lo, t_hi]` onto `[-1, 1]`. Extending the
//! coefficients symmetrically, `ā_{-ℓ,k} = ā_{ℓ,k}`, the series becomes
//! `Σ_{ℓ∈ℤ} ā_{|ℓ|,k} T_{|ℓ|}`, and products of series become full
//! convolutions over `ℓ ∈ ℤ`. All norms in this module respect the factor-2
//! storage convention.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::FourierVec;
use crate::interval::{ComplexInterval, RealInterval};

/// Chebyshev × Fourier coefficient array `ā_{ℓ,k}`, `0 <= ℓ < n`, `|k| <= N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChebFourier {
    /// Left end of the physical time interval.
    pub t_lo: f64,
    /// Right end of the physical time interval.
    pub t_hi: f64,
    n: usize,
    nf: usize,
    coeffs: Vec<ComplexInterval>,
}

/// A weighted norm `Σ_{ℓ,k} |c_{ℓ,k}| ν^ℓ` together with its decay rate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightedNorm {
    /// Chebyshev decay rate `ν >= 1`.
    pub nu: f64,
    /// Enclosure of the norm.
    pub value: RealInterval,
}

impl ChebFourier {
    /// The zero series with `n` Chebyshev and `2N+1` Fourier coefficients.
    pub fn zeros(t_lo: f64, t_hi: f64, n: usize, nf: usize) -> Self {
        assert!(n >= 1, "at least one Chebyshev coefficient is required");
        Self {
            t_lo,
            t_hi,
            n,
            nf,
            coeffs: vec![ComplexInterval::ZERO; n * (2 * nf + 1)],
        }
    }

    /// Builds a series from coefficients stored row-major in `(ℓ, k)` order.
    pub fn from_coeffs(
        t_lo: f64,
        t_hi: f64,
        n: usize,
        nf: usize,
        coeffs: Vec<ComplexInterval>,
    ) -> Self {
        assert_eq!(coeffs.len(), n * (2 * nf + 1), "coefficient table shape");
        Self {
            t_lo,
            t_hi,
            n,
            nf,
            coeffs,
        }
    }

    /// Builds a point-valued series from `(re, im)` pairs in row-major `(ℓ, k)` order.
    pub fn from_points(t_lo: f64, t_hi: f64, n: usize, nf: usize, values: &[(f64, f64)]) -> Self {
        Self::from_coeffs(
            t_lo,
            t_hi,
            n,
            nf,
            values.iter().map(|&(r, i)| ComplexInterval::point(r, i)).collect(),
        )
    }

    /// A series that is constant in time and equal to `v`.
    pub fn constant(t_lo: f64, t_hi: f64, n: usize, v: &FourierVec) -> Self {
        let nf = v.max_wavenumber();
        let mut out = Self::zeros(t_lo, t_hi, n, nf);
        for k in -(nf as i64)..=(nf as i64) {
            out.set(0, k, v.get(k));
        }
        out
    }

    /// Number of Chebyshev coefficients.
    pub fn cheb_order(&self) -> usize {
        self.n
    }

    /// Largest Fourier wavenumber.
    pub fn fourier_order(&self) -> usize {
        self.nf
    }

    /// Coefficient table in row-major `(ℓ, k)` order.
    pub fn coeffs(&self) -> &[ComplexInterval] {
        &self.coeffs
    }

    fn index(&self, l: usize, k: i64) -> usize {
        l * (2 * self.nf + 1) + (k + self.nf as i64) as usize
    }

    /// Coefficient `ā_{ℓ,k}`; zero outside the stored range.
    pub fn get(&self, l: usize, k: i64) -> ComplexInterval {
        if l >= self.n || k.unsigned_abs() as usize > self.nf {
            ComplexInterval::ZERO
        } else {
            self.coeffs[self.index(l, k)]
        }
    }

    /// Sets `ā_{ℓ,k}`.
    pub fn set(&mut self, l: usize, k: i64, v: ComplexInterval) {
        let i = self.index(l, k);
        self.coeffs[i] = v;
    }

    /// Chebyshev row `ℓ` as a Fourier vector.
    pub fn row(&self, l: usize) -> FourierVec {
        let mut v = FourierVec::zeros(self.nf);
        for k in -(self.nf as i64)..=(self.nf as i64) {
            v.set(k, self.get(l, k));
        }
        v
    }

    /// Enclosure of the step length `t_hi - t_lo`.
    pub fn step(&self) -> RealInterval {
        RealInterval::point(self.t_hi) - RealInterval::point(self.t_lo)
    }

    fn same_interval(&self, other: &Self) -> Result<()> {
        if self.t_lo != other.t_lo || self.t_hi != other.t_hi {
            return Err(Error::Domain(format!(
                "series live on different intervals [{}, {}] and [{}, {}]",
                self.t_lo, self.t_hi, other.t_lo, other.t_hi
            )));
        }
        Ok(())
    }

    /// Product series: `(a*b)_{ℓ,k} = Σ_{ℓ₁+ℓ₂=ℓ, ℓᵢ∈ℤ} Σ_{k₁+k₂=k} a_{|ℓ₁|,k₁} b_{|ℓ₂|,k₂}`.
    ///
    /// The result has `n_a + n_b - 1` Chebyshev and `2(N_a+N_b)+1` Fourier
    /// coefficients and is exact up to outward rounding.
    pub fn cheb_convolve(&self, other: &Self) -> Result<Self> {
        self.same_interval(other)?;
        let na = self.n as i64;
        let nb = other.n as i64;
        let nf = self.nf + other.nf;
        let rows_a: Vec<FourierVec> = (0..self.n).map(|l| self.row(l)).collect();
        let rows_b: Vec<FourierVec> = (0..other.n).map(|l| other.row(l)).collect();
        let mut prods: Vec<Vec<Option<FourierVec>>> = vec![vec![None; other.n]; self.n];
        let mut out = Self::zeros(self.t_lo, self.t_hi, self.n + other.n - 1, nf);
        for l in 0..(na + nb - 1) {
            let mut acc = FourierVec::zeros(nf);
            for l1 in -(na - 1)..=(na - 1) {
                let l2 = l - l1;
                if l2.abs() >= nb {
                    continue;
                }
                let (i, j) = (l1.unsigned_abs() as usize, l2.unsigned_abs() as usize);
                let p = prods[i][j].get_or_insert_with(|| rows_a[i].convolve(&rows_b[j]));
                acc = acc.add(p);
            }
            for k in -(nf as i64)..=(nf as i64) {
                out.set(l as usize, k, acc.get(k));
            }
        }
        Ok(out)
    }

    /// Coefficients of `d/dτ` in the same storage convention.
    ///
    /// With `d` the stored derivative coefficients, `2ℓ a_ℓ = d_{ℓ-1} - d_{ℓ+1}`,
    /// solved backwards from `d_{n-1} = d_n = 0`.
    pub fn differentiate_tau(&self) -> Self {
        let m = self.n.saturating_sub(1).max(1);
        let mut out = Self::zeros(self.t_lo, self.t_hi, m, self.nf);
        if self.n < 2 {
            return out;
        }
        for k in -(self.nf as i64)..=(self.nf as i64) {
            let mut next = ComplexInterval::ZERO; // d_{ℓ+1}
            let mut cur = ComplexInterval::ZERO; // d_ℓ
            for l in (1..self.n).rev() {
                let two_l = RealInterval::point((2 * l) as f64);
                let prev = next + self.get(l, k).scale(two_l); // d_{ℓ-1}
                next = cur;
                cur = prev;
                out.set(l - 1, k, prev);
            }
        }
        out
    }

    /// Coefficients of the physical derivative `d/dt`, including the chain
    /// factor `2 / (t_hi - t_lo)`.
    pub fn differentiate(&self) -> Self {
        let d = self.differentiate_tau();
        let factor = RealInterval::point(2.0) / self.step();
        let coeffs = d.coeffs.iter().map(|c| c.scale(factor)).collect();
        Self { coeffs, ..d }
    }

    /// Enclosure of `a(t_lo)`: `ā_0 - 2ā_1 + 2ā_2 - …`.
    pub fn eval_at_start(&self) -> FourierVec {
        self.eval_signed(true)
    }

    /// Enclosure of `a(t_hi)`: `ā_0 + 2ā_1 + 2ā_2 + …`.
    pub fn eval_at_end(&self) -> FourierVec {
        self.eval_signed(false)
    }

    fn eval_signed(&self, alternate: bool) -> FourierVec {
        let two = RealInterval::point(2.0);
        let mut v = FourierVec::zeros(self.nf);
        for k in -(self.nf as i64)..=(self.nf as i64) {
            let mut s = self.get(0, k);
            for l in 1..self.n {
                let term = self.get(l, k).scale(two);
                if alternate && l % 2 == 1 {
                    s -= term;
                } else {
                    s += term;
                }
            }
            v.set(k, s);
        }
        v
    }

    /// Clenshaw evaluation at the rescaled time `τ ⊂ [-1, 1]`.
    pub fn eval_tau(&self, tau: RealInterval) -> FourierVec {
        let two = RealInterval::point(2.0);
        let two_tau = tau * two;
        let mut v = FourierVec::zeros(self.nf);
        for k in -(self.nf as i64)..=(self.nf as i64) {
            let mut b1 = ComplexInterval::ZERO;
            let mut b2 = ComplexInterval::ZERO;
            for l in (1..self.n).rev() {
                let c = self.get(l, k).scale(two);
                let b0 = c + b1.scale(two_tau) - b2;
                b2 = b1;
                b1 = b0;
            }
            v.set(k, self.get(0, k) + b1.scale(tau) - b2);
        }
        v
    }

    /// Rescaled time of a physical time `t` (enclosure).
    pub fn tau_of(&self, t: f64) -> RealInterval {
        let num = RealInterval::point(2.0) * (RealInterval::point(t) - RealInterval::point(self.t_lo));
        (num / self.step() - RealInterval::ONE).max(&RealInterval::point(-1.0)).min(&RealInterval::ONE)
    }

    /// Enclosure of `a(t)` at a physical time `t ∈ [t_lo, t_hi]`.
    pub fn eval_at(&self, t: f64) -> FourierVec {
        self.eval_tau(self.tau_of(t))
    }

    /// Majorant `Σ_k (|ā_{0,k}| + 2 Σ_{ℓ≥1} |ā_{ℓ,k}|)` of `sup_t ‖a(t)‖_{ℓ¹}`.
    pub fn sup_norm_x(&self) -> RealInterval {
        let two = RealInterval::point(2.0);
        let mut s = RealInterval::ZERO;
        for l in 0..self.n {
            let w = if l == 0 { RealInterval::ONE } else { two };
            let mut row = RealInterval::ZERO;
            for k in -(self.nf as i64)..=(self.nf as i64) {
                row += self.get(l, k).abs();
            }
            s += row * w;
        }
        s
    }

    /// Sharper bound of `sup_t ‖a(t)‖_{ℓ¹}` from the mean-value form on
    /// `pieces` equal subintervals of `[-1, 1]`, capped by the majorant.
    pub fn sup_norm_refined(&self, pieces: usize) -> RealInterval {
        let majorant = self.sup_norm_x();
        let d = self.differentiate_tau();
        let mut best = RealInterval::ZERO;
        for p in 0..pieces {
            let a = -1.0 + 2.0 * p as f64 / pieces as f64;
            let b = -1.0 + 2.0 * (p + 1) as f64 / pieces as f64;
            let mid = 0.5 * (a + b);
            let half = up_half_width(a, b, mid);
            let center = self.eval_tau(RealInterval::point(mid)).ell1_norm();
            let slope = d.eval_tau(RealInterval::new(a, b)).ell1_norm();
            let bound = center + slope * RealInterval::point(half);
            best = best.max(&bound);
        }
        if best.hi < majorant.hi {
            RealInterval::new(best.lo.min(majorant.lo), best.hi)
        } else {
            majorant
        }
    }

    /// Weighted norm `Σ_{ℓ,k} |ā_{ℓ,k}| ν^ℓ`.
    pub fn weighted_norm(&self, nu: f64) -> WeightedNorm {
        let nu_i = RealInterval::point(nu);
        let mut w = RealInterval::ONE;
        let mut s = RealInterval::ZERO;
        for l in 0..self.n {
            let mut row = RealInterval::ZERO;
            for k in -(self.nf as i64)..=(self.nf as i64) {
                row += self.get(l, k).abs();
            }
            s += row * w;
            w = w * nu_i;
        }
        WeightedNorm { nu, value: s }
    }

    /// Copy with every coefficient of wavenumber 0 removed.
    pub fn strip_zero_mode(&self) -> Self {
        let mut out = self.clone();
        for l in 0..self.n {
            out.set(l, 0, ComplexInterval::ZERO);
        }
        out
    }

    /// Multiplication by a complex scalar.
    pub fn scale(&self, s: ComplexInterval) -> Self {
        let coeffs = self.coeffs.iter().map(|c| *c * s).collect();
        Self {
            coeffs,
            ..self.clone()
        }
    }

    /// Copy with coefficients reflected in `k`: `b_{ℓ,k} = a_{ℓ,-k}`.
    pub fn reflect(&self) -> Self {
        let mut out = self.clone();
        for l in 0..self.n {
            for k in -(self.nf as i64)..=(self.nf as i64) {
                out.set(l, k, self.get(l, -k));
            }
        }
        out
    }

    /// Midpoints of the coefficients in row-major `(ℓ, k)` order.
    pub fn midpoints(&self) -> Vec<(f64, f64)> {
        self.coeffs.iter().map(|c| c.mid()).collect()
    }

    /// True when every coefficient is valid.
    pub fn is_valid(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_valid())
    }
}

fn up_half_width(a: f64, b: f64, mid: f64) -> f64 {
    (b - mid).max(mid - a).next_up()
}
