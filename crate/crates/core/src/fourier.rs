//! Finitely supported Fourier coefficient sequences in ℓ¹.
//!
//! A [`FourierVec`] stores the coefficients `a_k` for `|k| <= N` of a
//! bi-infinite sequence that vanishes outside that window. The space is a
//! Banach algebra under discrete convolution.

use serde::{Deserialize, Serialize};

use crate::interval::{ComplexInterval, RealInterval};

/// Coefficients `a_{-N}, …, a_N` of a finitely supported sequence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierVec {
    n: usize,
    coeffs: Vec<ComplexInterval>,
}

/// Splitting of a sequence into the modes `|k| <= m` and an ℓ¹ tail bound.
#[derive(Clone, Debug, PartialEq)]
pub struct TailSplit {
    /// Modes `|k| <= m` (zero elsewhere).
    pub finite: FourierVec,
    /// Enclosure of `Σ_{|k|>m} |a_k|`.
    pub tail_norm: RealInterval,
}

impl FourierVec {
    /// The zero sequence with window `[-n, n]`.
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            coeffs: vec![ComplexInterval::ZERO; 2 * n + 1],
        }
    }

    /// Builds a sequence from coefficients ordered `k = -n..=n`.
    pub fn from_coeffs(n: usize, coeffs: Vec<ComplexInterval>) -> Self {
        assert_eq!(coeffs.len(), 2 * n + 1, "coefficient count must be 2N+1");
        Self { n, coeffs }
    }

    /// Builds a point-valued sequence from `(k, re, im)` triples.
    pub fn from_modes(n: usize, modes: &[(i64, f64, f64)]) -> Self {
        let mut v = Self::zeros(n);
        for &(k, re, im) in modes {
            v.set(k, ComplexInterval::point(re, im));
        }
        v
    }

    /// Largest wavenumber of the storage window.
    pub fn max_wavenumber(&self) -> usize {
        self.n
    }

    /// Coefficients ordered `k = -N..=N`.
    pub fn coeffs(&self) -> &[ComplexInterval] {
        &self.coeffs
    }

    /// Coefficient `a_k` (zero outside the window).
    pub fn get(&self, k: i64) -> ComplexInterval {
        if k.unsigned_abs() as usize > self.n {
            ComplexInterval::ZERO
        } else {
            self.coeffs[(k + self.n as i64) as usize]
        }
    }

    /// Sets `a_k`; panics when `k` lies outside the window.
    pub fn set(&mut self, k: i64, v: ComplexInterval) {
        assert!(k.unsigned_abs() as usize <= self.n, "wavenumber outside window");
        self.coeffs[(k + self.n as i64) as usize] = v;
    }

    /// Copy with storage window `[-n, n]`; coefficients beyond it are dropped.
    pub fn resized(&self, n: usize) -> Self {
        let mut out = Self::zeros(n);
        let m = n.min(self.n) as i64;
        for k in -m..=m {
            out.set(k, self.get(k));
        }
        out
    }

    /// Enclosure of the ℓ¹ norm `Σ_k |a_k|`.
    pub fn ell1_norm(&self) -> RealInterval {
        self.coeffs
            .iter()
            .fold(RealInterval::ZERO, |acc, c| acc + c.abs())
    }

    /// Discrete convolution `(a*b)_k = Σ_j a_{k-j} b_j` with support `[-(N_a+N_b), N_a+N_b]`.
    pub fn convolve(&self, other: &Self) -> Self {
        let na = self.n as i64;
        let nb = other.n as i64;
        let mut out = Self::zeros((na + nb) as usize);
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == ComplexInterval::ZERO {
                continue;
            }
            let ka = i as i64 - na;
            for (j, b) in other.coeffs.iter().enumerate() {
                if *b == ComplexInterval::ZERO {
                    continue;
                }
                let kb = j as i64 - nb;
                let idx = (ka + kb + na + nb) as usize;
                out.coeffs[idx] += *a * *b;
            }
        }
        out
    }

    /// Sum with union support.
    pub fn add(&self, other: &Self) -> Self {
        let n = self.n.max(other.n);
        let mut out = Self::zeros(n);
        for k in -(n as i64)..=(n as i64) {
            out.set(k, self.get(k) + other.get(k));
        }
        out
    }

    /// Difference with union support.
    pub fn sub(&self, other: &Self) -> Self {
        let n = self.n.max(other.n);
        let mut out = Self::zeros(n);
        for k in -(n as i64)..=(n as i64) {
            out.set(k, self.get(k) - other.get(k));
        }
        out
    }

    /// Multiplication by a complex scalar.
    pub fn scale(&self, s: ComplexInterval) -> Self {
        Self {
            n: self.n,
            coeffs: self.coeffs.iter().map(|c| *c * s).collect(),
        }
    }

    /// Splits into the modes `|k| <= m` and the ℓ¹ norm of the remainder.
    pub fn project_split(&self, m: usize) -> TailSplit {
        let mut finite = Self::zeros(self.n);
        let mut tail = RealInterval::ZERO;
        for k in -(self.n as i64)..=(self.n as i64) {
            if k.unsigned_abs() as usize <= m {
                finite.set(k, self.get(k));
            } else {
                tail += self.get(k).abs();
            }
        }
        TailSplit {
            finite,
            tail_norm: tail,
        }
    }

    /// Copy with the `k = 0` coefficient set to zero.
    pub fn strip_zero_mode(&self) -> Self {
        let mut out = self.clone();
        out.set(0, ComplexInterval::ZERO);
        out
    }

    /// The Laplacian symbol: `(La)_k = -k² ω² a_k`.
    pub fn apply_laplacian(&self, omega: RealInterval) -> Self {
        let w2 = omega.sqr();
        let mut out = Self::zeros(self.n);
        for k in -(self.n as i64)..=(self.n as i64) {
            let s = -(RealInterval::point((k * k) as f64) * w2);
            out.set(k, self.get(k).scale(s));
        }
        out
    }

    /// Coefficients of the imaginary part of the represented real-variable
    /// function: `c_k = ½[Im a_k + Im a_{-k} - i(Re a_k - Re a_{-k})]`.
    pub fn imaginary_part(&self) -> Self {
        let half = RealInterval::point(0.5);
        let mut out = Self::zeros(self.n);
        for k in -(self.n as i64)..=(self.n as i64) {
            let a = self.get(k);
            let b = self.get(-k);
            let re = (a.im + b.im) * half;
            let im = -((a.re - b.re) * half);
            out.set(k, ComplexInterval::new(re, im));
        }
        out
    }

    /// Midpoints of the coefficients as `(re, im)` pairs ordered `k = -N..=N`.
    pub fn midpoints(&self) -> Vec<(f64, f64)> {
        self.coeffs.iter().map(|c| c.mid()).collect()
    }

    /// True when every coefficient is valid.
    pub fn is_valid(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_valid())
    }
}

/// The initial datum `u_0(x) = 50(1 - cos 2πx)` with `φ_0 = 50`, `φ_{±1} = -25`.
pub fn phi(n: usize) -> FourierVec {
    FourierVec::from_modes(n, &[(0, 50.0, 0.0), (1, -25.0, 0.0), (-1, -25.0, 0.0)])
}
