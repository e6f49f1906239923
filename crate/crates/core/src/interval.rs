//! Real and complex interval arithmetic with outward rounding.
//!
//! Sums, products and quotients compute the rounding error of each endpoint
//! exactly (two-sum and fused multiply-add) and move an endpoint one unit in the last
//! place outwards only when it was rounded inwards, so exact results such as
//! zero stay exact. Other operations move both endpoints outwards
//! unconditionally.
//!
//! An interval whose endpoints are not finite is *invalid*. Invalid intervals
//! propagate through arithmetic and are rejected by the proof layers.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[inline]
fn down(x: f64) -> f64 {
    x.next_down()
}

#[inline]
fn up(x: f64) -> f64 {
    x.next_up()
}

/// Magnitude below which fused multiply-add errors may be inexact.
const TINY: f64 = 1e-290;

/// Rounding error `(a + b) - fl(a + b)` of a finite sum.
#[inline]
fn two_sum_err(a: f64, b: f64, s: f64) -> f64 {
    let bb = s - a;
    (a - (s - bb)) + (b - bb)
}

#[inline]
fn add_down(a: f64, b: f64) -> f64 {
    let s = a + b;
    if !s.is_finite() {
        return s;
    }
    if two_sum_err(a, b, s) < 0.0 {
        down(s)
    } else {
        s
    }
}

#[inline]
fn add_up(a: f64, b: f64) -> f64 {
    let s = a + b;
    if !s.is_finite() {
        return s;
    }
    if two_sum_err(a, b, s) > 0.0 {
        up(s)
    } else {
        s
    }
}

/// Sign of `a/b - fl(a/b)` for nonzero finite `b`, or `None` when the
/// residual may be inexact.
#[inline]
fn div_err_sign(a: f64, b: f64, q: f64) -> Option<f64> {
    if !q.is_finite() || q.abs() < TINY || a.abs() < TINY {
        return None;
    }
    let r = -q.mul_add(b, -a);
    Some(r * b.signum())
}

#[inline]
fn div_down(a: f64, b: f64) -> f64 {
    let q = a / b;
    if a == 0.0 {
        return q;
    }
    match div_err_sign(a, b, q) {
        Some(e) if e >= 0.0 => q,
        _ => down(q),
    }
}

#[inline]
fn div_up(a: f64, b: f64) -> f64 {
    let q = a / b;
    if a == 0.0 {
        return q;
    }
    match div_err_sign(a, b, q) {
        Some(e) if e <= 0.0 => q,
        _ => up(q),
    }
}

#[inline]
fn mul_down(a: f64, b: f64) -> f64 {
    let p = a * b;
    if !p.is_finite() || a == 0.0 || b == 0.0 {
        return p;
    }
    if p.abs() < TINY {
        return down(p);
    }
    if a.mul_add(b, -p) < 0.0 {
        down(p)
    } else {
        p
    }
}

#[inline]
fn mul_up(a: f64, b: f64) -> f64 {
    let p = a * b;
    if !p.is_finite() || a == 0.0 || b == 0.0 {
        return p;
    }
    if p.abs() < TINY {
        return up(p);
    }
    if a.mul_add(b, -p) > 0.0 {
        up(p)
    } else {
        p
    }
}

/// A closed real interval `[lo, hi]`, serialized as the pair `[lo, hi]`.
#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct RealInterval {
    /// Lower endpoint.
    pub lo: f64,
    /// Upper endpoint.
    pub hi: f64,
}

impl fmt::Debug for RealInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo, self.hi)
    }
}

impl fmt::Display for RealInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl Default for RealInterval {
    fn default() -> Self {
        Self::ZERO
    }
}

impl RealInterval {
    /// The point interval `[0, 0]`.
    pub const ZERO: Self = Self { lo: 0.0, hi: 0.0 };
    /// The point interval `[1, 1]`.
    pub const ONE: Self = Self { lo: 1.0, hi: 1.0 };
    /// The invalid interval produced by overflow or undefined operations.
    pub const INVALID: Self = Self {
        lo: f64::NAN,
        hi: f64::NAN,
    };

    /// Builds `[lo, hi]`; returns the invalid interval if `lo > hi`.
    pub fn new(lo: f64, hi: f64) -> Self {
        if lo <= hi {
            Self { lo, hi }
        } else {
            Self::INVALID
        }
    }

    /// The degenerate interval `[x, x]`.
    pub const fn point(x: f64) -> Self {
        Self { lo: x, hi: x }
    }

    /// The interval `[x - ulp, x + ulp]`, a safe enclosure for a value that
    /// was obtained by a single correctly rounded operation.
    pub fn around(x: f64) -> Self {
        Self::new(down(x), up(x))
    }

    /// `[-r, r]` for `r >= 0`.
    pub fn symmetric(r: f64) -> Self {
        Self::new(-r, r)
    }


    /// True when both endpoints are finite and ordered.
    pub fn is_valid(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite() && self.lo <= self.hi
    }

    /// Returns `self` or an enclosure-failure error when invalid.
    pub fn checked(self, what: &str) -> Result<Self> {
        if self.is_valid() {
            Ok(self)
        } else {
            Err(Error::Enclosure(format!("{what} is not a finite interval")))
        }
    }

    /// Midpoint (rounded to nearest).
    pub fn mid(&self) -> f64 {
        if self.lo == self.hi {
            self.lo
        } else {
            0.5 * self.lo + 0.5 * self.hi
        }
    }

    /// Upper bound of the radius.
    pub fn rad(&self) -> f64 {
        up(0.5 * (self.hi - self.lo))
    }

    /// Upper bound of the width.
    pub fn width(&self) -> f64 {
        up(self.hi - self.lo)
    }

    /// Largest absolute value of a member (exact).
    pub fn mag(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    /// Smallest absolute value of a member (exact).
    pub fn mig(&self) -> f64 {
        if self.lo > 0.0 {
            self.lo
        } else if self.hi < 0.0 {
            -self.hi
        } else {
            0.0
        }
    }

    /// True when `x` lies in the interval.
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// True when `self` is a subset of `other`.
    pub fn subset_of(&self, other: &Self) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    /// True when the two intervals intersect.
    pub fn overlaps(&self, other: &Self) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// Interval hull of two intervals.
    pub fn hull(&self, other: &Self) -> Self {
        Self::new(self.lo.min(other.lo), self.hi.max(other.hi))
    }

    /// Rigorous `self < other` for every pair of members.
    pub fn certainly_lt(&self, other: &Self) -> bool {
        self.hi < other.lo
    }

    /// Rigorous `self <= other` for every pair of members.
    pub fn certainly_le(&self, other: &Self) -> bool {
        self.hi <= other.lo
    }

    /// Rigorously positive.
    pub fn is_positive(&self) -> bool {
        self.lo > 0.0
    }

    /// Enclosure of `|x|`.
    pub fn abs(&self) -> Self {
        Self::new(self.mig(), self.mag())
    }

    /// Enclosure of `x^2` (tighter than `x * x`).
    pub fn sqr(&self) -> Self {
        let lo = self.mig();
        let hi = self.mag();
        Self::new(mul_down(lo, lo).max(0.0), mul_up(hi, hi))
    }

    /// Enclosure of the square root; invalid when the interval is negative.
    pub fn sqrt(&self) -> Self {
        if !(self.hi >= 0.0) {
            return Self::INVALID;
        }
        let base = self.lo.max(0.0);
        let lo = base.sqrt();
        let hi = self.hi.sqrt();
        let lo = if lo.mul_add(lo, -base) == 0.0 { lo } else { down(lo).max(0.0) };
        let hi = if hi.mul_add(hi, -self.hi) == 0.0 { hi } else { up(hi) };
        Self::new(lo, hi)
    }

    /// Enclosure of `e^x`.
    ///
    /// The platform `exp` is faithful to within one ulp; the endpoints are
    /// widened by two ulps to cover that error.
    pub fn exp(&self) -> Self {
        if !self.lo.is_finite() || !self.hi.is_finite() {
            return Self::INVALID;
        }
        let lo = down(down(self.lo.exp())).max(0.0);
        let hi = up(up(self.hi.exp()));
        if !hi.is_finite() {
            return Self::INVALID;
        }
        Self::new(lo, hi)
    }

    /// Enclosure of `1 / x`; invalid when zero is a member.
    pub fn recip(&self) -> Self {
        Self::ONE / *self
    }

    /// Checked division reporting an enclosure failure when `0 ∈ rhs`.
    pub fn checked_div(self, rhs: Self) -> Result<Self> {
        if rhs.contains(0.0) {
            return Err(Error::Enclosure("division by an interval containing 0".into()));
        }
        Ok(self / rhs)
    }

    /// Integer power by repeated multiplication.
    pub fn powi(&self, n: u32) -> Self {
        let mut acc = Self::ONE;
        for _ in 0..n {
            acc = acc * *self;
        }
        if n.is_multiple_of(2) && n > 0 {
            Self::new(acc.lo.max(0.0), acc.hi)
        } else {
            acc
        }
    }

    /// Elementwise maximum of two intervals.
    pub fn max(&self, other: &Self) -> Self {
        Self::new(self.lo.max(other.lo), self.hi.max(other.hi))
    }

    /// Elementwise minimum of two intervals.
    pub fn min(&self, other: &Self) -> Self {
        Self::new(self.lo.min(other.lo), self.hi.min(other.hi))
    }

    /// Enclosure of π.
    pub fn pi() -> Self {
        Self::new(down(std::f64::consts::PI), up(std::f64::consts::PI))
    }

    /// Enclosure of the spatial frequency ω = 2π.
    pub fn two_pi() -> Self {
        Self::new(down(std::f64::consts::TAU), up(std::f64::consts::TAU))
    }

    /// Enclosure of `cos x` for `x ⊂ (-π/2, π/2)`.
    pub fn cos(&self) -> Self {
        let half = std::f64::consts::FRAC_PI_2;
        if !(self.lo > -half && self.hi < half) {
            return Self::INVALID;
        }
        let c_lo = self.lo.cos();
        let c_hi = self.hi.cos();
        let (lo, hi) = if self.lo >= 0.0 {
            (c_hi, c_lo)
        } else if self.hi <= 0.0 {
            (c_lo, c_hi)
        } else {
            (c_lo.min(c_hi), 1.0)
        };
        Self::new(down(down(lo)).max(0.0), up(up(hi)).min(1.0))
    }

    /// Enclosure of `sin x` for `x ⊂ (-π/2, π/2)`.
    pub fn sin(&self) -> Self {
        let half = std::f64::consts::FRAC_PI_2;
        if !(self.lo > -half && self.hi < half) {
            return Self::INVALID;
        }
        Self::new(
            down(down(self.lo.sin())).max(-1.0),
            up(up(self.hi.sin())).min(1.0),
        )
    }
}

impl From<[f64; 2]> for RealInterval {
    fn from(p: [f64; 2]) -> Self {
        Self { lo: p[0], hi: p[1] }
    }
}

impl From<RealInterval> for [f64; 2] {
    fn from(x: RealInterval) -> Self {
        [x.lo, x.hi]
    }
}

impl Add for RealInterval {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(add_down(self.lo, rhs.lo), add_up(self.hi, rhs.hi))
    }
}

impl Sub for RealInterval {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(add_down(self.lo, -rhs.hi), add_up(self.hi, -rhs.lo))
    }
}

impl Mul for RealInterval {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let pairs = [(self.lo, rhs.lo), (self.lo, rhs.hi), (self.hi, rhs.lo), (self.hi, rhs.hi)];
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (x, y) in pairs {
            let (l, h) = (mul_down(x, y), mul_up(x, y));
            if l.is_nan() || h.is_nan() {
                return Self::INVALID;
            }
            lo = lo.min(l);
            hi = hi.max(h);
        }
        Self::new(lo, hi)
    }
}

impl Div for RealInterval {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        if rhs.contains(0.0) || !rhs.is_valid() {
            return Self::INVALID;
        }
        let pairs = [(self.lo, rhs.lo), (self.lo, rhs.hi), (self.hi, rhs.lo), (self.hi, rhs.hi)];
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (x, y) in pairs {
            let (l, h) = (div_down(x, y), div_up(x, y));
            if l.is_nan() || h.is_nan() {
                return Self::INVALID;
            }
            lo = lo.min(l);
            hi = hi.max(h);
        }
        Self::new(lo, hi)
    }
}

impl Neg for RealInterval {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

impl AddAssign for RealInterval {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl SubAssign for RealInterval {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl Add<f64> for RealInterval {
    type Output = Self;
    fn add(self, rhs: f64) -> Self {
        self + Self::point(rhs)
    }
}

impl Mul<f64> for RealInterval {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        self * Self::point(rhs)
    }
}

impl From<f64> for RealInterval {
    fn from(x: f64) -> Self {
        Self::point(x)
    }
}

/// Enclosure of `e^x`.
pub fn exp_real_upper(x: RealInterval) -> RealInterval {
    x.exp()
}

/// Terms kept in the power series of [`expm1_div`] and [`expm1_div2`].
const SERIES_TERMS: u32 = 24;

/// Series `Σ_{j≥0} x^j h^{j+p} / (j+p)!` with a rigorous tail bound, for a
/// point `x` and point `h >= 0` satisfying `|x| h < 1/4`.
fn exp_series_point(x: f64, h: f64, p: u32) -> RealInterval {
    let xi = RealInterval::point(x);
    let hi = RealInterval::point(h);
    let mut fact = RealInterval::ONE;
    for j in 1..=p {
        fact = fact * RealInterval::point(j as f64);
    }
    let mut term = hi.powi(p) / fact;
    let mut sum = term;
    for j in 1..=SERIES_TERMS {
        term = term * xi * hi / RealInterval::point((j + p) as f64);
        sum += term;
    }
    // Tail: |next term| / (1 - |x| h) bounds the remaining sum.
    let y = (RealInterval::point(x.abs()) * hi).hi;
    let next = (term * xi * hi).mag();
    let tail = up(next / down(1.0 - y));
    sum + RealInterval::symmetric(tail)
}

fn expm1_div_point(x: f64, h: f64) -> RealInterval {
    let y = (RealInterval::point(x.abs()) * RealInterval::point(h)).hi;
    if y < 0.25 {
        return exp_series_point(x, h, 1);
    }
    let xi = RealInterval::point(x);
    ((xi * RealInterval::point(h)).exp() - RealInterval::ONE) / xi
}

fn expm1_div2_point(x: f64, h: f64) -> RealInterval {
    let y = (RealInterval::point(x.abs()) * RealInterval::point(h)).hi;
    if y < 0.25 {
        return exp_series_point(x, h, 2);
    }
    let xi = RealInterval::point(x);
    let xh = xi * RealInterval::point(h);
    (xh.exp() - RealInterval::ONE - xh) / xi.sqr()
}

/// Enclosure of `(e^{xh} - 1) / x`, continuous through `x = 0`.
///
/// The function is increasing in both `x` and `h >= 0`, so it suffices to
/// evaluate it rigorously at the two extreme corners.
pub fn expm1_div(x: RealInterval, h: RealInterval) -> RealInterval {
    if !x.is_valid() || !h.is_valid() || h.lo < 0.0 {
        return RealInterval::INVALID;
    }
    let lo = expm1_div_point(x.lo, h.lo);
    let hi = expm1_div_point(x.hi, h.hi);
    RealInterval::new(lo.lo, hi.hi)
}

/// Enclosure of `(e^{xh} - 1 - xh) / x^2`, the double integral
/// `∫_0^h ∫_0^σ e^{xτ} dτ dσ`, continuous through `x = 0`.
pub fn expm1_div2(x: RealInterval, h: RealInterval) -> RealInterval {
    if !x.is_valid() || !h.is_valid() || h.lo < 0.0 {
        return RealInterval::INVALID;
    }
    let lo = expm1_div2_point(x.lo, h.lo);
    let hi = expm1_div2_point(x.hi, h.hi);
    RealInterval::new(lo.lo.max(0.0), hi.hi)
}

/// A rectangular complex interval `re + i·im`.
#[derive(Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ComplexInterval {
    /// Real part.
    pub re: RealInterval,
    /// Imaginary part.
    pub im: RealInterval,
}

impl fmt::Debug for ComplexInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} + i{:?}", self.re, self.im)
    }
}

impl ComplexInterval {
    /// The point `0`.
    pub const ZERO: Self = Self {
        re: RealInterval::ZERO,
        im: RealInterval::ZERO,
    };
    /// The point `1`.
    pub const ONE: Self = Self {
        re: RealInterval::ONE,
        im: RealInterval::ZERO,
    };

    /// Builds a rectangle from its real and imaginary parts.
    pub const fn new(re: RealInterval, im: RealInterval) -> Self {
        Self { re, im }
    }

    /// The degenerate rectangle at `re + i·im`.
    pub const fn point(re: f64, im: f64) -> Self {
        Self {
            re: RealInterval::point(re),
            im: RealInterval::point(im),
        }
    }

    /// A real interval viewed as a complex rectangle.
    pub const fn real(re: RealInterval) -> Self {
        Self {
            re,
            im: RealInterval::ZERO,
        }
    }

    /// Enclosure of `e^{iθ}` for `θ ⊂ (-π/2, π/2)`.
    pub fn cis(theta: RealInterval) -> Self {
        Self::new(theta.cos(), theta.sin())
    }

    /// Both parts valid.
    pub fn is_valid(&self) -> bool {
        self.re.is_valid() && self.im.is_valid()
    }

    /// Midpoint as a pair `(re, im)`.
    pub fn mid(&self) -> (f64, f64) {
        (self.re.mid(), self.im.mid())
    }

    /// Complex conjugate.
    pub fn conj(&self) -> Self {
        Self::new(self.re, -self.im)
    }

    /// Multiplication by a real interval.
    pub fn scale(&self, s: RealInterval) -> Self {
        Self::new(self.re * s, self.im * s)
    }

    /// Enclosure of `|z|` over the rectangle.
    pub fn abs(&self) -> RealInterval {
        (self.re.sqr() + self.im.sqr()).sqrt()
    }

    /// Upper bound of `|z|` over the rectangle.
    pub fn abs_upper(&self) -> f64 {
        self.abs().hi
    }

    /// True when the point `(re, im)` lies in the rectangle.
    pub fn contains(&self, re: f64, im: f64) -> bool {
        self.re.contains(re) && self.im.contains(im)
    }

    /// True when `self` is a subset of `other`.
    pub fn subset_of(&self, other: &Self) -> bool {
        self.re.subset_of(&other.re) && self.im.subset_of(&other.im)
    }

    /// True when the two rectangles intersect.
    pub fn overlaps(&self, other: &Self) -> bool {
        self.re.overlaps(&other.re) && self.im.overlaps(&other.im)
    }

    /// Checked division reporting an enclosure failure when `0 ∈ rhs`.
    pub fn checked_div(self, rhs: Self) -> Result<Self> {
        let d = rhs.re.sqr() + rhs.im.sqr();
        if d.lo <= 0.0 {
            return Err(Error::Enclosure("complex division by a rectangle containing 0".into()));
        }
        Ok(self / rhs)
    }
}

impl Add for ComplexInterval {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl Sub for ComplexInterval {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl Mul for ComplexInterval {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::new(
            self.re * rhs.re - self.im * rhs.im,
            self.re * rhs.im + self.im * rhs.re,
        )
    }
}

impl Div for ComplexInterval {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let d = rhs.re.sqr() + rhs.im.sqr();
        if d.lo <= 0.0 {
            return Self::new(RealInterval::INVALID, RealInterval::INVALID);
        }
        let num = self * rhs.conj();
        Self::new(num.re / d, num.im / d)
    }
}

impl Neg for ComplexInterval {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.re, -self.im)
    }
}

impl AddAssign for ComplexInterval {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl SubAssign for ComplexInterval {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl Mul<RealInterval> for ComplexInterval {
    type Output = Self;
    fn mul(self, rhs: RealInterval) -> Self {
        self.scale(rhs)
    }
}

/// A dense row-major matrix of complex intervals.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<ComplexInterval>,
}

impl IntervalMatrix {
    /// The zero matrix.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ComplexInterval::ZERO; rows * cols],
        }
    }

    /// The identity matrix.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, ComplexInterval::ONE);
        }
        m
    }

    /// Builds a matrix from complex point values given row by row.
    pub fn from_points(rows: usize, cols: usize, values: &[(f64, f64)]) -> Self {
        assert_eq!(values.len(), rows * cols, "matrix shape mismatch");
        Self {
            rows,
            cols,
            data: values.iter().map(|&(r, i)| ComplexInterval::point(r, i)).collect(),
        }
    }

    /// Number of rows.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of columns.
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Entry `(i, j)`.
    pub fn get(&self, i: usize, j: usize) -> ComplexInterval {
        self.data[i * self.cols + j]
    }

    /// Sets entry `(i, j)`.
    pub fn set(&mut self, i: usize, j: usize, v: ComplexInterval) {
        self.data[i * self.cols + j] = v;
    }

    /// Mutable access to entry `(i, j)`.
    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut ComplexInterval {
        &mut self.data[i * self.cols + j]
    }

    /// Interval matrix product.
    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == ComplexInterval::ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if b == ComplexInterval::ZERO {
                        continue;
                    }
                    let e = out.get_mut(i, j);
                    *e += a * b;
                }
            }
        }
        out
    }

    /// Enclosure of the entrywise absolute values.
    pub fn abs_entries(&self) -> Vec<RealInterval> {
        self.data.iter().map(|z| z.abs()).collect()
    }

    /// Induced ℓ¹ norm: the largest column sum of entry moduli.
    ///
    /// The upper endpoint is a rigorous upper bound of the norm of every
    /// matrix contained in `self`.
    pub fn norm1_upper(&self) -> RealInterval {
        let mut best = RealInterval::ZERO;
        for j in 0..self.cols {
            let mut s = RealInterval::ZERO;
            for i in 0..self.rows {
                s += self.get(i, j).abs();
            }
            best = best.max(&s);
        }
        best
    }
}

/// Induced ℓ¹ norm of a real 2×2 matrix given row by row.
pub fn norm1_2x2(m: [[RealInterval; 2]; 2]) -> RealInterval {
    let c0 = m[0][0].abs() + m[1][0].abs();
    let c1 = m[0][1].abs() + m[1][1].abs();
    c0.max(&c1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_rotation_is_exact_i() {
        let z = ComplexInterval::point(1.0, 0.0) * ComplexInterval::point(0.0, 1.0);
        assert!(z.contains(0.0, 1.0));
        assert!(z.re.mag() < 1e-300);
    }

    #[test]
    fn modulus_squared_is_real() {
        let a = ComplexInterval::point(1.0, 1.0);
        let p = a * a.conj();
        assert!(p.re.contains(2.0));
        assert!(p.im.contains(0.0));
    }

    #[test]
    fn rectangle_product_matches_corner_enumeration() {
        let a = ComplexInterval::new(RealInterval::new(1.0, 2.0), RealInterval::new(0.0, 1.0));
        let b = ComplexInterval::point(3.0, 0.0);
        let p = a * b;
        let mut re = (f64::INFINITY, f64::NEG_INFINITY);
        let mut im = (f64::INFINITY, f64::NEG_INFINITY);
        for x in [1.0, 2.0] {
            for y in [0.0, 1.0] {
                re = (re.0.min(3.0 * x), re.1.max(3.0 * x));
                im = (im.0.min(3.0 * y), im.1.max(3.0 * y));
            }
        }
        assert!(p.re.contains(re.0) && p.re.contains(re.1));
        assert!(p.im.contains(im.0) && p.im.contains(im.1));
        assert!(p.re.lo > 2.99 && p.re.hi < 6.01);
        assert!(p.im.lo > -0.01 && p.im.hi < 3.01);
    }

    #[test]
    fn division_by_zero_is_an_error() {
        let z = ComplexInterval::new(RealInterval::new(-1.0, 1.0), RealInterval::ZERO);
        assert!(ComplexInterval::ONE.checked_div(z).is_err());
        assert!(RealInterval::ONE.checked_div(RealInterval::new(-1.0, 1.0)).is_err());
        assert!(!(RealInterval::ONE / RealInterval::new(0.0, 1.0)).is_valid());
    }

    #[test]
    fn expm1_div_limits() {
        let v = expm1_div(RealInterval::ZERO, RealInterval::ONE);
        assert!(v.contains(1.0));
        assert!(v.width() < 1e-14);
        let w = expm1_div(RealInterval::point(-1.0), RealInterval::ONE);
        let exact = 1.0 - (-1.0f64).exp();
        assert!(w.contains(exact));
        assert!((w.mid() - 0.632_120_558_828_557_7).abs() < 1e-14);
        let e = exp_real_upper(RealInterval::ZERO);
        assert!(e.contains(1.0));
    }

    #[test]
    fn expm1_div_straddling_zero_is_finite() {
        let v = expm1_div(RealInterval::new(-1e-3, 2e-3), RealInterval::point(2.5e-3));
        assert!(v.is_valid());
        assert!(v.contains(2.5e-3));
        let w = expm1_div2(RealInterval::new(-1e-3, 2e-3), RealInterval::point(2.5e-3));
        assert!(w.contains(2.5e-3 * 2.5e-3 / 2.0));
    }

    #[test]
    fn expm1_div2_matches_direct_formula_away_from_zero() {
        let x = 3.0;
        let h = 0.5;
        let v = expm1_div2(RealInterval::point(x), RealInterval::point(h));
        let direct = ((x * h).exp() - 1.0 - x * h) / (x * x);
        assert!((v.mid() - direct).abs() < 1e-13);
    }

    #[test]
    fn overflow_is_invalid() {
        let e = RealInterval::point(1000.0).exp();
        assert!(!e.is_valid());
        assert!(e.checked("exp").is_err());
    }

    #[test]
    fn norm1_examples() {
        let id = IntervalMatrix::identity(3);
        assert!(id.norm1_upper().contains(1.0));
        let m = IntervalMatrix::from_points(2, 2, &[(0.0, 0.0), (2.0, 0.0), (1.0, 0.0), (0.0, 0.0)]);
        assert!(m.norm1_upper().contains(2.0));
        let z = IntervalMatrix::zeros(2, 3);
        assert!(z.norm1_upper().contains(0.0));
    }

    #[test]
    fn pi_and_trig_enclosures() {
        let pi = RealInterval::pi();
        assert!(pi.lo < std::f64::consts::PI || pi.hi > std::f64::consts::PI);
        let third = pi / RealInterval::point(3.0);
        let c = third.cos();
        assert!(c.contains(0.5));
        let s = third.sin();
        assert!(s.contains(3f64.sqrt() / 2.0) || s.width() < 1e-15);
        assert!(!RealInterval::point(2.0).cos().is_valid());
    }
}
