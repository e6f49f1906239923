//! Uniform bound of the evolution operator of the linearized problem on one step.
//!
//! The finite modes `|k| <= m` are controlled by the validated fundamental
//! matrices through `W_m`; the tail modes `|k| > m` are controlled by the
//! closed-form constants of this module, which only use `μ_{m+1} =
//! (m+1)²ω²cosθ` and sup-in-time norms of the approximate solution.

use serde::{Deserialize, Serialize};

use crate::cheb::ChebFourier;
use crate::error::{Error, Result};
use crate::interval::{expm1_div, expm1_div2, norm1_2x2, RealInterval};
use crate::model::EquationParams;

/// Pieces used when bounding sup-in-time norms of `ā`.
pub const NORM_PIECES: usize = 8;

/// Closed-form constants controlling the tail modes on one step.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailConstants {
    /// `μ_{m+1} = (m+1)²ω²cosθ`.
    pub mu: RealInterval,
    /// Growth exponent `2‖ā‖_X - μ_{m+1}`.
    pub x: RealInterval,
    /// `W_∞ = (e^{xh} - 1)/x`, bounding `∫_s^t W^{(∞)}(t,τ) dτ`.
    pub w_inf: RealInterval,
    /// `W̄_∞ = (W_∞ - h)/x`, bounding the iterated integral of `W^{(∞)}`.
    pub w_inf_bar: RealInterval,
    /// `W_∞^sup = max(1, e^{xh})`, bounding `sup W^{(∞)}(t,s)`.
    pub w_inf_sup: RealInterval,
    /// `e^{xh}`, bounding `W^{(∞)}(t_hi, t_lo)` over the whole step.
    pub w_inf_step: RealInterval,
    /// `‖ā‖_X = sup_t ‖ā(t)‖_{ℓ¹}`.
    pub a_norm: RealInterval,
    /// `‖ā^{(s)}‖_X`, the same norm without the zero mode.
    pub as_norm: RealInterval,
    /// Step length.
    pub h: RealInterval,
}

/// `W_h` together with the entries of its 2×2 block matrix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolutionBound {
    /// Finite-mode bound `sup ‖Φ‖₁ sup ‖Ψ‖₁`.
    pub w_m: RealInterval,
    /// `κ = 1 - 4 W_m W̄_∞ ‖ā^{(s)}‖_X²`.
    pub kappa: RealInterval,
    /// Block matrix, row by row.
    pub blocks: [[RealInterval; 2]; 2],
    /// `W_h`, the ℓ¹ norm of the block matrix.
    pub w_h: RealInterval,
}

impl TailConstants {
    /// Builds the constants from norms that are already known.
    pub fn from_norms(mu: RealInterval, a_norm: RealInterval, as_norm: RealInterval, h: RealInterval) -> Self {
        let x = RealInterval::point(2.0) * a_norm - mu;
        let w_inf = expm1_div(x, h);
        let w_inf_bar = expm1_div2(x, h);
        let w_inf_step = (x * h).exp();
        let w_inf_sup = if x.hi <= 0.0 {
            RealInterval::ONE
        } else {
            RealInterval::new(w_inf_step.lo.max(1.0), w_inf_step.hi.max(1.0))
        };
        Self {
            mu,
            x,
            w_inf,
            w_inf_bar,
            w_inf_sup,
            w_inf_step,
            a_norm,
            as_norm,
            h,
        }
    }

    /// `κ` for a given finite-mode bound `W_m`.
    pub fn kappa(&self, w_m: RealInterval) -> RealInterval {
        RealInterval::ONE - RealInterval::point(4.0) * w_m * self.w_inf_bar * self.as_norm.sqr()
    }

    /// True when every constant is a valid enclosure.
    pub fn is_valid(&self) -> bool {
        [
            self.mu,
            self.x,
            self.w_inf,
            self.w_inf_bar,
            self.w_inf_sup,
            self.w_inf_step,
            self.a_norm,
            self.as_norm,
            self.h,
        ]
        .iter()
        .all(RealInterval::is_valid)
    }
}

/// Tail constants on the step of `ā` for the splitting at wavenumber `m`.
pub fn tail_constants(abar: &ChebFourier, m: usize, params: &EquationParams) -> Result<TailConstants> {
    let a_norm = abar.sup_norm_refined(NORM_PIECES);
    let as_norm = abar.strip_zero_mode().sup_norm_refined(NORM_PIECES);
    let tc = TailConstants::from_norms(params.mu_tail(m), a_norm, as_norm, abar.step());
    if !tc.is_valid() {
        return Err(Error::Enclosure("tail constants are not finite".into()));
    }
    Ok(tc)
}

/// Assembles `W_h` from `W_m` and the tail constants.
pub fn assemble_wh(w_m: RealInterval, tc: &TailConstants) -> Result<EvolutionBound> {
    let kappa = tc.kappa(w_m);
    if !kappa.is_valid() || kappa.lo <= 0.0 {
        return Err(Error::TailCoupling(kappa.lo));
    }
    let s = tc.as_norm;
    let off = RealInterval::point(2.0) * w_m * tc.w_inf * s / kappa;
    let blocks = [
        [w_m / kappa, off],
        [off, tc.w_inf_sup + RealInterval::point(4.0) * w_m * tc.w_inf.sqr() * s.sqr() / kappa],
    ];
    let w_h = norm1_2x2(blocks);
    if !w_h.is_valid() {
        return Err(Error::Enclosure("evolution bound is not finite".into()));
    }
    Ok(EvolutionBound { w_m, kappa, blocks, w_h })
}

/// Outcome of [`lemma_bounds_check`].
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    /// Number of sampled pairs `(t, s)`.
    pub samples: usize,
    /// Descriptions of every violated inequality.
    pub violations: Vec<String>,
}

impl LemmaReport {
    /// True when no inequality was violated.
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Subintervals of the composite midpoint rule.
const QUAD_PANELS: usize = 64;

/// Composite midpoint rule for `∫_0^L f` with the remainder
/// `L (L/P)² f''(ξ) / 24` enclosed by evaluating `f''` on each panel.
fn midpoint_quadrature(
    len: RealInterval,
    f: impl Fn(RealInterval) -> RealInterval,
    f2: impl Fn(RealInterval) -> RealInterval,
) -> RealInterval {
    if len.hi == 0.0 {
        return RealInterval::ZERO;
    }
    let panels = RealInterval::point(QUAD_PANELS as f64);
    let w = len / panels;
    let mut sum = RealInterval::ZERO;
    let mut curv = RealInterval::ZERO;
    for p in 0..QUAD_PANELS {
        let a = w * RealInterval::point(p as f64);
        let b = w * RealInterval::point((p + 1) as f64);
        let mid = (a + b) * 0.5;
        sum += f(mid);
        let panel = RealInterval::new(a.lo.max(0.0), b.hi);
        curv = curv.hull(&f2(panel));
    }
    let remainder = len * w.sqr() * curv / RealInterval::point(24.0);
    sum * w + remainder
}

/// Checks the three tail inequalities by quadrature for a constant norm
/// profile `‖ā(τ)‖_{ℓ¹} = ‖ā‖_X`, at `samples` pairs `0 <= s <= t <= h`.
///
/// With that profile `W^{(∞)}(t,s) = e^{c(t-s)}`, `c = 2‖ā‖_X - μ_{m+1}`.
/// A violation is reported only when the quadrature enclosure lies strictly
/// above the bound.
pub fn lemma_bounds_check(tc: &TailConstants, samples: usize) -> LemmaReport {
    let c = RealInterval::point(2.0) * RealInterval::point(tc.a_norm.hi) - tc.mu;
    let h = tc.h.hi;
    let mut report = LemmaReport {
        samples,
        violations: Vec::new(),
    };
    for i in 0..samples {
        // Deterministic low-discrepancy pairs, including s = t and the full step.
        let u = if samples > 1 { i as f64 / (samples - 1) as f64 } else { 1.0 };
        let v = ((i as f64) * 0.618_033_988_749_895).fract();
        let t = h * u.max(v);
        let s = h * u.min(v) * if i % 7 == 0 { 1.0 } else { 0.5 };
        let len = RealInterval::point(t) - RealInterval::point(s);
        let len = RealInterval::new(len.lo.max(0.0), len.hi.max(0.0));
        let sup = (c * len).exp().max(&RealInterval::ONE);
        let single = midpoint_quadrature(len, |u| (c * u).exp(), |u| c.sqr() * (c * u).exp());
        let double = midpoint_quadrature(
            len,
            |u| (len - u) * (c * u).exp(),
            |u| (c.sqr() * (len - u) - RealInterval::point(2.0) * c) * (c * u).exp(),
        );
        for (name, value, bound) in [
            ("sup", sup, tc.w_inf_sup),
            ("single integral", single, tc.w_inf),
            ("double integral", double, tc.w_inf_bar),
        ] {
            if value.lo > bound.hi {
                report.violations.push(format!(
                    "{name} at (t, s) = ({t:e}, {s:e}): [{:e}, {:e}] exceeds {:e}",
                    value.lo, value.hi, bound.hi
                ));
            }
        }
    }
    report
}
