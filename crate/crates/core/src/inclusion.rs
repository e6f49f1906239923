//! Local existence on one step: initial error `ε`, defect `δ` and the radius
//! `ϱ` of a ball around `ā` that contains the true solution.
//!
//! With `W_h` bounding the evolution operator, the simplified Newton operator
//! maps the ball of radius `ϱ` into itself whenever
//! `f_ε(ϱ) = W_h [ε + h(2ϱ² + δ)] <= ϱ`, and it contracts when `2 W_h h ϱ < 1`.

use serde::{Deserialize, Serialize};

use crate::cheb::ChebFourier;
use crate::error::{Error, Result};
use crate::fourier::FourierVec;
use crate::interval::{ComplexInterval, RealInterval};
use crate::model::EquationParams;

/// Rigorous bound of `sup_t ‖F(ā)(t)‖_{ℓ¹}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DefectBound {
    /// Total bound `δ`.
    pub delta: RealInterval,
    /// Contribution of the modes `|k| <= N`.
    pub finite: RealInterval,
    /// Contribution of the convolution overflow `N < |k| <= 2N`.
    pub tail: RealInterval,
}

/// Outcome of the local inclusion on one step.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InclusionResult {
    /// Initial error at `t_lo`.
    pub eps: RealInterval,
    /// Defect bound.
    pub delta: RealInterval,
    /// Evolution operator bound.
    pub w_h: RealInterval,
    /// Step length.
    pub h: RealInterval,
    /// Inclusion radius.
    pub rho: RealInterval,
    /// `f_ε(ϱ)`, rigorously at most `ϱ` on success.
    pub f_rho: RealInterval,
    /// Contraction factor `2 W_h h ϱ`.
    pub contraction: RealInterval,
    /// True when both inequalities hold rigorously.
    pub success: bool,
}

/// Bound of `‖a(t_lo) - ā(t_lo)‖_{ℓ¹}` given an enclosure `prev` of the true state.
pub fn initial_error(abar: &ChebFourier, prev: &FourierVec) -> RealInterval {
    prev.sub(&abar.eval_at_start()).ell1_norm()
}

/// Bound of the defect `F(ā) = dā/dt + e^{iθ}k²ω²ā - e^{iθ}(ā*ā)` in the
/// sup-in-time ℓ¹ norm, summing `𝔴_ℓ |F_{ℓ,k}|` with `𝔴_0 = 1`, `𝔴_ℓ = 2`.
pub fn defect_bound(abar: &ChebFourier, params: &EquationParams) -> Result<DefectBound> {
    let nf = abar.fourier_order() as i64;
    let deriv = abar.differentiate();
    let conv = abar.cheb_convolve(abar)?;
    let w2 = params.omega.sqr();
    let rot = params.rotation;
    let two = RealInterval::point(2.0);
    let rows = conv.cheb_order().max(abar.cheb_order());
    let mut finite = RealInterval::ZERO;
    let mut tail = RealInterval::ZERO;
    for l in 0..rows {
        let w = if l == 0 { RealInterval::ONE } else { two };
        for k in -2 * nf..=2 * nf {
            if k.abs() <= nf {
                let lin = abar.get(l, k).scale(w2 * RealInterval::point((k * k) as f64));
                let v = deriv.get(l, k) + rot * (lin - conv.get(l, k));
                finite += v.abs() * w;
            } else {
                tail += conv.get(l, k).abs() * w;
            }
        }
    }
    let delta = finite + tail;
    if !delta.is_valid() {
        return Err(Error::Enclosure("defect bound is not finite".into()));
    }
    Ok(DefectBound { delta, finite, tail })
}

/// `f_ε(ϱ) = W_h [ε + h(2ϱ² + δ)]`.
pub fn f_eps(eps: RealInterval, delta: RealInterval, w_h: RealInterval, h: RealInterval, rho: RealInterval) -> RealInterval {
    w_h * (eps + h * (RealInterval::point(2.0) * rho.sqr() + delta))
}

/// Smallest radius with `f_ε(ϱ) <= ϱ`, from the lower root of
/// `2W_h h ϱ² - ϱ + W_h(ε + hδ) = 0`, re-verified in interval arithmetic.
pub fn solve_radius(eps: RealInterval, delta: RealInterval, w_h: RealInterval, h: RealInterval) -> InclusionResult {
    let up = |x: RealInterval| RealInterval::point(x.hi);
    let (e, d, w, hh) = (up(eps), up(delta), up(w_h), up(h));
    let q = w * (e + hh * d);
    let disc = RealInterval::ONE - RealInterval::point(8.0) * w * hh * q;
    let failed = |rho: RealInterval| InclusionResult {
        eps,
        delta,
        w_h,
        h,
        rho,
        f_rho: RealInterval::INVALID,
        contraction: RealInterval::INVALID,
        success: false,
    };
    if !disc.is_valid() || disc.lo <= 0.0 {
        return failed(RealInterval::INVALID);
    }
    // Stable form of the lower root: 2q / (1 + √disc).
    let root = RealInterval::point(2.0) * q / (RealInterval::ONE + disc.sqrt());
    let rho_hi = if root.hi == 0.0 {
        0.0
    } else {
        (root.hi * (1.0 + 1e-10)).next_up()
    };
    let rho = RealInterval::point(rho_hi);
    let f_rho = f_eps(e, d, w, hh, rho);
    let contraction = RealInterval::point(2.0) * w * hh * rho;
    let success = f_rho.hi <= rho.lo && contraction.hi < 1.0;
    InclusionResult {
        eps,
        delta,
        w_h,
        h,
        rho,
        f_rho,
        contraction,
        success,
    }
}

/// [`solve_radius`] that turns a failed inclusion into an error.
pub fn require_radius(eps: RealInterval, delta: RealInterval, w_h: RealInterval, h: RealInterval) -> Result<InclusionResult> {
    let r = solve_radius(eps, delta, w_h, h);
    if r.success {
        Ok(r)
    } else {
        Err(Error::Inclusion(format!(
            "no radius: eps = {:e}, delta = {:e}, W_h = {:e}, h = {:e}",
            eps.hi, delta.hi, w_h.hi, h.hi
        )))
    }
}

/// Sum of the moduli of `values` as an ℓ¹ norm.
pub fn ell1_of(values: &[ComplexInterval]) -> RealInterval {
    values.iter().fold(RealInterval::ZERO, |s, v| s + v.abs())
}
