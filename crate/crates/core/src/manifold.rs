//! Trapping region of the zero equilibrium along a ray `Γ_θ`.
//!
//! Near zero the mode `k = 0` is neutral (the center direction) and every
//! other mode decays at least like `e^{-μt}`, `μ = ω²cosθ` (the stable
//! directions). For radii `r_c`, `r_s` and a Lipschitz constant `ρ` the
//! Lyapunov–Perron map has a fixed point whenever
//! `δ₁, δ₂, δ₄ < μ`, `δ₃/(μ - δ₂) < ρ` and `λ < 1`; every state in
//! `U = {ρ‖x_s‖ < dist(x_c, ∂B_c)}` then converges to zero.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::FourierVec;
use crate::interval::{ComplexInterval, RealInterval};
use crate::model::EquationParams;

/// Default relative inflation of `r_c` by the stable radius.
pub const DEFAULT_MARGIN_RC: f64 = 0.02;

/// Default inflation of `ρ` above the lower root of its feasibility quadratic.
pub const DEFAULT_MARGIN_RHO: f64 = 1.05;

/// Hypothesis constants and verdicts for one choice of radii.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifoldCertificate {
    /// Direction `θ` as given in the input.
    pub theta: String,
    /// `μ = ω² cos θ`.
    pub mu: RealInterval,
    /// Center radius.
    pub r_c: RealInterval,
    /// Stable radius.
    pub r_s: RealInterval,
    /// Lipschitz constant of the graph map.
    pub rho: RealInterval,
    /// `δ₁ = 2r_c + (1 + 2ρ) r_s`.
    pub delta1: RealInterval,
    /// `δ₂ = 2r_c + 2(1 + ρ) r_s`.
    pub delta2: RealInterval,
    /// `δ₃ = 2(ρ(r_c + ρ r_s) + r_s)`.
    pub delta3: RealInterval,
    /// `δ₄ = 2(r_c + 2ρ r_s + r_s)`.
    pub delta4: RealInterval,
    /// Contraction constant `λ`.
    pub lambda: RealInterval,
    /// `λ` evaluated in factored form, for cross-checking.
    pub lambda_factored: RealInterval,
    /// `δ₁ < μ`.
    pub delta1_ok: bool,
    /// `δ₂ < μ`.
    pub delta2_ok: bool,
    /// `δ₄ < μ`.
    pub delta4_ok: bool,
    /// `δ₃ / (μ - δ₂) < ρ`.
    pub rho_ok: bool,
    /// `λ < 1`.
    pub lambda_ok: bool,
    /// State lies in the trapping region; `None` when no state was tested.
    pub membership: Option<bool>,
    /// Lower bound of `dist(x_c, ∂B_c)` used in the membership test.
    pub dist_boundary: Option<RealInterval>,
}

impl ManifoldCertificate {
    /// All hypotheses of the fixed-point theorem hold.
    pub fn hypotheses_hold(&self) -> bool {
        self.delta1_ok && self.delta2_ok && self.delta4_ok && self.rho_ok && self.lambda_ok
    }

    /// The hypotheses hold and the state is in the trapping region.
    pub fn passed(&self) -> bool {
        self.hypotheses_hold() && self.membership == Some(true)
    }
}

fn lt(a: RealInterval, b: RealInterval) -> bool {
    a.is_valid() && b.is_valid() && a.hi < b.lo
}

/// `μ = ω² cos θ`.
pub fn center_gap(params: &EquationParams) -> RealInterval {
    params.mu_center()
}

/// Near-optimal `ρ`: the lower root of `ρ² - bρ + 1/2 = 0`,
/// `b = (μ - 4r_c - 2r_s)/(4r_s)`, inflated by `inflation` and kept below
/// the upper root. This quadratic is `δ₃ < ρ(μ - δ₂)` divided by `4r_s`.
pub fn choose_rho(mu: RealInterval, r_c: RealInterval, r_s: RealInterval, inflation: f64) -> Result<RealInterval> {
    if !(r_s.lo > 0.0) {
        return Err(Error::Domain("stable radius must be positive".into()));
    }
    let four = RealInterval::point(4.0);
    let b = (mu - four * r_c - RealInterval::point(2.0) * r_s) / (four * r_s);
    let disc = b.sqr() - RealInterval::point(2.0);
    if !disc.is_valid() || disc.lo <= 0.0 || b.lo <= 0.0 {
        return Err(Error::Domain(format!(
            "no feasible rho: b = {:e} must exceed sqrt(2)",
            b.mid()
        )));
    }
    let root = RealInterval::ONE / (b + disc.sqrt());
    let upper = (b + disc.sqrt()) * 0.5;
    let rho = RealInterval::point((root.hi * inflation).next_up());
    if !(rho.hi < upper.lo) {
        return Err(Error::Domain("inflated rho leaves the feasible interval".into()));
    }
    Ok(rho)
}

/// Evaluates every constant of the fixed-point theorem.
pub fn hypothesis_check(params: &EquationParams, r_c: RealInterval, r_s: RealInterval, rho: RealInterval) -> ManifoldCertificate {
    let mu = center_gap(params);
    let one = RealInterval::ONE;
    let two = RealInterval::point(2.0);
    let delta1 = two * r_c + (one + two * rho) * r_s;
    let delta2 = two * r_c + two * (one + rho) * r_s;
    let inner = rho * (r_c + rho * r_s) + r_s;
    let delta3 = two * inner;
    let delta4 = two * (r_c + two * rho * r_s + r_s);
    let g1 = mu - delta1;
    let g4 = mu - delta4;
    let lambda = delta3 * (two * r_s) / (g1 * g4) + two * (r_c + rho * r_s) / g1;
    let lambda_factored = (two * (r_c + rho * r_s) * g4 + RealInterval::point(4.0) * inner * r_s) / (g1 * g4);
    ManifoldCertificate {
        theta: params.theta_label.clone(),
        mu,
        r_c,
        r_s,
        rho,
        delta1,
        delta2,
        delta3,
        delta4,
        lambda,
        lambda_factored,
        delta1_ok: lt(delta1, mu),
        delta2_ok: lt(delta2, mu),
        delta4_ok: lt(delta4, mu),
        rho_ok: lt(delta3 / (mu - delta2), rho),
        lambda_ok: lt(lambda, one),
        membership: None,
        dist_boundary: None,
    }
}

/// Rigorous description of a validated state: reference values and error.
#[derive(Clone, Debug)]
pub struct ValidatedState<'a> {
    /// Reference Fourier coefficients.
    pub abar: &'a FourierVec,
    /// ℓ¹ error bound of the true state around `abar`.
    pub eps: RealInterval,
}

/// Radii of the trapping recipe:
/// `r_s = ‖ā^{(s)}‖ + ε` and `r_c = (|ā₀| + ε) + margin · r_s`.
pub fn trapping_radii(state: &ValidatedState<'_>, margin_rc: f64) -> (RealInterval, RealInterval) {
    let eps = RealInterval::point(state.eps.hi);
    let r_s = state.abar.strip_zero_mode().ell1_norm() + eps;
    let a0 = state.abar.get(0).abs() + eps;
    let r_c = a0 + RealInterval::point(margin_rc) * r_s;
    (
        RealInterval::point(r_c.hi),
        RealInterval::point(r_s.hi),
    )
}

/// Builds the radii, chooses `ρ`, checks the hypotheses and tests whether
/// the state lies in the trapping region `U`.
pub fn trapping_membership(
    state: &ValidatedState<'_>,
    params: &EquationParams,
    margin_rc: f64,
    margin_rho: f64,
) -> Result<ManifoldCertificate> {
    let (r_c, r_s) = trapping_radii(state, margin_rc);
    let rho = choose_rho(center_gap(params), r_c, r_s, margin_rho)?;
    let mut cert = hypothesis_check(params, r_c, r_s, rho);
    let eps = RealInterval::point(state.eps.hi);
    let a0: ComplexInterval = state.abar.get(0);
    let abs_up = a0.abs() + eps;
    let re_up = (params.rotation * a0).re + eps;
    let dist = (r_c - abs_up).min(&-re_up);
    let in_bc = re_up.hi <= 0.0 && abs_up.hi <= r_c.lo;
    let trapped = in_bc && (rho * r_s).hi < dist.lo;
    cert.membership = Some(trapped);
    cert.dist_boundary = Some(dist);
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_row_theta_zero() {
        let p = EquationParams::real_time();
        let c = hypothesis_check(&p, RealInterval::point(9.77), RealInterval::point(0.01), RealInterval::point(0.06));
        assert!(c.hypotheses_hold(), "{c:?}");
        assert!(c.lambda.hi <= 0.995);
        assert!(c.lambda.overlaps(&c.lambda_factored));
    }

    #[test]
    fn rho_at_quarter_mu_is_infeasible() {
        let p = EquationParams::real_time();
        let mu = center_gap(&p);
        assert!(choose_rho(mu, mu * 0.25, RealInterval::point(0.01), 1.05).is_err());
    }

    #[test]
    fn scalar_rho_oracle() {
        let (mu, rc, rs) = (20.0f64, 1.0f64, 0.1f64);
        let rho = choose_rho(RealInterval::point(mu), RealInterval::point(rc), RealInterval::point(rs), 1.05).unwrap();
        let b = (mu - 4.0 * rc - 2.0 * rs) / (4.0 * rs);
        let lower = (b - (b * b - 2.0).sqrt()) / 2.0;
        assert!((rho.mid() / lower - 1.05).abs() < 1e-9);
        let d2 = 2.0 * rc + 2.0 * (1.0 + rho.mid()) * rs;
        let d3 = 2.0 * (rho.mid() * (rc + rho.mid() * rs) + rs);
        assert!(d3 / (mu - d2) < rho.mid());
    }

    #[test]
    fn positive_real_part_blocks_membership() {
        let p = EquationParams::real_time();
        let abar = FourierVec::from_modes(2, &[(0, 0.1, 0.0)]);
        let state = ValidatedState {
            abar: &abar,
            eps: RealInterval::point(1e-9),
        };
        let c = trapping_membership(&state, &p, 0.5, 1.05).unwrap();
        assert_eq!(c.membership, Some(false));
    }
}
