//! Chains validated steps along a piecewise linear contour in complex time.
//!
//! Each segment is a ray piece `z = z_start + s e^{iθ}`, `0 <= s <= length`,
//! on which the equation reads `a' = e^{iθ}(-k²ω² a + a*a)` in the local
//! parameter `s`. Every step produces a [`StepCertificate`] whose constants
//! let an independent checker replay the point-wise error recursion
//! `ε_i = W_t ε_{i-1} + W_J h (2ϱ² + δ) + ε̂_i`.

use serde::{Deserialize, Serialize};

use crate::approx::{solve_step, SolveConfig};
use crate::cheb::ChebFourier;
use crate::error::{Error, Result};
use crate::evolution::{assemble_wh, tail_constants, EvolutionBound, TailConstants};
use crate::fourier::FourierVec;
use crate::inclusion::{defect_bound, f_eps, initial_error, solve_radius, InclusionResult};
use crate::interval::{norm1_2x2, RealInterval};
use crate::model::EquationParams;
use crate::variational::{validate_pair, ChebMatrix};

/// Decay rates tried, in order, when validating the fundamental matrices.
pub const NU_RETRIES: [f64; 3] = [2.0, 3.0, 1.2];

/// Halvings of the step length tried before raising `m`.
pub const MAX_HALVINGS: usize = 6;

/// Default smallest step as a fraction of the nominal step length.
pub const MIN_H_RATIO: f64 = 1.0 / 4096.0;

/// Relative distance to the segment end below which a step is snapped to it.
const SNAP: f64 = 1e-12;

/// One straight piece of the contour.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    /// Direction of the piece.
    pub params: EquationParams,
    /// Length of the piece in the local parameter `s`.
    pub length: f64,
    /// Nominal step length.
    pub h: f64,
    /// Fourier truncation `N` of the approximate solution.
    pub nf: usize,
    /// Chebyshev order `n` of the approximate solution and of `Φ`, `Ψ`.
    pub n: usize,
    /// Splitting wavenumber `m` between validated and tail modes.
    pub m: usize,
    /// Preferred Chebyshev decay rate for the validation of `Φ`, `Ψ`.
    pub nu: f64,
}

/// Ordered contour pieces.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ContourSchedule {
    /// Contiguous pieces.
    pub segments: Vec<Segment>,
}

/// Settings shared by all steps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepperOptions {
    /// Relative Newton tolerance of the approximate solver.
    pub tol: f64,
    /// Newton iteration limit of the approximate solver.
    pub max_iter: usize,
    /// Halvings of `h` before raising `m`.
    pub max_halvings: usize,
    /// Number of times `m` may be raised by 2 after the halvings are exhausted.
    pub m_raises: usize,
    /// Overall limit on validated steps.
    pub max_steps: usize,
    /// Growth factor of the step length after a successful shortened step.
    pub growth: f64,
    /// Smallest admissible step as a fraction of the nominal `h`.
    pub min_h_ratio: f64,
}

impl Default for StepperOptions {
    fn default() -> Self {
        Self {
            tol: 1e-13,
            max_iter: 40,
            max_halvings: MAX_HALVINGS,
            m_raises: 1,
            max_steps: usize::MAX,
            growth: 2.0,
            min_h_ratio: MIN_H_RATIO,
        }
    }
}

/// `W_J` and `W_t` with their block matrices.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EndpointBounds {
    /// Bound of `sup_s ‖U(t_hi, s)‖`.
    pub w_j: RealInterval,
    /// Bound of `‖U(t_hi, t_lo)‖`.
    pub w_t: RealInterval,
    /// Block matrix of `W_J`, row by row.
    pub w_j_blocks: [[RealInterval; 2]; 2],
    /// Block matrix of `W_t`, row by row.
    pub w_t_blocks: [[RealInterval; 2]; 2],
}

/// Norms of the validated fundamental matrices used by the step bounds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixNorms {
    /// `sup_t ‖Φ(t)‖₁`.
    pub phi_sup: RealInterval,
    /// `sup_s ‖Ψ(s)‖₁`.
    pub psi_sup: RealInterval,
    /// `‖Φ(t_hi)‖₁`.
    pub phi_end: RealInterval,
    /// Decay rate at which the validation succeeded.
    pub nu: f64,
    /// Largest validation radius among the columns of `Φ` and `Ψᵀ`.
    pub max_radius: f64,
}

/// Record of one validated step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepCertificate {
    /// Step number, starting at 1.
    pub index: usize,
    /// Index of the contour piece.
    pub segment: usize,
    /// Direction `θ` as given in the input.
    pub theta: String,
    /// Enclosure of `θ`.
    pub theta_enclosure: RealInterval,
    /// Local parameter at the start of the step.
    pub s_lo: f64,
    /// Local parameter at the end of the step.
    pub s_hi: f64,
    /// Arclength along the whole contour at the end of the step.
    pub t: f64,
    /// Complex time at the end of the step, rounded to nearest.
    pub z_end: (f64, f64),
    /// Step length.
    pub h: RealInterval,
    /// Fourier truncation.
    pub nf: usize,
    /// Chebyshev order.
    pub n: usize,
    /// Splitting wavenumber.
    pub m: usize,
    /// Norms of `Φ` and `Ψ`.
    pub norms: MatrixNorms,
    /// Tail constants.
    pub tail: TailConstants,
    /// Evolution operator bound.
    pub evolution: EvolutionBound,
    /// Defect bound `δ`.
    pub delta: RealInterval,
    /// Error bound at the start of the step relative to `ā(t_lo)`.
    pub eps_in: RealInterval,
    /// Local inclusion.
    pub inclusion: InclusionResult,
    /// `W_J` and `W_t`.
    pub endpoint: EndpointBounds,
    /// `W_t ε_in + W_J h (2ϱ² + δ)`: error at `t_hi` relative to `ā(t_hi)`.
    pub eps_end: RealInterval,
    /// Mismatch between `ā(t_hi)` and the next approximation at its start.
    pub eps_hat: RealInterval,
    /// `ε_end + ε̂`: error relative to the next approximation.
    pub eps_out: RealInterval,
    /// `‖ā^{(s)}(t_hi)‖_{ℓ¹}` upper bound, for reporting.
    pub end_norm: RealInterval,
    /// Number of failed attempts before this step succeeded.
    pub retries: usize,
}

/// A step together with the approximation it validated.
#[derive(Clone, Debug)]
pub struct ValidatedStep {
    /// Certificate.
    pub cert: StepCertificate,
    /// Approximate solution on the step.
    pub abar: ChebFourier,
}

/// `W_J` and `W_t` from the fundamental matrix norms and tail constants.
pub fn endpoint_bounds(norms: &MatrixNorms, tc: &TailConstants, ev: &EvolutionBound) -> EndpointBounds {
    let two = RealInterval::point(2.0);
    let four = RealInterval::point(4.0);
    let s = tc.as_norm;
    let h = tc.h;
    let w_m = ev.w_m;
    let kappa = ev.kappa;
    let tail_tail = |lead: RealInterval| lead + four * w_m * tc.w_inf.sqr() * s.sqr() / kappa;
    let tail_fin = two * w_m * tc.w_inf * s / kappa;
    let fin_fin = RealInterval::ONE + four * h * w_m * tc.w_inf * s.sqr() / kappa;
    let fin_tail = two * h * norms.psi_sup * s * tail_tail(tc.w_inf_sup);
    let w_j_blocks = [
        [norms.phi_end * norms.psi_sup * fin_fin, norms.phi_end * fin_tail],
        [tail_fin, tail_tail(tc.w_inf_sup)],
    ];
    let fin_fin_t = RealInterval::ONE + four * h * norms.psi_sup * w_m * tc.w_inf * s.sqr() / kappa;
    let w_t_blocks = [
        [norms.phi_end * fin_fin_t, norms.phi_end * fin_tail],
        [tail_fin, tail_tail(tc.w_inf_step)],
    ];
    EndpointBounds {
        w_j: norm1_2x2(w_j_blocks),
        w_t: norm1_2x2(w_t_blocks),
        w_j_blocks,
        w_t_blocks,
    }
}

/// `ε̂ = ‖ā_prev(t_hi) - ā_next(t_lo)‖_{ℓ¹}`.
pub fn endpoint_mismatch(prev: &ChebFourier, next: &ChebFourier) -> Result<RealInterval> {
    if prev.t_hi != next.t_lo {
        return Err(Error::Domain(format!(
            "steps are not adjacent: {} != {}",
            prev.t_hi, next.t_lo
        )));
    }
    Ok(prev.eval_at_end().sub(&next.eval_at_start()).ell1_norm())
}

/// `ε_end = W_t ε_in + W_J h (2ϱ² + δ)`.
pub fn propagate_error(
    w_t: RealInterval,
    w_j: RealInterval,
    h: RealInterval,
    eps_in: RealInterval,
    rho: RealInterval,
    delta: RealInterval,
) -> RealInterval {
    w_t * eps_in + w_j * h * (RealInterval::point(2.0) * rho.sqr() + delta)
}

/// Validates `Φ`, `Ψ` and collects their norms.
pub fn matrix_norms(abar: &ChebFourier, m: usize, n: usize, nu: f64, params: &EquationParams) -> Result<(MatrixNorms, ChebMatrix, ChebMatrix)> {
    let mut nus = vec![nu];
    nus.extend(NU_RETRIES.iter().copied().filter(|v| *v != nu));
    let (phi, psi) = validate_pair(abar, m, n, &nus, params)?;
    let max_radius = phi.radii.iter().chain(psi.radii.iter()).fold(0.0f64, |a, b| a.max(*b));
    let norms = MatrixNorms {
        phi_sup: phi.sup_norm1(),
        psi_sup: psi.sup_norm1(),
        phi_end: phi.end_norm1(),
        nu: phi.nu,
        max_radius,
    };
    Ok((norms, phi, psi))
}

/// Input of [`validate_step`].
#[derive(Clone, Debug)]
pub struct StepInput<'a> {
    /// Rigorous reference state at `s_lo`.
    pub state: &'a FourierVec,
    /// Error of the true state relative to `state`.
    pub eps: RealInterval,
    /// Direction and constants.
    pub params: &'a EquationParams,
    /// Step start in the local parameter.
    pub s_lo: f64,
    /// Step end in the local parameter.
    pub s_hi: f64,
    /// Fourier truncation.
    pub nf: usize,
    /// Chebyshev order.
    pub n: usize,
    /// Splitting wavenumber.
    pub m: usize,
    /// Preferred decay rate.
    pub nu: f64,
}

/// Runs every bound on one step. The certificate's contour bookkeeping
/// (`index`, `segment`, `t`, `z_end`, `eps_hat`, `retries`) is left for the caller.
pub fn validate_step(input: &StepInput<'_>, opts: &StepperOptions) -> Result<ValidatedStep> {
    let params = input.params;
    if input.m > input.nf {
        return Err(Error::Config("m must not exceed N".into()));
    }
    let cfg = SolveConfig {
        nf: input.nf,
        n: input.n,
        theta: params.theta_f64(),
        omega: params.omega_f64(),
        t_lo: input.s_lo,
        t_hi: input.s_hi,
        tol: opts.tol,
        max_iter: opts.max_iter,
    };
    let start = input.state.resized(input.nf).midpoints();
    let abar = solve_step(&start, &cfg)?;
    let eps_in = input.eps + initial_error(&abar, input.state);
    let (norms, _, _) = matrix_norms(&abar, input.m, input.n, input.nu, params)?;
    let w_m = norms.phi_sup * norms.psi_sup;
    let tc = tail_constants(&abar, input.m, params)?;
    let ev = assemble_wh(w_m, &tc)?;
    let defect = defect_bound(&abar, params)?;
    let h = abar.step();
    let inclusion = solve_radius(eps_in, defect.delta, ev.w_h, h);
    if !inclusion.success {
        return Err(Error::Inclusion(format!(
            "f(rho) <= rho fails: eps = {:e}, delta = {:e}, W_h = {:e}, h = {:e}",
            eps_in.hi, defect.delta.hi, ev.w_h.hi, h.hi
        )));
    }
    let endpoint = endpoint_bounds(&norms, &tc, &ev);
    let eps_end = propagate_error(endpoint.w_t, endpoint.w_j, h, eps_in, inclusion.rho, defect.delta);
    if !eps_end.is_valid() {
        return Err(Error::Enclosure("endpoint error is not finite".into()));
    }
    let end_norm = abar.eval_at_end().strip_zero_mode().ell1_norm();
    let cert = StepCertificate {
        index: 0,
        segment: 0,
        theta: params.theta_label.clone(),
        theta_enclosure: params.theta,
        s_lo: input.s_lo,
        s_hi: input.s_hi,
        t: input.s_hi,
        z_end: (0.0, 0.0),
        h,
        nf: input.nf,
        n: input.n,
        m: input.m,
        norms,
        tail: tc,
        evolution: ev,
        delta: defect.delta,
        eps_in,
        inclusion,
        endpoint,
        eps_end,
        eps_hat: RealInterval::ZERO,
        eps_out: eps_end,
        end_norm,
        retries: 0,
    };
    debug_assert!(w_m == compute_wm_from(&norms));
    Ok(ValidatedStep { cert, abar })
}

fn compute_wm_from(norms: &MatrixNorms) -> RealInterval {
    norms.phi_sup * norms.psi_sup
}

/// What the caller wants after a step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flow {
    /// Keep integrating.
    Continue,
    /// Stop after this step.
    Stop,
}

/// Why a contour run ended.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum RunEnd {
    /// Every segment was validated.
    Completed,
    /// The step hook asked to stop.
    Stopped,
    /// The step limit was reached.
    StepLimit,
    /// A step failed after all retries.
    Failed {
        /// Index the failing step would have had.
        index: usize,
        /// Local parameter where it started.
        s_lo: f64,
        /// Last error.
        reason: String,
    },
}

/// Result of [`run_contour`].
#[derive(Clone, Debug)]
pub struct ContourRun {
    /// Certificates of all validated steps.
    pub certificates: Vec<StepCertificate>,
    /// Approximation of the last validated step.
    pub last: Option<ChebFourier>,
    /// How the run ended.
    pub end: RunEnd,
    /// Error bound of the initial data.
    pub eps0: RealInterval,
}

impl ContourRun {
    /// Rigorous state at the last validated endpoint: the reference values
    /// `ā(t_hi)` and the error `ε_end`.
    pub fn final_state(&self) -> Option<(FourierVec, RealInterval)> {
        let last = self.last.as_ref()?;
        let cert = self.certificates.last()?;
        Some((last.eval_at_end(), cert.eps_end))
    }
}

/// Snaps a tentative step end to the segment end when it is within rounding distance.
fn step_end(s: f64, h: f64, length: f64) -> f64 {
    let e = s + h;
    if e >= length || length - e <= SNAP * length {
        length
    } else {
        e
    }
}

/// Integrates `u0` (with initial error `eps0`) along the schedule.
///
/// After every validated step `on_step` receives the certificate and the
/// approximation; returning [`Flow::Stop`] ends the run. A failing step is
/// retried with `h` halved up to `max_halvings` times (never below
/// `min_h_ratio` times the nominal `h`), then with `m + 2`
/// (again with halvings) up to `m_raises` times. After a shortened step the
/// next step length grows by `growth`, capped at the nominal `h`.
pub fn run_contour(
    u0: &FourierVec,
    eps0: RealInterval,
    schedule: &ContourSchedule,
    opts: &StepperOptions,
    mut on_step: impl FnMut(&StepCertificate, &ChebFourier) -> Flow,
) -> Result<ContourRun> {
    let mut run = ContourRun {
        certificates: Vec::new(),
        last: None,
        end: RunEnd::Completed,
        eps0,
    };
    let mut state = u0.clone();
    let mut eps = eps0;
    let mut t_offset = 0.0;
    let mut z0 = (0.0f64, 0.0f64);
    for (si, seg) in schedule.segments.iter().enumerate() {
        if !(seg.length > 0.0) || !(seg.h > 0.0) {
            return Err(Error::Config(format!("segment {si} needs positive length and h")));
        }
        let (sin, cos) = seg.params.theta_f64().sin_cos();
        let mut s = 0.0;
        let mut h = seg.h;
        while s < seg.length {
            if run.certificates.len() >= opts.max_steps {
                run.end = RunEnd::StepLimit;
                return Ok(run);
            }
            let mut attempt_h = h;
            let mut m = seg.m;
            let mut halvings = 0;
            let mut raises = 0;
            let mut retries = 0;
            let min_h = seg.h * opts.min_h_ratio;
            let step = loop {
                let s_hi = step_end(s, attempt_h, seg.length);
                let input = StepInput {
                    state: &state,
                    eps,
                    params: &seg.params,
                    s_lo: s,
                    s_hi,
                    nf: seg.nf,
                    n: seg.n,
                    m: m.min(seg.nf),
                    nu: seg.nu,
                };
                match validate_step(&input, opts) {
                    Ok(v) => break Ok(v),
                    Err(e) => {
                        retries += 1;
                        if halvings < opts.max_halvings && attempt_h * 0.5 >= min_h {
                            halvings += 1;
                            attempt_h *= 0.5;
                        } else if raises < opts.m_raises && m + 2 <= seg.nf {
                            raises += 1;
                            m += 2;
                            halvings = 0;
                            attempt_h = h;
                        } else {
                            break Err(e);
                        }
                    }
                }
            };
            let mut v = match step {
                Ok(v) => v,
                Err(e) => {
                    run.end = RunEnd::Failed {
                        index: run.certificates.len() + 1,
                        s_lo: s,
                        reason: e.to_string(),
                    };
                    return Ok(run);
                }
            };
            if let (Some(prev_cert), Some(prev)) = (run.certificates.last_mut(), run.last.as_ref()) {
                let hat = prev.eval_at_end().sub(&v.abar.eval_at_start()).ell1_norm();
                prev_cert.eps_hat = hat;
                prev_cert.eps_out = prev_cert.eps_end + hat;
            }
            let used = v.cert.s_hi - v.cert.s_lo;
            v.cert.index = run.certificates.len() + 1;
            v.cert.segment = si;
            v.cert.t = t_offset + v.cert.s_hi;
            v.cert.z_end = (z0.0 + v.cert.s_hi * cos, z0.1 + v.cert.s_hi * sin);
            v.cert.retries = retries;
            s = v.cert.s_hi;
            h = if used < h { (used * opts.growth).min(seg.h) } else { seg.h };
            state = v.abar.eval_at_end();
            eps = v.cert.eps_end;
            let flow = on_step(&v.cert, &v.abar);
            run.certificates.push(v.cert);
            run.last = Some(v.abar);
            if flow == Flow::Stop {
                run.end = RunEnd::Stopped;
                return Ok(run);
            }
        }
        t_offset += seg.length;
        z0 = (z0.0 + seg.length * cos, z0.1 + seg.length * sin);
    }
    Ok(run)
}

/// Outcome of replaying a certificate chain.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ReplayReport {
    /// Certificates checked.
    pub checked: usize,
    /// Failed checks, one message each.
    pub failures: Vec<String>,
}

impl ReplayReport {
    /// True when nothing failed.
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl StepCertificate {
    /// Re-checks every inequality of the step from the stored constants alone.
    pub fn replay(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut fail = |msg: String| out.push(format!("step {}: {msg}", self.index));
        let tc = &self.tail;
        let recomputed_tc = TailConstants::from_norms(tc.mu, tc.a_norm, tc.as_norm, tc.h);
        if recomputed_tc != *tc {
            fail("tail constants do not match their norms".into());
        }
        if self.h != tc.h {
            fail("step length differs from the tail constants".into());
        }
        let w_m = self.norms.phi_sup * self.norms.psi_sup;
        if w_m != self.evolution.w_m {
            fail("W_m differs from the product of the matrix norms".into());
        }
        match assemble_wh(w_m, tc) {
            Ok(ev) if ev == self.evolution => {}
            Ok(_) => fail("evolution bound does not replay".into()),
            Err(e) => fail(format!("evolution bound: {e}")),
        }
        let inc = &self.inclusion;
        if inc.eps != self.eps_in || inc.delta != self.delta || inc.w_h != self.evolution.w_h || inc.h != self.h {
            fail("inclusion inputs differ from the step constants".into());
        }
        let up = |x: RealInterval| RealInterval::point(x.hi);
        let f = f_eps(up(inc.eps), up(inc.delta), up(inc.w_h), up(inc.h), inc.rho);
        if !(f.hi <= inc.rho.lo) {
            fail(format!("f(rho) = {:e} exceeds rho = {:e}", f.hi, inc.rho.lo));
        }
        let c = RealInterval::point(2.0) * up(inc.w_h) * up(inc.h) * inc.rho;
        if !(c.hi < 1.0) {
            fail(format!("contraction factor {:e} is not below 1", c.hi));
        }
        if !inc.success {
            fail("inclusion flag is not set".into());
        }
        let ep = endpoint_bounds(&self.norms, tc, &self.evolution);
        if ep != self.endpoint {
            fail("W_J / W_t do not replay".into());
        }
        let eps_end = propagate_error(ep.w_t, ep.w_j, self.h, self.eps_in, inc.rho, self.delta);
        if eps_end != self.eps_end {
            fail("endpoint error does not replay".into());
        }
        if self.eps_end + self.eps_hat != self.eps_out {
            fail("outgoing error is not eps_end + eps_hat".into());
        }
        if !(self.s_lo < self.s_hi) {
            fail("empty step".into());
        }
        out
    }
}

/// Replays every certificate and the error chain between consecutive steps.
pub fn replay_chain(certs: &[StepCertificate], eps0: RealInterval) -> ReplayReport {
    let mut report = ReplayReport::default();
    for (i, c) in certs.iter().enumerate() {
        report.failures.extend(c.replay());
        report.checked += 1;
        if c.index != i + 1 {
            report.failures.push(format!("step {}: expected index {}", c.index, i + 1));
        }
        match i.checked_sub(1).map(|j| &certs[j]) {
            None => {
                if c.eps_in.hi < eps0.hi {
                    report.failures.push(format!("step {}: incoming error below eps0", c.index));
                }
            }
            Some(p) => {
                if c.eps_in.hi < p.eps_out.hi {
                    report.failures.push(format!(
                        "step {}: incoming error {:e} below previous outgoing {:e}",
                        c.index, c.eps_in.hi, p.eps_out.hi
                    ));
                }
                if p.segment == c.segment && p.s_hi != c.s_lo {
                    report.failures.push(format!("step {}: not adjacent to the previous step", c.index));
                }
                if p.segment != c.segment && c.s_lo != 0.0 {
                    report.failures.push(format!("step {}: new segment does not start at 0", c.index));
                }
            }
        }
    }
    if let Some(last) = certs.last() {
        if last.eps_hat != RealInterval::ZERO || last.eps_out != last.eps_end {
            report.failures.push(format!("step {}: last step carries a mismatch", last.index));
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::ComplexInterval;

    fn small_schedule(theta: &str, steps: usize, h: f64) -> ContourSchedule {
        ContourSchedule {
            segments: vec![Segment {
                params: EquationParams::from_expr(theta).unwrap(),
                length: h * steps as f64,
                h,
                nf: 4,
                n: 8,
                m: 1,
                nu: 1.5,
            }],
        }
    }

    #[test]
    fn zero_data_stays_zero() {
        let run = run_contour(
            &FourierVec::zeros(4),
            RealInterval::ZERO,
            &small_schedule("pi/3", 3, 0.01),
            &StepperOptions::default(),
            |_, _| Flow::Continue,
        )
        .unwrap();
        assert_eq!(run.end, RunEnd::Completed);
        assert_eq!(run.certificates.len(), 3);
        for c in &run.certificates {
            assert_eq!(c.eps_end.hi, 0.0);
            assert_eq!(c.inclusion.rho.hi, 0.0);
        }
        assert!(replay_chain(&run.certificates, RealInterval::ZERO).passed());
    }

    #[test]
    fn small_data_chain_replays() {
        let u0 = FourierVec::from_modes(4, &[(1, 0.5, 0.0), (-1, 0.5, 0.0)]);
        let run = run_contour(
            &u0,
            RealInterval::ZERO,
            &small_schedule("pi/4", 4, 0.005),
            &StepperOptions::default(),
            |_, _| Flow::Continue,
        )
        .unwrap();
        assert_eq!(run.end, RunEnd::Completed, "{:?}", run.end);
        let r = replay_chain(&run.certificates, RealInterval::ZERO);
        assert!(r.passed(), "{:?}", r.failures);
    }

    #[test]
    fn dissipative_state_contracts_the_error() {
        // A negative mean damps the zero mode, so every mode decays.
        let u0 = FourierVec::from_modes(4, &[(0, -2.0, 0.0), (1, 0.05, 0.0), (-1, 0.05, 0.0)]);
        let eps0 = RealInterval::point(1e-3);
        let run = run_contour(&u0, eps0, &small_schedule("pi/4", 4, 0.01), &StepperOptions::default(), |_, _| Flow::Continue).unwrap();
        assert_eq!(run.end, RunEnd::Completed, "{:?}", run.end);
        let mut prev = eps0.hi;
        for c in &run.certificates {
            assert!(c.endpoint.w_t.hi < 1.0, "W_t = {}", c.endpoint.w_t.hi);
            assert!(c.eps_end.hi < prev);
            prev = c.eps_out.hi;
        }
    }

    #[test]
    fn mismatch_single_mode() {
        let a = ChebFourier::from_points(0.0, 1.0, 1, 1, &[(0.0, 0.0), (1.0, 0.0), (0.0, 0.0)]);
        let mut b = ChebFourier::from_points(1.0, 2.0, 1, 1, &[(0.0, 0.0), (1.0, 0.0), (0.0, 0.0)]);
        b.set(0, 1, ComplexInterval::point(1e-6, 0.0));
        let e = endpoint_mismatch(&a, &b).unwrap();
        assert!(e.contains(1e-6));
        assert!(endpoint_mismatch(&b, &a).is_err());
    }

    #[test]
    fn decoupled_endpoint_bounds() {
        let tc = TailConstants::from_norms(RealInterval::point(39.0), RealInterval::point(1.0), RealInterval::ZERO, RealInterval::point(0.01));
        let ev = assemble_wh(RealInterval::point(1.0), &tc).unwrap();
        let norms = MatrixNorms {
            phi_sup: RealInterval::ONE,
            psi_sup: RealInterval::ONE,
            phi_end: RealInterval::ONE,
            nu: 1.5,
            max_radius: 0.0,
        };
        let ep = endpoint_bounds(&norms, &tc, &ev);
        assert!(ep.w_t.contains(1.0));
        assert!(ep.w_j.contains(1.0));
        assert!(ep.w_t.hi <= ep.w_j.hi);
    }
}
