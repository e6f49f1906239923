//! Proof orchestration: contour runs, the branching check on the real axis,
//! the global-existence loop and the real-time blow-up lower bound.
//!
//! Every pipeline returns a [`ProofOutcome`]; [`output::write_outcome`]
//! stores it as one certificate file per step plus a summary, and
//! [`output::verify_dir`] re-checks such a directory without integrating.

pub mod config;
pub mod output;

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::approx::{solve_step, SolveConfig};
use crate::cheb::ChebFourier;
use crate::error::{Error, Result};
use crate::fourier::FourierVec;
use crate::interval::RealInterval;
use crate::manifold::{trapping_membership, ManifoldCertificate, ValidatedState};
use crate::model::EquationParams;
use crate::stepper::{
    replay_chain, run_contour, validate_step, ContourRun, ContourSchedule, Flow, ReplayReport, RunEnd, StepCertificate,
    StepInput, ValidatedStep,
};

pub use config::{PipelineKind, ProofConfig};

/// Final verdict of a pipeline.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// Every inequality of the proof holds rigorously.
    Proved,
    /// The run ended without a proof.
    Inconclusive,
}

impl Verdict {
    /// Process exit code: 0 for a proof, 2 otherwise.
    pub fn exit_code(self) -> i32 {
        match self {
            Self::Proved => 0,
            Self::Inconclusive => 2,
        }
    }
}

/// Trapping region certificate together with the state it was evaluated on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifoldRecord {
    /// Step after which the state was tested; 0 for the initial datum.
    pub step: usize,
    /// Path parameter of the state.
    pub t: f64,
    /// Equation parameters of the ray.
    pub params: EquationParams,
    /// Reference state.
    pub state: FourierVec,
    /// ℓ¹ error bound around `state`.
    pub eps: RealInterval,
    /// `r_c` margin used.
    pub margin_rc: f64,
    /// `ρ` inflation used.
    pub margin_rho: f64,
    /// Approximation of the last step, whose endpoint is `state`.
    pub abar: Option<ChebFourier>,
    /// Hypothesis constants and verdicts.
    pub certificate: ManifoldCertificate,
}

/// Imaginary-part check at the end of the branching contour.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchingRecord {
    /// End point `z_C` of the contour.
    pub z_c: (f64, f64),
    /// Reference state at `z_C`.
    pub state: FourierVec,
    /// ℓ¹ error bound `ε^{z_C}`.
    pub eps: RealInterval,
    /// `‖Im ū(z_C)‖` of the reference state.
    pub im_norm: RealInterval,
    /// `‖Im ū(z_C)‖ - ε^{z_C}`, a lower bound of the true imaginary part.
    pub margin: RealInterval,
    /// Approximation of the last contour step.
    pub abar: ChebFourier,
    /// Last validated real time of the real-axis run.
    pub t_lower: Option<f64>,
}

/// Summary record of a pipeline run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    /// Pipeline that produced the run.
    pub pipeline: PipelineKind,
    /// Verdict.
    pub verdict: Verdict,
    /// One-line human-readable conclusion.
    pub message: String,
    /// Validated steps on the main contour.
    pub steps: usize,
    /// Path parameter of the last validated step.
    pub t_final: f64,
    /// Complex time of the last validated step.
    pub z_final: (f64, f64),
    /// Error bound of the initial datum.
    pub eps0: RealInterval,
    /// Endpoint error of the last validated step.
    pub eps_final: Option<RealInterval>,
    /// How the main run ended.
    pub end: RunEnd,
    /// Validated steps of the real-axis run, when there is one.
    pub real_steps: Option<usize>,
    /// How the real-axis run ended.
    pub real_end: Option<RunEnd>,
    /// Last validated real time (blow-up lower bound).
    pub t_lower: Option<f64>,
    /// Replay of the main certificate chain.
    pub replay: ReplayReport,
    /// Wall-clock time in seconds.
    pub elapsed_secs: f64,
}

/// Everything a pipeline produced.
#[derive(Clone, Debug)]
pub struct ProofOutcome {
    /// Summary record.
    pub summary: Summary,
    /// Main contour run.
    pub run: ContourRun,
    /// Real-axis run of the branching pipeline.
    pub real_run: Option<ContourRun>,
    /// Trapping certificate of the global pipeline.
    pub manifold: Option<ManifoldRecord>,
    /// Imaginary-part check of the branching pipeline.
    pub branching: Option<BranchingRecord>,
}

impl ProofOutcome {
    /// Verdict of the run.
    pub fn verdict(&self) -> Verdict {
        self.summary.verdict
    }
}

fn base_summary(kind: PipelineKind, run: &ContourRun, started: Instant) -> Summary {
    let last = run.certificates.last();
    Summary {
        pipeline: kind,
        verdict: Verdict::Inconclusive,
        message: String::new(),
        steps: run.certificates.len(),
        t_final: last.map_or(0.0, |c| c.t),
        z_final: last.map_or((0.0, 0.0), |c| c.z_end),
        eps0: run.eps0,
        eps_final: last.map(|c| c.eps_end),
        end: run.end.clone(),
        real_steps: None,
        real_end: None,
        t_lower: None,
        replay: replay_chain(&run.certificates, run.eps0),
        elapsed_secs: started.elapsed().as_secs_f64(),
    }
}

fn describe_end(end: &RunEnd) -> String {
    match end {
        RunEnd::Completed => "contour completed".into(),
        RunEnd::Stopped => "stopped by the pipeline".into(),
        RunEnd::StepLimit => "step limit reached".into(),
        RunEnd::Failed { index, s_lo, reason } => format!("step {index} at s = {s_lo} failed: {reason}"),
    }
}

fn require_segments(schedule: &ContourSchedule, what: &str) -> Result<()> {
    if schedule.segments.is_empty() {
        return Err(Error::Config(format!("the {what} needs at least one [[segment]]")));
    }
    Ok(())
}

/// Integrates the configured contour and reports whether it completed.
pub fn prove_contour(cfg: &ProofConfig, mut observe: impl FnMut(&StepCertificate)) -> Result<ProofOutcome> {
    let started = Instant::now();
    let (u0, eps0) = cfg.initial_state()?;
    let schedule = cfg.schedule()?;
    require_segments(&schedule, "contour pipeline")?;
    let run = run_contour(&u0, eps0, &schedule, &cfg.stepper_options(), |c, _| {
        observe(c);
        Flow::Continue
    })?;
    let mut summary = base_summary(PipelineKind::Contour, &run, started);
    if run.end == RunEnd::Completed && summary.replay.passed() {
        summary.verdict = Verdict::Proved;
        summary.message = format!(
            "validated {} steps to z = ({}, {}) with eps = {:e}",
            summary.steps,
            summary.z_final.0,
            summary.z_final.1,
            summary.eps_final.map_or(eps0.hi, |e| e.hi)
        );
    } else {
        summary.message = describe_end(&run.end);
    }
    Ok(ProofOutcome {
        summary,
        run,
        real_run: None,
        manifold: None,
        branching: None,
    })
}

fn real_time_run(
    u0: &FourierVec,
    eps0: RealInterval,
    schedule: &ContourSchedule,
    cfg: &ProofConfig,
    observe: &mut impl FnMut(&StepCertificate),
) -> Result<ContourRun> {
    for seg in &schedule.segments {
        if seg.params.theta != RealInterval::ZERO {
            return Err(Error::Config("the blow-up lower bound runs in real time and needs theta = 0".into()));
        }
    }
    run_contour(u0, eps0, schedule, &cfg.stepper_options(), |c, _| {
        observe(c);
        Flow::Continue
    })
}

/// Integrates in real time until the first unrecoverable failure and reports
/// the last validated time.
pub fn blowup_lower_bound(cfg: &ProofConfig, mut observe: impl FnMut(&StepCertificate)) -> Result<ProofOutcome> {
    let started = Instant::now();
    let (u0, eps0) = cfg.initial_state()?;
    let schedule = cfg.schedule()?;
    require_segments(&schedule, "blow-up pipeline")?;
    let run = real_time_run(&u0, eps0, &schedule, cfg, &mut observe)?;
    let mut summary = base_summary(PipelineKind::BlowupBound, &run, started);
    let t_lower = run.certificates.last().map_or(0.0, |c| c.t);
    summary.t_lower = Some(t_lower);
    if t_lower > 0.0 && summary.replay.passed() {
        summary.verdict = Verdict::Proved;
        summary.message = format!("solution exists on [0, {t_lower}]; {}", describe_end(&run.end));
    } else {
        summary.message = format!("no real-time step validated; {}", describe_end(&run.end));
    }
    Ok(ProofOutcome {
        summary,
        run,
        real_run: None,
        manifold: None,
        branching: None,
    })
}

/// Integrates along the bent contour, checks that the imaginary part at the
/// real end point `z_C` is rigorously nonzero, and bounds the blow-up time
/// from below by a real-time run.
pub fn prove_branching(cfg: &ProofConfig, mut observe: impl FnMut(&StepCertificate)) -> Result<ProofOutcome> {
    let started = Instant::now();
    let (u0, eps0) = cfg.initial_state()?;
    let schedule = cfg.schedule()?;
    require_segments(&schedule, "branching pipeline")?;
    let real_schedule = cfg.real_schedule()?;
    let run = run_contour(&u0, eps0, &schedule, &cfg.stepper_options(), |c, _| {
        observe(c);
        Flow::Continue
    })?;
    let mut summary = base_summary(PipelineKind::Branching, &run, started);
    let branching = match (&run.end, run.final_state(), run.last.as_ref()) {
        (RunEnd::Completed, Some((state, eps)), Some(abar)) => {
            let im_norm = state.imaginary_part().ell1_norm();
            Some(BranchingRecord {
                z_c: summary.z_final,
                state,
                eps,
                im_norm,
                margin: im_norm - RealInterval::point(eps.hi),
                abar: abar.clone(),
                t_lower: None,
            })
        }
        _ => None,
    };
    let real_run = if real_schedule.segments.is_empty() {
        None
    } else {
        Some(real_time_run(&u0, eps0, &real_schedule, cfg, &mut observe)?)
    };
    let t_lower = real_run.as_ref().and_then(|r| r.certificates.last().map(|c| c.t));
    summary.real_steps = real_run.as_ref().map(|r| r.certificates.len());
    summary.real_end = real_run.as_ref().map(|r| r.end.clone());
    summary.t_lower = t_lower;
    let real_replay = real_run.as_ref().is_none_or(|r| replay_chain(&r.certificates, r.eps0).passed());
    let mut branching = branching;
    if let Some(b) = branching.as_mut() {
        b.t_lower = t_lower;
    }
    summary.elapsed_secs = started.elapsed().as_secs_f64();
    summary.message = match (&branching, t_lower) {
        (None, _) => format!("contour not completed: {}", describe_end(&run.end)),
        (Some(b), _) if b.z_c.1.abs() > 1e-12 * b.z_c.0.abs() => {
            format!("contour ends at ({}, {}), off the real axis", b.z_c.0, b.z_c.1)
        }
        (Some(b), _) if b.margin.lo <= 0.0 => {
            format!("imaginary part is not certified: margin = [{:e}, {:e}]", b.margin.lo, b.margin.hi)
        }
        (Some(_), None) => "no real-time step validated for the lower bound".into(),
        (Some(b), Some(t)) if t >= b.z_c.0 => format!("real-time run reached {t}, beyond z_C = {}", b.z_c.0),
        (Some(_), Some(_)) if !summary.replay.passed() || !real_replay => "certificate replay failed".into(),
        (Some(b), Some(t)) => {
            summary.verdict = Verdict::Proved;
            format!(
                "branching singularity in ({t}, {}); Im margin in [{}, {}], eps = {:e}",
                b.z_c.0, b.margin.lo, b.margin.hi, b.eps.hi
            )
        }
    };
    Ok(ProofOutcome {
        summary,
        run,
        real_run,
        manifold: None,
        branching,
    })
}

fn test_state(
    step: usize,
    t: f64,
    params: &EquationParams,
    state: FourierVec,
    eps: RealInterval,
    (margin_rc, margin_rho): (f64, f64),
    abar: Option<&ChebFourier>,
) -> Option<ManifoldRecord> {
    let vs = ValidatedState { abar: &state, eps };
    let certificate = trapping_membership(&vs, params, margin_rc, margin_rho).ok()?;
    if !certificate.passed() {
        return None;
    }
    Some(ManifoldRecord {
        step,
        t,
        params: params.clone(),
        state,
        eps,
        margin_rc,
        margin_rho,
        abar: abar.cloned(),
        certificate,
    })
}

/// The datum is exactly zero. It lies on the boundary of the center ball, so
/// the trapping test cannot accept it, but it is an equilibrium.
pub fn is_zero_equilibrium(u0: &FourierVec, eps0: RealInterval) -> bool {
    eps0.hi == 0.0 && u0.ell1_norm().hi == 0.0
}

/// Integrates along the ray until the validated state enters the trapping
/// region of the zero equilibrium.
pub fn prove_global(cfg: &ProofConfig, mut observe: impl FnMut(&StepCertificate)) -> Result<ProofOutcome> {
    let started = Instant::now();
    let (u0, eps0) = cfg.initial_state()?;
    let schedule = cfg.schedule()?;
    require_segments(&schedule, "global pipeline")?;
    let margins = (cfg.margin_rc()?, cfg.margin_rho()?);
    let first = schedule.segments[0].params.clone();
    let equilibrium = is_zero_equilibrium(&u0, eps0);
    let mut found = test_state(0, 0.0, &first, u0.clone(), eps0, margins, None);
    let run = if found.is_some() || equilibrium {
        ContourRun {
            certificates: Vec::new(),
            last: None,
            end: RunEnd::Stopped,
            eps0,
        }
    } else {
        run_contour(&u0, eps0, &schedule, &cfg.stepper_options(), |c, abar| {
            observe(c);
            let params = &schedule.segments[c.segment].params;
            found = test_state(c.index, c.t, params, abar.eval_at_end(), c.eps_end, margins, Some(abar));
            if found.is_some() {
                Flow::Stop
            } else {
                Flow::Continue
            }
        })?
    };
    let mut summary = base_summary(PipelineKind::Global, &run, started);
    match &found {
        Some(rec) if summary.replay.passed() => {
            summary.verdict = Verdict::Proved;
            let c = &rec.certificate;
            summary.message = format!(
                "global existence on theta = {}, solution tends to 0: trapped after step {} at t = {} \
                 (r_c = {:.6}, r_s = {:.6}, rho = {:.6}, lambda = {:.6})",
                rec.params.theta_label,
                rec.step,
                rec.t,
                c.r_c.hi,
                c.r_s.hi,
                c.rho.hi,
                c.lambda.hi
            );
        }
        Some(_) => summary.message = "certificate replay failed".into(),
        None if equilibrium => {
            summary.verdict = Verdict::Proved;
            summary.message = "initial datum is the zero equilibrium".into();
        }
        None => summary.message = format!("state never trapped; {}", describe_end(&run.end)),
    }
    Ok(ProofOutcome {
        summary,
        run,
        real_run: None,
        manifold: found,
        branching: None,
    })
}

/// Runs the pipeline named in the configuration.
pub fn run_pipeline(cfg: &ProofConfig, observe: impl FnMut(&StepCertificate)) -> Result<ProofOutcome> {
    match cfg.pipeline {
        PipelineKind::Contour => prove_contour(cfg, observe),
        PipelineKind::Branching => prove_branching(cfg, observe),
        PipelineKind::Global => prove_global(cfg, observe),
        PipelineKind::BlowupBound => blowup_lower_bound(cfg, observe),
    }
}

/// Nonrigorous approximation on the first step of the first segment.
pub fn approximate_first_step(cfg: &ProofConfig) -> Result<ChebFourier> {
    let (u0, _) = cfg.initial_state()?;
    let schedule = cfg.schedule()?;
    let seg = schedule
        .segments
        .first()
        .ok_or_else(|| Error::Config("no [[segment]] given".into()))?;
    let solve = SolveConfig {
        nf: seg.nf,
        n: seg.n,
        theta: seg.params.theta_f64(),
        omega: seg.params.omega_f64(),
        t_lo: 0.0,
        t_hi: seg.h.min(seg.length),
        tol: cfg.solver.tol,
        max_iter: cfg.solver.max_iter,
    };
    solve_step(&u0.resized(seg.nf).midpoints(), &solve)
}

/// Validates the first step of the first segment, without retries.
pub fn validate_first_step(cfg: &ProofConfig) -> Result<ValidatedStep> {
    let (u0, eps0) = cfg.initial_state()?;
    let schedule = cfg.schedule()?;
    let seg = schedule
        .segments
        .first()
        .ok_or_else(|| Error::Config("no [[segment]] given".into()))?;
    let input = StepInput {
        state: &u0,
        eps: eps0,
        params: &seg.params,
        s_lo: 0.0,
        s_hi: seg.h.min(seg.length),
        nf: seg.nf,
        n: seg.n,
        m: seg.m,
        nu: seg.nu,
    };
    let mut step = validate_step(&input, &cfg.stepper_options())?;
    step.cert.index = 1;
    Ok(step)
}
