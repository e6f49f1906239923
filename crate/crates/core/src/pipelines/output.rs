//! Certificate files, independent verification and CSV export.
//!
//! An output directory holds
//!
//! * `config.toml`: the configuration of the run;
//! * `summary.json`: the [`Summary`];
//! * `steps/step_00001.json`, ...: one [`StepCertificate`] per step;
//! * `real/step_00001.json`, ...: the real-axis run of the branching pipeline;
//! * `manifold.json` or `branching.json`: the closing check of the proof.
//!
//! Interval endpoints are stored as `[lo, hi]` pairs of shortest round-trip
//! decimals, so reading a file back reproduces every bound bit for bit.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::config::{PipelineKind, ProofConfig};
use super::{BranchingRecord, ManifoldRecord, ProofOutcome, Summary, Verdict};
use crate::cheb::ChebFourier;
use crate::error::Result;
use crate::inclusion::defect_bound;
use crate::interval::RealInterval;
use crate::manifold::{trapping_membership, ValidatedState};
use crate::model::EquationParams;
use crate::stepper::{replay_chain, StepCertificate};

/// File name of the summary record.
pub const SUMMARY_FILE: &str = "summary.json";
/// File name of the trapping record.
pub const MANIFOLD_FILE: &str = "manifold.json";
/// File name of the branching record.
pub const BRANCHING_FILE: &str = "branching.json";
/// File name of the stored configuration.
pub const CONFIG_FILE: &str = "config.toml";
/// Directory of the main certificate chain.
pub const STEPS_DIR: &str = "steps";
/// Directory of the real-axis certificate chain.
pub const REAL_DIR: &str = "real";

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut f = fs::File::create(path)?;
    serde_json::to_writer_pretty(&mut f, value)?;
    f.write_all(b"\n")?;
    Ok(())
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Name of the certificate file of step `index`.
pub fn step_file_name(index: usize) -> String {
    format!("step_{index:05}.json")
}

/// Writes one certificate file per step into `dir`, replacing older step files.
pub fn write_certificates(dir: &Path, certs: &[StepCertificate]) -> Result<()> {
    if dir.exists() {
        for entry in fs::read_dir(dir)? {
            let path = entry?.path();
            let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default();
            if name.starts_with("step_") && name.ends_with(".json") {
                fs::remove_file(&path)?;
            }
        }
    }
    fs::create_dir_all(dir)?;
    for c in certs {
        write_json(&dir.join(step_file_name(c.index)), c)?;
    }
    Ok(())
}

/// Reads the certificate files of `dir` in step order.
pub fn read_certificates(dir: &Path) -> Result<Vec<StepCertificate>> {
    if !dir.exists() {
        return Ok(Vec::new());
    }
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<_>>()?;
    paths.retain(|p| {
        p.file_name()
            .and_then(|n| n.to_str())
            .is_some_and(|n| n.starts_with("step_") && n.ends_with(".json"))
    });
    paths.sort();
    paths.iter().map(|p| read_json(p)).collect()
}

/// Writes every record of `outcome` into `dir`.
pub fn write_outcome(dir: &Path, outcome: &ProofOutcome, cfg: &ProofConfig) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(CONFIG_FILE), cfg.to_toml()?)?;
    write_certificates(&dir.join(STEPS_DIR), &outcome.run.certificates)?;
    if let Some(real) = &outcome.real_run {
        write_certificates(&dir.join(REAL_DIR), &real.certificates)?;
    }
    for (name, present) in [(MANIFOLD_FILE, outcome.manifold.is_some()), (BRANCHING_FILE, outcome.branching.is_some())] {
        if !present && dir.join(name).exists() {
            fs::remove_file(dir.join(name))?;
        }
    }
    if let Some(m) = &outcome.manifold {
        write_json(&dir.join(MANIFOLD_FILE), m)?;
    }
    if let Some(b) = &outcome.branching {
        write_json(&dir.join(BRANCHING_FILE), b)?;
    }
    write_json(&dir.join(SUMMARY_FILE), &outcome.summary)
}

/// Writes the approximation of one step as JSON.
pub fn write_approximation(path: &Path, abar: &ChebFourier) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    write_json(path, abar)
}

/// Result of [`verify_dir`].
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    /// Certificates of the main chain checked.
    pub steps: usize,
    /// Certificates of the real-axis chain checked.
    pub real_steps: usize,
    /// Verdict claimed by the summary.
    pub claimed: Option<Verdict>,
    /// Failed checks.
    pub failures: Vec<String>,
}

impl VerifyReport {
    /// True when every check passed.
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn shape_ok(abar: &ChebFourier) -> bool {
    abar.coeffs().len() == abar.cheb_order() * (2 * abar.fourier_order() + 1) && abar.cheb_order() >= 1
}

/// Checks that `abar` is the approximation behind certificate `cert`: same
/// time interval, a defect within the stored bound, and `state` its endpoint.
fn check_final_step(
    abar: &ChebFourier,
    cert: &StepCertificate,
    params: &EquationParams,
    state: &crate::fourier::FourierVec,
    what: &str,
    failures: &mut Vec<String>,
) {
    if !shape_ok(abar) {
        failures.push(format!("{what}: stored approximation is malformed"));
        return;
    }
    if abar.t_lo != cert.s_lo || abar.t_hi != cert.s_hi || abar.fourier_order() != cert.nf {
        failures.push(format!("{what}: approximation does not belong to step {}", cert.index));
    }
    if abar.eval_at_end() != *state {
        failures.push(format!("{what}: state is not the endpoint of the approximation"));
    }
    if params.theta != cert.theta_enclosure {
        failures.push(format!("{what}: direction differs from step {}", cert.index));
    }
    match defect_bound(abar, params) {
        Ok(d) if d.delta.hi <= cert.delta.hi => {}
        Ok(d) => failures.push(format!(
            "{what}: recomputed defect {:e} exceeds the stored bound {:e}",
            d.delta.hi, cert.delta.hi
        )),
        Err(e) => failures.push(format!("{what}: defect bound failed: {e}")),
    }
}

fn verify_manifold(rec: &ManifoldRecord, steps: &[StepCertificate], summary: &Summary, failures: &mut Vec<String>) {
    let state = ValidatedState {
        abar: &rec.state,
        eps: rec.eps,
    };
    match trapping_membership(&state, &rec.params, rec.margin_rc, rec.margin_rho) {
        Ok(c) if c == rec.certificate => {}
        Ok(_) => failures.push("manifold: certificate does not recompute".into()),
        Err(e) => failures.push(format!("manifold: {e}")),
    }
    if !rec.certificate.passed() {
        failures.push("manifold: trapping check does not pass".into());
    }
    if rec.step == 0 {
        if rec.eps.hi < summary.eps0.hi {
            failures.push("manifold: error bound below eps0".into());
        }
        return;
    }
    let Some(cert) = steps.get(rec.step - 1) else {
        failures.push(format!("manifold: step {} is missing", rec.step));
        return;
    };
    if rec.step != steps.len() {
        failures.push("manifold: trapping step is not the last step".into());
    }
    if rec.eps.hi < cert.eps_end.hi {
        failures.push("manifold: error bound below the step's endpoint error".into());
    }
    match &rec.abar {
        Some(abar) => check_final_step(abar, cert, &rec.params, &rec.state, "manifold", failures),
        None => failures.push("manifold: approximation of the last step is missing".into()),
    }
}

fn verify_branching(
    rec: &BranchingRecord,
    steps: &[StepCertificate],
    real: &[StepCertificate],
    cfg: Option<&ProofConfig>,
    failures: &mut Vec<String>,
) {
    let Some(last) = steps.last() else {
        failures.push("branching: no contour steps".into());
        return;
    };
    let margin = rec.state.imaginary_part().ell1_norm() - RealInterval::point(rec.eps.hi);
    if margin != rec.margin {
        failures.push("branching: imaginary margin does not recompute".into());
    }
    if !(rec.margin.lo > 0.0) {
        failures.push("branching: imaginary margin is not positive".into());
    }
    if rec.eps.hi < last.eps_end.hi {
        failures.push("branching: error bound below the last endpoint error".into());
    }
    if rec.z_c != last.z_end || rec.z_c.1.abs() > 1e-12 * rec.z_c.0.abs() {
        failures.push("branching: z_C is not the real end of the contour".into());
    }
    match real.last() {
        Some(r) if Some(r.t) == rec.t_lower && r.t < rec.z_c.0 => {}
        _ => failures.push("branching: real-time lower bound missing or beyond z_C".into()),
    }
    if real.iter().any(|c| c.theta_enclosure != RealInterval::ZERO) {
        failures.push("branching: real-axis chain leaves the real axis".into());
    }
    let params = match cfg.and_then(|c| c.schedule().ok()).and_then(|s| s.segments.get(last.segment).cloned()) {
        Some(seg) => seg.params,
        None => match EquationParams::new(last.theta.clone(), last.theta_enclosure) {
            Ok(p) => p,
            Err(e) => {
                failures.push(format!("branching: {e}"));
                return;
            }
        },
    };
    check_final_step(&rec.abar, last, &params, &rec.state, "branching", failures);
}

fn verify_initial(cfg: &ProofConfig, summary: &Summary, steps: &[StepCertificate], failures: &mut Vec<String>) {
    match cfg.initial_state() {
        Ok((_, eps0)) if eps0.hi <= summary.eps0.hi => {}
        Ok(_) => failures.push("summary: eps0 below the configured value".into()),
        Err(e) => failures.push(format!("config: {e}")),
    }
    if cfg.pipeline != summary.pipeline {
        failures.push("summary: pipeline differs from the configuration".into());
    }
    if let Ok(schedule) = cfg.schedule() {
        for c in steps {
            match schedule.segments.get(c.segment) {
                Some(seg) if seg.params.theta == c.theta_enclosure && c.s_hi <= seg.length => {}
                _ => failures.push(format!("step {}: not on the configured contour", c.index)),
            }
        }
    }
}

fn zero_datum(cfg: Option<&ProofConfig>) -> bool {
    cfg.and_then(|c| c.initial_state().ok())
        .is_some_and(|(u0, eps0)| super::is_zero_equilibrium(&u0, eps0))
}

/// Re-checks an output directory from its stored constants alone.
pub fn verify_dir(dir: &Path) -> Result<VerifyReport> {
    let summary: Summary = read_json(&dir.join(SUMMARY_FILE))?;
    let cfg = match dir.join(CONFIG_FILE) {
        p if p.exists() => Some(ProofConfig::load(&p)?),
        _ => None,
    };
    let steps = read_certificates(&dir.join(STEPS_DIR))?;
    let real = read_certificates(&dir.join(REAL_DIR))?;
    let mut report = VerifyReport {
        steps: steps.len(),
        real_steps: real.len(),
        claimed: Some(summary.verdict),
        failures: Vec::new(),
    };
    let failures = &mut report.failures;
    failures.extend(replay_chain(&steps, summary.eps0).failures);
    failures.extend(
        replay_chain(&real, summary.eps0)
            .failures
            .into_iter()
            .map(|f| format!("real-axis {f}")),
    );
    if summary.steps != steps.len() {
        failures.push(format!("summary: {} steps claimed, {} found", summary.steps, steps.len()));
    }
    if summary.eps_final != steps.last().map(|c| c.eps_end) {
        failures.push("summary: final error differs from the last certificate".into());
    }
    if let Some(cfg) = &cfg {
        verify_initial(cfg, &summary, &steps, failures);
    }
    if summary.verdict == Verdict::Proved {
        match summary.pipeline {
            PipelineKind::Global => match read_json::<ManifoldRecord>(&dir.join(MANIFOLD_FILE)) {
                Ok(rec) => verify_manifold(&rec, &steps, &summary, failures),
                Err(_) if zero_datum(cfg.as_ref()) && steps.is_empty() => {}
                Err(e) => failures.push(format!("manifold record: {e}")),
            },
            PipelineKind::Branching => match read_json::<BranchingRecord>(&dir.join(BRANCHING_FILE)) {
                Ok(rec) => verify_branching(&rec, &steps, &real, cfg.as_ref(), failures),
                Err(e) => failures.push(format!("branching record: {e}")),
            },
            PipelineKind::BlowupBound => {
                if summary.t_lower != steps.last().map(|c| c.t) || steps.is_empty() {
                    failures.push("summary: t_lower is not the last validated time".into());
                }
                if steps.iter().any(|c| c.theta_enclosure != RealInterval::ZERO) {
                    failures.push("blow-up chain leaves the real axis".into());
                }
            }
            PipelineKind::Contour => {
                if summary.end != crate::stepper::RunEnd::Completed {
                    failures.push("summary: contour claimed proved but not completed".into());
                }
            }
        }
    }
    Ok(report)
}

/// Writes `i,t,eps,rho,W_h,delta` (upper endpoints) for every step certificate in `dir`.
pub fn export_csv(dir: &Path, out: &mut impl std::io::Write) -> Result<usize> {
    let steps_dir = if dir.join(STEPS_DIR).exists() {
        dir.join(STEPS_DIR)
    } else {
        dir.to_path_buf()
    };
    let certs = read_certificates(&steps_dir)?;
    writeln!(out, "i,t,eps,rho,W_h,delta")?;
    for c in &certs {
        writeln!(
            out,
            "{},{},{:e},{:e},{:e},{:e}",
            c.index, c.t, c.eps_end.hi, c.inclusion.rho.hi, c.evolution.w_h.hi, c.delta.hi
        )?;
    }
    Ok(certs.len())
}
