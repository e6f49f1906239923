//! `cxheat`: rigorous integration of `u_z = e^{iθ}(u_xx + u²)` on the circle.
//!
//! Exit codes: 0 when the requested statement is proved (or a verified
//! directory claims a proof), 2 when the run is inconclusive, 1 on errors.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use cxheat_core::pipelines::config::{PipelineKind, ProofConfig, RealInput};
use cxheat_core::pipelines::output::{export_csv, verify_dir, write_approximation, write_certificates, write_outcome};
use cxheat_core::pipelines::{approximate_first_step, run_pipeline, validate_first_step, Verdict};
use cxheat_core::stepper::StepCertificate;
use cxheat_core::Error;

#[derive(Parser, Debug)]
#[command(name = "cxheat", version, about = "Computer-assisted proofs for the complex-time heat equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct RunArgs {
    /// Proof configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output` in the configuration.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Limit on validated steps.
    #[arg(long)]
    max_steps: Option<usize>,
    /// Inflation of r_c relative to r_s, as a decimal string.
    #[arg(long)]
    margin_rc: Option<String>,
    /// Inflation factor of rho above its lower root, as a decimal string.
    #[arg(long)]
    margin_rho: Option<String>,
    /// Suppress per-step progress lines.
    #[arg(long, short)]
    quiet: bool,
}

#[derive(Args, Debug, Clone)]
struct DirArgs {
    /// Output directory of a previous run.
    #[arg(long = "out", value_name = "DIR")]
    dir: PathBuf,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute the nonrigorous approximation of the first step.
    Approx(RunArgs),
    /// Validate the first step of the first segment.
    Step(RunArgs),
    /// Integrate the configured contour.
    Contour(RunArgs),
    /// Prove a branching singularity on the real axis.
    Branching(RunArgs),
    /// Prove global existence along a ray.
    Global(RunArgs),
    /// Bound the blow-up time from below by a real-time run.
    BlowupBound(RunArgs),
    /// Re-check every certificate of an output directory.
    Verify(DirArgs),
    /// Export `i,t,eps,rho,W_h,delta` of an output directory as CSV.
    ExportCsv {
        #[command(flatten)]
        dir: DirArgs,
        /// CSV file; standard output when omitted.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn load_config(args: &RunArgs, kind: Option<PipelineKind>) -> anyhow::Result<ProofConfig> {
    let mut cfg = ProofConfig::load(&args.config).with_context(|| format!("reading {}", args.config.display()))?;
    if let Some(kind) = kind {
        cfg.pipeline = kind;
    }
    if let Some(out) = &args.out {
        cfg.output = Some(out.clone());
    }
    if let Some(n) = args.max_steps {
        cfg.max_steps = Some(n);
    }
    if let Some(v) = &args.margin_rc {
        cfg.margins.rc = Some(RealInput::Text(v.clone()));
        cfg.margin_rc()?;
    }
    if let Some(v) = &args.margin_rho {
        cfg.margins.rho = Some(RealInput::Text(v.clone()));
        cfg.margin_rho()?;
    }
    Ok(cfg)
}

fn output_dir(cfg: &ProofConfig) -> PathBuf {
    cfg.output
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("out/{}", cfg.pipeline.name())))
}

fn progress_line(c: &StepCertificate) -> String {
    format!(
        "step {:>5}  seg {}  t = {:.6}  h = {:.3e}  eps = {:.3e}  rho = {:.3e}  W_h = {:.4}  delta = {:.3e}",
        c.index,
        c.segment,
        c.t,
        c.h.hi,
        c.eps_end.hi,
        c.inclusion.rho.hi,
        c.evolution.w_h.hi,
        c.delta.hi
    )
}

fn run_proof(args: &RunArgs, kind: PipelineKind) -> anyhow::Result<ExitCode> {
    let cfg = load_config(args, Some(kind))?;
    let dir = output_dir(&cfg);
    let quiet = args.quiet;
    let outcome = run_pipeline(&cfg, |c| {
        if !quiet {
            eprintln!("{}", progress_line(c));
        }
    })?;
    write_outcome(&dir, &outcome, &cfg)?;
    let s = &outcome.summary;
    println!("{}: {}", kind.name(), s.message);
    println!(
        "verdict: {:?}  steps: {}  elapsed: {:.1}s  certificates: {}",
        s.verdict,
        s.steps,
        s.elapsed_secs,
        dir.display()
    );
    Ok(ExitCode::from(s.verdict.exit_code() as u8))
}

fn run_approx(args: &RunArgs) -> anyhow::Result<ExitCode> {
    let cfg = load_config(args, None)?;
    let abar = approximate_first_step(&cfg)?;
    let end = abar.eval_at_end();
    println!(
        "approximation on [{}, {}]: n = {}, N = {}, |a(t_hi)| = {:.12e}",
        abar.t_lo,
        abar.t_hi,
        abar.cheb_order(),
        abar.fourier_order(),
        end.ell1_norm().mid()
    );
    let path = output_dir(&cfg).join("approx.json");
    write_approximation(&path, &abar)?;
    println!("written to {}", path.display());
    Ok(ExitCode::SUCCESS)
}

fn run_step(args: &RunArgs) -> anyhow::Result<ExitCode> {
    let cfg = load_config(args, None)?;
    let dir = output_dir(&cfg);
    match validate_first_step(&cfg) {
        Ok(step) => {
            println!("{}", progress_line(&step.cert));
            write_certificates(&dir.join("steps"), std::slice::from_ref(&step.cert))?;
            write_approximation(&dir.join("approx.json"), &step.abar)?;
            println!("certificate written to {}", dir.join("steps").display());
            Ok(ExitCode::SUCCESS)
        }
        Err(e @ (Error::Config(_) | Error::Io(_) | Error::Serde(_))) => Err(e.into()),
        Err(e) => {
            println!("step not validated: {e}");
            Ok(ExitCode::from(2))
        }
    }
}

fn run_verify(dir: &Path) -> anyhow::Result<ExitCode> {
    let report = verify_dir(dir)?;
    println!("checked {} steps and {} real-axis steps", report.steps, report.real_steps);
    if !report.passed() {
        for f in &report.failures {
            println!("FAIL {f}");
        }
        bail!("{} checks failed", report.failures.len());
    }
    println!("all checks passed; claimed verdict {:?}", report.claimed.unwrap_or(Verdict::Inconclusive));
    Ok(match report.claimed {
        Some(Verdict::Proved) => ExitCode::SUCCESS,
        _ => ExitCode::from(2),
    })
}

fn run_export(dir: &Path, csv: Option<&Path>) -> anyhow::Result<ExitCode> {
    let rows = match csv {
        Some(path) => {
            let mut f = fs::File::create(path)?;
            let rows = export_csv(dir, &mut f)?;
            f.flush()?;
            eprintln!("{rows} rows written to {}", path.display());
            rows
        }
        None => export_csv(dir, &mut std::io::stdout().lock())?,
    };
    if rows == 0 {
        bail!("no certificates in {}", dir.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Approx(a) => run_approx(a),
        Command::Step(a) => run_step(a),
        Command::Contour(a) => run_proof(a, PipelineKind::Contour),
        Command::Branching(a) => run_proof(a, PipelineKind::Branching),
        Command::Global(a) => run_proof(a, PipelineKind::Global),
        Command::BlowupBound(a) => run_proof(a, PipelineKind::BlowupBound),
        Command::Verify(d) => run_verify(&d.dir),
        Command::ExportCsv { dir, csv } => run_export(&dir.dir, csv.as_deref()),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
