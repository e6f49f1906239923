//! Proof configuration files.
//!
//! Configurations are TOML. Real inputs may be strings such as `"pi/3"` or
//! `"2.5e-3"` (parsed into rigorous enclosures) or plain numbers, which are
//! read through their shortest decimal representation.
//!
//! ```toml
//! pipeline = "global"
//! output = "out/global-pi3"
//! max_steps = 200
//!
//! [initial]
//! modes = [{ k = 0, re = "50" }, { k = 1, re = "-25" }, { k = -1, re = "-25" }]
//! eps0 = "0"
//!
//! [margins]
//! rc = "0.02"
//!
//! [[segment]]
//! theta = "pi/3"
//! length = "0.5"
//! h = "2.5e-3"
//! N = 14
//! n = 13
//! m = 2
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::FourierVec;
use crate::interval::{ComplexInterval, RealInterval};
use crate::manifold::{DEFAULT_MARGIN_RC, DEFAULT_MARGIN_RHO};
use crate::model::EquationParams;
use crate::parse::{parse_decimal, parse_real};
use crate::stepper::{ContourSchedule, Segment, StepperOptions};

/// Kind of proof to run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PipelineKind {
    /// Plain integration along the contour.
    #[default]
    Contour,
    /// Branching singularity on the real axis.
    Branching,
    /// Global existence along a ray.
    Global,
    /// Lower bound of the blow-up time in real time.
    BlowupBound,
}

impl PipelineKind {
    /// Name used in configuration files and on the command line.
    pub fn name(self) -> &'static str {
        match self {
            Self::Contour => "contour",
            Self::Branching => "branching",
            Self::Global => "global",
            Self::BlowupBound => "blowup-bound",
        }
    }
}

/// A real number given either as a string expression or as a TOML number.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RealInput {
    /// Expression such as `"pi/3"` or `"0.0145"`.
    Text(String),
    /// Integer literal.
    Int(i64),
    /// Floating point literal.
    Float(f64),
}

impl RealInput {
    /// Rigorous enclosure of the value.
    pub fn enclosure(&self) -> Result<RealInterval> {
        match self {
            Self::Text(s) => parse_real(s),
            Self::Int(i) => parse_decimal(&i.to_string()),
            Self::Float(f) => parse_decimal(&format!("{f:e}")),
        }
    }

    /// Nearest floating point value.
    pub fn value(&self) -> Result<f64> {
        Ok(self.enclosure()?.mid())
    }

    /// Text used for `θ` labels.
    pub fn label(&self) -> String {
        match self {
            Self::Text(s) => s.trim().to_string(),
            Self::Int(i) => i.to_string(),
            Self::Float(f) => f.to_string(),
        }
    }
}

impl From<&str> for RealInput {
    fn from(s: &str) -> Self {
        Self::Text(s.to_string())
    }
}

/// One Fourier mode of the initial datum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeInput {
    /// Wavenumber.
    pub k: i64,
    /// Real part.
    #[serde(default = "zero_input")]
    pub re: RealInput,
    /// Imaginary part.
    #[serde(default = "zero_input")]
    pub im: RealInput,
}

fn zero_input() -> RealInput {
    RealInput::Int(0)
}

/// Initial datum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InitialInput {
    /// Nonzero Fourier modes.
    pub modes: Vec<ModeInput>,
    /// ℓ¹ error bound of the given modes with respect to the true datum.
    #[serde(default = "zero_input")]
    pub eps0: RealInput,
}

impl Default for InitialInput {
    fn default() -> Self {
        Self {
            modes: vec![
                ModeInput {
                    k: 0,
                    re: RealInput::Int(50),
                    im: zero_input(),
                },
                ModeInput {
                    k: 1,
                    re: RealInput::Int(-25),
                    im: zero_input(),
                },
                ModeInput {
                    k: -1,
                    re: RealInput::Int(-25),
                    im: zero_input(),
                },
            ],
            eps0: zero_input(),
        }
    }
}

/// Approximate solver and retry settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverInput {
    /// Relative Newton tolerance.
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Newton iteration limit.
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    /// Halvings of `h` before raising `m`.
    #[serde(default = "default_halvings")]
    pub max_halvings: usize,
    /// Times `m` may be raised by 2.
    #[serde(default = "default_raises")]
    pub m_raises: usize,
    /// Smallest step as a fraction of the nominal `h`.
    #[serde(default = "default_min_h_ratio")]
    pub min_h_ratio: f64,
}

fn default_tol() -> f64 {
    1e-13
}
fn default_max_iter() -> usize {
    40
}
fn default_halvings() -> usize {
    crate::stepper::MAX_HALVINGS
}
fn default_raises() -> usize {
    1
}
fn default_min_h_ratio() -> f64 {
    crate::stepper::MIN_H_RATIO
}

impl Default for SolverInput {
    fn default() -> Self {
        Self {
            tol: default_tol(),
            max_iter: default_max_iter(),
            max_halvings: default_halvings(),
            m_raises: default_raises(),
            min_h_ratio: default_min_h_ratio(),
        }
    }
}

/// Trapping region margins.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarginInput {
    /// Inflation of `r_c` relative to `r_s`.
    #[serde(default)]
    pub rc: Option<RealInput>,
    /// Inflation factor of `ρ` above its lower root.
    #[serde(default)]
    pub rho: Option<RealInput>,
}

/// One contour piece as written in the file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentInput {
    /// Direction `θ`.
    pub theta: RealInput,
    /// Length of the piece.
    pub length: RealInput,
    /// Nominal step length; alternatively give `steps`.
    #[serde(default)]
    pub h: Option<RealInput>,
    /// Number of equal steps on the piece.
    #[serde(default)]
    pub steps: Option<usize>,
    /// Fourier truncation `N`.
    #[serde(rename = "N")]
    pub nf: usize,
    /// Chebyshev order `n`.
    pub n: usize,
    /// Splitting wavenumber `m`.
    pub m: usize,
    /// Preferred Chebyshev decay rate.
    #[serde(default = "default_nu")]
    pub nu: f64,
}

fn default_nu() -> f64 {
    1.5
}

impl SegmentInput {
    /// Resolved contour piece.
    pub fn resolve(&self) -> Result<Segment> {
        let params = EquationParams::new(self.theta.label(), self.theta.enclosure()?)?;
        let length = self.length.value()?;
        let h = match (&self.h, self.steps) {
            (Some(h), None) => h.value()?,
            (None, Some(s)) if s > 0 => length / s as f64,
            _ => return Err(Error::Config("each segment needs exactly one of h or steps".into())),
        };
        if !(length > 0.0 && h > 0.0) {
            return Err(Error::Config("segment length and h must be positive".into()));
        }
        if self.m > self.nf || self.n < 2 || self.nf < 1 {
            return Err(Error::Config("segments need 0 <= m <= N, N >= 1 and n >= 2".into()));
        }
        Ok(Segment {
            params,
            length,
            h,
            nf: self.nf,
            n: self.n,
            m: self.m,
            nu: self.nu,
        })
    }
}

/// A complete proof configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProofConfig {
    /// Kind of proof; plain contour integration when omitted.
    #[serde(default)]
    pub pipeline: PipelineKind,
    /// Output directory for certificates.
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// Limit on validated steps.
    #[serde(default)]
    pub max_steps: Option<usize>,
    /// Write the approximate solution of every step next to its certificate.
    #[serde(default)]
    pub save_approx: bool,
    /// Initial datum; defaults to `50 - 50 cos(2πx)`.
    #[serde(default)]
    pub initial: InitialInput,
    /// Solver settings.
    #[serde(default)]
    pub solver: SolverInput,
    /// Trapping margins.
    #[serde(default = "default_margins")]
    pub margins: MarginInput,
    /// Contour pieces.
    #[serde(rename = "segment", default)]
    pub segments: Vec<SegmentInput>,
    /// Real-axis pieces for the blow-up lower bound of the branching proof.
    #[serde(rename = "real_segment", default)]
    pub real_segments: Vec<SegmentInput>,
}

fn default_margins() -> MarginInput {
    MarginInput { rc: None, rho: None }
}

impl ProofConfig {
    /// Parses a configuration from TOML text.
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Reads a configuration file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text)
    }

    /// Serializes the configuration back to TOML.
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Largest wavenumber used by any segment.
    pub fn max_nf(&self) -> usize {
        self.segments
            .iter()
            .chain(self.real_segments.iter())
            .map(|s| s.nf)
            .max()
            .unwrap_or(1)
    }

    /// Rigorous initial datum and its error bound.
    pub fn initial_state(&self) -> Result<(FourierVec, RealInterval)> {
        let kmax = self.initial.modes.iter().map(|m| m.k.unsigned_abs() as usize).max().unwrap_or(0);
        let mut v = FourierVec::zeros(kmax.max(self.max_nf()));
        for mode in &self.initial.modes {
            let z = ComplexInterval::new(mode.re.enclosure()?, mode.im.enclosure()?);
            v.set(mode.k, v.get(mode.k) + z);
        }
        let eps0 = self.initial.eps0.enclosure()?;
        if eps0.lo < 0.0 {
            return Err(Error::Config("eps0 must be nonnegative".into()));
        }
        Ok((v, RealInterval::point(eps0.hi)))
    }

    /// Resolved contour.
    pub fn schedule(&self) -> Result<ContourSchedule> {
        Ok(ContourSchedule {
            segments: self.segments.iter().map(SegmentInput::resolve).collect::<Result<_>>()?,
        })
    }

    /// Resolved real-axis schedule.
    pub fn real_schedule(&self) -> Result<ContourSchedule> {
        Ok(ContourSchedule {
            segments: self.real_segments.iter().map(SegmentInput::resolve).collect::<Result<_>>()?,
        })
    }

    /// Stepper settings.
    pub fn stepper_options(&self) -> StepperOptions {
        StepperOptions {
            tol: self.solver.tol,
            max_iter: self.solver.max_iter,
            max_halvings: self.solver.max_halvings,
            m_raises: self.solver.m_raises,
            max_steps: self.max_steps.unwrap_or(usize::MAX),
            min_h_ratio: self.solver.min_h_ratio,
            ..StepperOptions::default()
        }
    }

    /// `r_c` margin.
    pub fn margin_rc(&self) -> Result<f64> {
        match &self.margins.rc {
            Some(v) => v.value(),
            None => Ok(DEFAULT_MARGIN_RC),
        }
    }

    /// `ρ` inflation.
    pub fn margin_rho(&self) -> Result<f64> {
        match &self.margins.rho {
            Some(v) => v.value(),
            None => Ok(DEFAULT_MARGIN_RHO),
        }
    }
}
