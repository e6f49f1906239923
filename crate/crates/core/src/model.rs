//! Parameters of the rotated heat equation `u_t = e^{iθ}(u_xx + u²)` on the unit circle.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::{ComplexInterval, RealInterval};
use crate::parse::parse_real;

/// Direction `θ` of a ray in complex time together with its derived enclosures.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquationParams {
    /// Human-readable form of `θ` as given in the input (for example `pi/3`).
    pub theta_label: String,
    /// Enclosure of `θ`.
    pub theta: RealInterval,
    /// Enclosure of `e^{iθ}`.
    pub rotation: ComplexInterval,
    /// Enclosure of `cos θ`.
    pub cos_theta: RealInterval,
    /// Enclosure of the spatial frequency `ω = 2π`.
    pub omega: RealInterval,
}

impl EquationParams {
    /// Builds the parameters for an enclosure of `θ`, requiring `|θ| < π/2`
    /// with a rigorously positive cosine.
    pub fn new(theta_label: impl Into<String>, theta: RealInterval) -> Result<Self> {
        let cos_theta = theta.cos();
        if !cos_theta.is_valid() || cos_theta.lo <= 0.0 {
            return Err(Error::Config(format!(
                "theta {theta:?} must satisfy |theta| < pi/2 with cos(theta) > 0"
            )));
        }
        Ok(Self {
            theta_label: theta_label.into(),
            theta,
            rotation: ComplexInterval::cis(theta),
            cos_theta,
            omega: RealInterval::two_pi(),
        })
    }

    /// Parses `θ` from an expression such as `pi/3`, `-pi/4` or `0`.
    pub fn from_expr(expr: &str) -> Result<Self> {
        Self::new(expr.trim(), parse_real(expr)?)
    }

    /// The real-time direction `θ = 0`.
    pub fn real_time() -> Self {
        Self::new("0", RealInterval::ZERO).expect("theta = 0 is admissible")
    }

    /// Nearest floating point value of `θ`, used by the approximate solver.
    pub fn theta_f64(&self) -> f64 {
        self.theta.mid()
    }

    /// Nearest floating point value of `ω`.
    pub fn omega_f64(&self) -> f64 {
        std::f64::consts::TAU
    }

    /// Enclosure of `ω² cos θ`.
    pub fn mu_center(&self) -> RealInterval {
        self.omega.sqr() * self.cos_theta
    }

    /// Enclosure of `(m+1)² ω² cos θ`.
    pub fn mu_tail(&self, m: usize) -> RealInterval {
        let q = ((m + 1) * (m + 1)) as f64;
        RealInterval::point(q) * self.mu_center()
    }
}
