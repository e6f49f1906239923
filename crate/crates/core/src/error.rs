//! Error type shared by every module.

use thiserror::Error;

/// Failures raised by the rigorous and nonrigorous layers.
#[derive(Debug, Error)]
pub enum Error {
    /// An interval became invalid or a division by an interval containing 0 was requested.
    #[error("enclosure failure: {0}")]
    Enclosure(String),
    /// Operands do not live on the same time interval or index set.
    #[error("domain error: {0}")]
    Domain(String),
    /// The nonrigorous Newton solver did not converge.
    #[error("approximate solver failed: {0}")]
    Solver(String),
    /// The Newton–Kantorovich bounds did not close.
    #[error("radii failure: Y0={y0:e}, Z0={z0:e}, Z1={z1:e}")]
    Radii {
        /// Residual bound.
        y0: f64,
        /// Preconditioner defect bound.
        z0: f64,
        /// Derivative bound.
        z1: f64,
    },
    /// The coupling constant κ of the evolution bound is not positive.
    #[error("tail coupling failure: kappa lower bound {0:e} is not positive")]
    TailCoupling(f64),
    /// The local inclusion inequality has no solution.
    #[error("inclusion failure: {0}")]
    Inclusion(String),
    /// A configuration file or value is malformed.
    #[error("configuration error: {0}")]
    Config(String),
    /// A certificate failed replay.
    #[error("certificate replay failure: {0}")]
    Replay(String),
    /// Filesystem failure.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    /// Serialization failure.
    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

/// Result alias using [`Error`].
pub type Result<T> = std::result::Result<T, Error>;
