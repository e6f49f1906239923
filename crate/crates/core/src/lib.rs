//! Rigorous integration of `u_t = e^{iθ}(u_xx + u²)` on the unit circle along
//! piecewise linear contours in complex time.
//!
//! The crate provides interval arithmetic, Fourier and Chebyshev–Fourier
//! series, a nonrigorous collocation solver, validated fundamental matrices,
//! the evolution-operator and local inclusion bounds, a stepping driver with
//! per-step certificates, the stable-manifold trapping test and the proof
//! pipelines built on top of them.

// Comparisons are written in negated form where a NaN bound must fail the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod approx;
pub mod cheb;
pub mod error;
pub mod evolution;
pub mod fourier;
pub mod inclusion;
pub mod interval;
pub mod manifold;
pub mod model;
pub mod parse;
pub mod pipelines;
pub mod stepper;
pub mod variational;

pub use cheb::{ChebFourier, WeightedNorm};
pub use error::{Error, Result};
pub use fourier::{FourierVec, TailSplit};
pub use interval::{ComplexInterval, IntervalMatrix, RealInterval};
pub use model::EquationParams;
