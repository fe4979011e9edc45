//! Certified quantitative lower bounds on Lyapunov exponents of matrix
//! cocycles.
//!
//! The crate combines two matrix-analysis tools — an effective avalanche
//! principle with explicit constants and the multivariate Golden-Thompson
//! inequality — into runtime-verified lower bounds on the exponential
//! growth rate (1/n)·log‖Lₙ⋯L₁‖ of long matrix products. Every certified
//! number is produced only after the hypotheses of the theorem behind it
//! have been checked on the actual data, and the companion Monte Carlo
//! estimator cross-validates each bound empirically.
//!
//! Module map:
//!
//! * [`matan`] — small dense matrix analysis (norms, singular values, |M|,
//!   Hermitian log/exp, complex powers).
//! * [`avalanche`] — effective avalanche principle: constant presets,
//!   hypothesis checks, the two-sided sandwich, worst-case lower bound.
//! * [`gt_bounds`] — Golden-Thompson density and inequality checker plus
//!   the certified finite-product and ergodic lower bounds.
//! * [`dynamics`] — ergodic samplers (Bernoulli, Markov, rotation,
//!   skew-shift, doubling, explicit) and cocycle sampling; polymer blocks.
//! * [`schrodinger`] — transfer matrices, F-function calculus, polymer
//!   certificates and the block lower bound.
//! * [`stability`] — quantitative stability of the exponent near rank-one
//!   dominated and aligned diagonal sequences; Jacobi two-step matrices.
//! * [`almost_commuting`] — bounds for positive definite almost-commuting
//!   cocycles, conditional on a user-supplied convergence-speed constant.
//! * [`estimator`] — overflow-safe finite-n exponents and the seeded
//!   Monte Carlo harness.
//! * [`report`] — deterministic CSV/JSON result emission.

pub mod almost_commuting;
pub mod avalanche;
pub mod dynamics;
mod eigen;
pub mod error;
pub mod estimator;
pub mod gt_bounds;
pub mod matan;
pub mod report;
pub mod schrodinger;
pub mod seeds;
pub mod stability;

pub use error::{Error, Result};
