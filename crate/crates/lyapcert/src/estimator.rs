//! Overflow-safe finite-n Lyapunov estimation and the Monte Carlo harness.
//!
//! The running product is renormalized by its operator norm after every
//! factor: Qₖ = Lₖ Qₖ₋₁ / ‖Lₖ Qₖ₋₁‖, so the accumulated log scale equals
//! log‖Lₙ⋯L₁‖ exactly (not merely asymptotically — ‖Qₖ‖ = 1 by
//! construction at every step). Products of 10⁷ factors with norms up to
//! 10¹⁰ stay in range because only the log scale grows.
//!
//! Monte Carlo trials derive independent generators from
//! (seed, trial index) via [`crate::seeds::derive_seed`] and aggregate
//! with a deterministic pairwise sum, so results do not depend on thread
//! count or scheduling.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{sample_cocycle, Cocycle, DynSystem};
use crate::error::{Error, Result};
use crate::matan::{op_norm, op_norm_c, ComplexMatrix, RealMatrix};
use crate::seeds::derive_seed;

/// Norm-renormalized running product of real matrices.
#[derive(Debug, Clone)]
pub struct RenormProduct {
    q: RealMatrix,
    log_scale: f64,
}

impl RenormProduct {
    pub fn new(dim: usize) -> Self {
        Self { q: RealMatrix::identity(dim), log_scale: 0.0 }
    }

    /// Left-multiplies the product by `l`.
    pub fn push(&mut self, l: &RealMatrix) -> Result<()> {
        let next = l.mul(&self.q);
        let s = op_norm(&next)?;
        if s == 0.0 || !s.is_finite() {
            return Err(Error::DegenerateMatrix("singular or non-finite step".into()));
        }
        self.log_scale += s.ln();
        self.q = next.scale(1.0 / s);
        Ok(())
    }

    /// log ‖Lₖ⋯L₁‖ of everything pushed so far.
    pub fn log_norm(&self) -> f64 {
        self.log_scale
    }

    /// The unit-norm direction matrix Q.
    pub fn direction(&self) -> &RealMatrix {
        &self.q
    }
}

/// Complex variant, used for dressed products ∏ Aₖ^{1+it}.
#[derive(Debug, Clone)]
pub struct RenormProductC {
    q: ComplexMatrix,
    log_scale: f64,
}

impl RenormProductC {
    pub fn new(dim: usize) -> Self {
        Self { q: ComplexMatrix::identity(dim), log_scale: 0.0 }
    }

    pub fn push(&mut self, l: &ComplexMatrix) -> Result<()> {
        let next = l.mul(&self.q);
        let s = op_norm_c(&next)?;
        if s == 0.0 || !s.is_finite() {
            return Err(Error::DegenerateMatrix("singular or non-finite step".into()));
        }
        self.log_scale += s.ln();
        self.q = next.scale(Complex64::new(1.0 / s, 0.0));
        Ok(())
    }

    pub fn log_norm(&self) -> f64 {
        self.log_scale
    }
}

/// Finite-n exponent (1/n) log ‖Lₙ⋯L₁‖.
pub fn finite_exponent(seq: &[RealMatrix]) -> Result<f64> {
    if seq.is_empty() {
        return Err(Error::DomainError("empty sequence".into()));
    }
    finite_exponent_iter(seq[0].dim(), seq.iter().cloned())
}

/// Streaming variant of [`finite_exponent`] for long constant-memory runs.
pub fn finite_exponent_iter<I>(dim: usize, seq: I) -> Result<f64>
where
    I: IntoIterator<Item = RealMatrix>,
{
    let mut prod = RenormProduct::new(dim);
    let mut n = 0usize;
    for l in seq {
        prod.push(&l)?;
        n += 1;
    }
    if n == 0 {
        return Err(Error::DomainError("empty sequence".into()));
    }
    Ok(prod.log_norm() / n as f64)
}

/// log ‖Lₙ⋯L₁‖ without the 1/n normalization.
pub fn log_product_norm(seq: &[RealMatrix]) -> Result<f64> {
    if seq.is_empty() {
        return Err(Error::DomainError("empty sequence".into()));
    }
    let mut prod = RenormProduct::new(seq[0].dim());
    for l in seq {
        prod.push(l)?;
    }
    Ok(prod.log_norm())
}

/// Result of a Monte Carlo estimate.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MCResult {
    pub mean: f64,
    /// Sample standard deviation of the per-trial exponents / √trials.
    pub stderr: f64,
    pub trials: usize,
    pub n: usize,
    pub seed: u64,
}

/// Deterministic pairwise summation (bit-stable regardless of threads).
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
        }
    }
}

/// Runs `trials` independent finite-exponent estimates, where trial `k`
/// receives its own derived seed and `make_seq(seed_k)` produces the
/// matrix sequence for that trial.
pub fn mc_exponent_with<F>(n: usize, trials: usize, seed: u64, make_seq: F) -> Result<MCResult>
where
    F: Fn(u64) -> Result<Vec<RealMatrix>> + Sync,
{
    if n == 0 || trials == 0 {
        return Err(Error::DomainError("n and trials must be >= 1".into()));
    }
    let exponents: Vec<Result<f64>> = (0..trials)
        .into_par_iter()
        .map(|k| {
            let seq = make_seq(derive_seed(seed, k as u64))?;
            finite_exponent(&seq)
        })
        .collect();
    let mut vals = Vec::with_capacity(trials);
    for e in exponents {
        vals.push(e?);
    }
    Ok(summarize(&vals, n, seed))
}

fn summarize(vals: &[f64], n: usize, seed: u64) -> MCResult {
    let trials = vals.len();
    let mean = pairwise_sum(vals) / trials as f64;
    let stderr = if trials > 1 {
        let sq: Vec<f64> = vals.iter().map(|v| (v - mean) * (v - mean)).collect();
        (pairwise_sum(&sq) / (trials as f64 - 1.0)).sqrt() / (trials as f64).sqrt()
    } else {
        0.0
    };
    MCResult { mean, stderr, trials, n, seed }
}

/// Monte Carlo estimate of the top Lyapunov exponent of a cocycle over a
/// dynamical system: mean ± stderr of per-trial (1/n) log ‖∏ A(Tᵏx)‖.
pub fn mc_lyapunov(
    sys: &DynSystem,
    coc: &Cocycle,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<MCResult> {
    mc_exponent_with(n, trials, seed, |trial_seed| {
        let trial_sys = sys.with_seed(trial_seed);
        sample_cocycle(&trial_sys, coc, n)
    })
}
