//! Lower bound for positive definite almost-commuting cocycles.
//!
//! For i.i.d. samples from a finite family of positive definite matrices
//! the exponent of the commuting case is λ_max(E log A₁) exactly; the
//! bound here subtracts a penalty controlled by the largest commutator
//! norm κ_c = max ‖[log Aⱼ, Aₖ]‖:
//!
//! ```text
//! γ₁ ≥ λ_max(E log A₁) − max{√(4e^{5c}κ_c), 4e^{5c}κ_c},
//! ```
//!
//! conditional on a convergence-speed constant c that is supplied by the
//! caller and never estimated — every output depending on it is tagged
//! conditional. The t-dressed estimator γ₁(t) probes ‖∏Aₖ^{1+it}‖ with
//! renormalized complex products and reproduces the real estimator
//! bit-for-bit at t = 0.

use num_complex::Complex64;
use serde::Serialize;

use crate::avalanche::{BoundTerm, CertifiedBound};
use crate::error::{Error, Result};
use crate::estimator::{mc_exponent_with, pairwise_sum, RenormProductC};
use crate::matan::{
    complex_power, log_pd_sym, op_norm, sym_eigenpairs, ComplexMatrix, HermitianMatrix,
    RealMatrix,
};
use crate::seeds::{derive_seed, seeded_rng};
use rand::Rng;
use rayon::prelude::*;

/// A finite family of positive definite matrices with sampling weights
/// and the convergence-speed constant of the conditional bounds.
#[derive(Debug, Clone)]
pub struct PDCocycleSample {
    pub mats: Vec<RealMatrix>,
    pub dist: Vec<f64>,
    /// Convergence-speed constant c; user-supplied, never estimated.
    pub c: f64,
}

impl PDCocycleSample {
    pub fn new(mats: Vec<RealMatrix>, dist: Vec<f64>, c: f64) -> Result<Self> {
        if mats.is_empty() || mats.len() != dist.len() {
            return Err(Error::DomainError("need matching matrices and weights".into()));
        }
        if !(c.is_finite() && c >= 0.0) {
            return Err(Error::DomainError(format!("constant c = {c} must be finite, >= 0")));
        }
        let total: f64 = dist.iter().sum();
        if dist.iter().any(|&p| !(0.0..=1.0).contains(&p)) || (total - 1.0).abs() > 1e-12 {
            return Err(Error::DomainError("weights must form a distribution".into()));
        }
        let d = mats[0].dim();
        for (k, m) in mats.iter().enumerate() {
            if m.dim() != d {
                return Err(Error::InvalidMatrix("dimension mismatch".into()));
            }
            if m.asymmetry() > 1e-12 * m.max_abs().max(1.0) {
                return Err(Error::NotPositiveDefinite(format!("A({k}) is not symmetric")));
            }
            let (vals, _) = sym_eigenpairs(m)?;
            if vals[vals.len() - 1] <= 0.0 {
                return Err(Error::NotPositiveDefinite(format!(
                    "A({k}) has eigenvalue {:.3e}",
                    vals[vals.len() - 1]
                )));
            }
        }
        Ok(Self { mats, dist, c })
    }

    fn dim(&self) -> usize {
        self.mats[0].dim()
    }
}

/// ‖AB − BA‖.
pub fn commutator_norm(a: &RealMatrix, b: &RealMatrix) -> Result<f64> {
    op_norm(&a.mul(b).sub(&b.mul(a)))
}

/// κ_c = max over symbol pairs of ‖[log Aⱼ, Aₖ]‖.
pub fn max_log_commutator(sample: &PDCocycleSample) -> Result<f64> {
    let logs: Vec<RealMatrix> =
        sample.mats.iter().map(log_pd_sym).collect::<Result<_>>()?;
    let mut worst = 0.0f64;
    for lj in &logs {
        for ak in &sample.mats {
            worst = worst.max(commutator_norm(lj, ak)?);
        }
    }
    Ok(worst)
}

/// The conditional penalty max{√(4e^{5c}x), 4e^{5c}x}.
pub fn penalty(c: f64, x: f64) -> f64 {
    let y = 4.0 * (5.0 * c).exp() * x;
    y.sqrt().max(y)
}

/// Conditional lower bound γ₁ ≥ λ_max(E log A₁) − penalty(c, κ_c).
///
/// Exact (penalty zero) iff all pairs commute; the penalty is monotone
/// nondecreasing in both κ_c and c.
pub fn almost_commuting_bound(sample: &PDCocycleSample) -> Result<CertifiedBound> {
    let d = sample.dim();
    let mut e_log = RealMatrix::zeros(d);
    for (m, &p) in sample.mats.iter().zip(&sample.dist) {
        if p > 0.0 {
            e_log = e_log.add(&log_pd_sym(m)?.scale(p));
        }
    }
    let main = crate::matan::lambda_max_sym(&e_log)?;
    let kappa_c = max_log_commutator(sample)?;
    let pen = -penalty(sample.c, kappa_c);
    Ok(CertifiedBound {
        value: main + pen,
        terms: vec![
            BoundTerm { name: "main", value: main, in_sum: true },
            BoundTerm { name: "commutator_penalty", value: pen, in_sum: true },
            BoundTerm { name: "kappa_c", value: kappa_c, in_sum: false },
        ],
        preset: "conditional",
        kappa: None,
        eps: None,
    })
}

/// Penalty of the t-dressed comparison |γ₁ − γ₁(t)|, driven by
/// ε_t = max ‖[Aⱼ^{it}, Aₖ]‖.
pub fn prop_penalty_t(sample: &PDCocycleSample, t: f64) -> Result<f64> {
    let it = Complex64::new(0.0, t);
    let powers: Vec<ComplexMatrix> = sample
        .mats
        .iter()
        .map(|m| complex_power(&HermitianMatrix::from_real_symmetric(m)?, it))
        .collect::<Result<_>>()?;
    let mut eps_t = 0.0f64;
    for pj in &powers {
        for ak in &sample.mats {
            let akc = ak.to_complex();
            let comm = pj.mul(&akc).add(&akc.mul(pj).scale(Complex64::new(-1.0, 0.0)));
            eps_t = eps_t.max(crate::matan::op_norm_c(&comm)?);
        }
    }
    Ok(penalty(sample.c, eps_t))
}

/// Monte Carlo estimate of the t-dressed exponent (1/n) log‖∏Aₖ^{1+it}‖.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GammaProbe {
    pub estimate: f64,
    pub stderr: f64,
    pub t: f64,
}

/// Estimates γ₁(t) over i.i.d. draws from the sample distribution. At
/// t = 0 this delegates to the real-valued estimator and is bit-identical
/// to it.
pub fn gamma_t_probe(
    sample: &PDCocycleSample,
    t: f64,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<GammaProbe> {
    if n == 0 || trials == 0 {
        return Err(Error::DomainError("n and trials must be >= 1".into()));
    }
    if t == 0.0 {
        let mats = sample.mats.clone();
        let dist = sample.dist.clone();
        let mc = mc_exponent_with(n, trials, seed, move |trial_seed| {
            let mut rng = seeded_rng(trial_seed);
            Ok((0..n).map(|_| mats[draw(&dist, &mut rng)].clone()).collect())
        })?;
        return Ok(GammaProbe { estimate: mc.mean, stderr: mc.stderr, t });
    }

    let z = Complex64::new(1.0, t);
    let powers: Vec<ComplexMatrix> = sample
        .mats
        .iter()
        .map(|m| complex_power(&HermitianMatrix::from_real_symmetric(m)?, z))
        .collect::<Result<_>>()?;
    let d = sample.dim();
    let vals: Vec<Result<f64>> = (0..trials)
        .into_par_iter()
        .map(|k| {
            let mut rng = seeded_rng(derive_seed(seed, k as u64));
            let mut prod = RenormProductC::new(d);
            for _ in 0..n {
                prod.push(&powers[draw(&sample.dist, &mut rng)])?;
            }
            Ok(prod.log_norm() / n as f64)
        })
        .collect();
    let mut exps = Vec::with_capacity(trials);
    for v in vals {
        exps.push(v?);
    }
    let mean = pairwise_sum(&exps) / trials as f64;
    let stderr = if trials > 1 {
        let sq: Vec<f64> = exps.iter().map(|v| (v - mean) * (v - mean)).collect();
        (pairwise_sum(&sq) / (trials as f64 - 1.0)).sqrt() / (trials as f64).sqrt()
    } else {
        0.0
    };
    Ok(GammaProbe { estimate: mean, stderr, t })
}

fn draw(dist: &[f64], rng: &mut rand_chacha::ChaCha8Rng) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, &p) in dist.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    dist.len() - 1
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn commutator_basics() {
        let a = RealMatrix::diag(&[1.0, 2.0]);
        let b = RealMatrix::diag(&[3.0, 5.0]);
        assert_eq!(commutator_norm(&a, &b).unwrap(), 0.0);

        // scaling B -> cB scales the commutator norm by |c|
        let a = RealMatrix::from_rows(&[&[1.0, 0.3], &[0.3, 2.0]]).unwrap();
        let b = RealMatrix::from_rows(&[&[0.5, -0.2], &[0.1, 1.5]]).unwrap();
        let base = commutator_norm(&a, &b).unwrap();
        for &c in &[2.0, -3.0, 0.25] {
            approx(
                commutator_norm(&a, &b.scale(c)).unwrap(),
                c.abs() * base,
                1e-12 * base.max(1.0),
            );
        }

        // direct oracle on a seed-fixed pair: log of PD times PD
        let p = RealMatrix::from_rows(&[&[2.0, 0.4], &[0.4, 1.0]]).unwrap();
        let lp = log_pd_sym(&p).unwrap();
        let q = RealMatrix::from_rows(&[&[1.5, -0.3], &[-0.3, 0.8]]).unwrap();
        let direct = op_norm(&lp.mul(&q).sub(&q.mul(&lp))).unwrap();
        approx(commutator_norm(&lp, &q).unwrap(), direct, 1e-14);
    }

    #[test]
    fn bound_commuting_family_is_exact() {
        let sample = PDCocycleSample::new(
            vec![RealMatrix::diag(&[2.0, 0.5]), RealMatrix::diag(&[3.0, 0.2])],
            vec![0.4, 0.6],
            1.0,
        )
        .unwrap();
        let bound = almost_commuting_bound(&sample).unwrap();
        assert_eq!(bound.term("kappa_c").unwrap(), 0.0);
        assert_eq!(bound.term("commutator_penalty").unwrap(), 0.0);
        // lambda_max(0.4 log diag(2,.5) + 0.6 log diag(3,.2))
        let expect = (0.4 * 2.0f64.ln() + 0.6 * 3.0f64.ln())
            .max(0.4 * 0.5f64.ln() + 0.6 * 0.2f64.ln());
        approx(bound.value, expect, 1e-12);
    }

    #[test]
    fn bound_single_symbol() {
        let p = RealMatrix::from_rows(&[&[2.0, 0.7], &[0.7, 1.2]]).unwrap();
        let sample = PDCocycleSample::new(vec![p.clone()], vec![1.0], 0.5).unwrap();
        let bound = almost_commuting_bound(&sample).unwrap();
        let (vals, _) = sym_eigenpairs(&p).unwrap();
        approx(bound.value, vals[0].ln(), 1e-12);
    }

    #[test]
    fn penalty_monotone_in_commutator_and_c() {
        let mut prev = -1.0;
        for k in 0..20 {
            let x = 0.01 * k as f64;
            let p = penalty(1.0, x);
            assert!(p >= prev);
            prev = p;
        }
        assert!(penalty(2.0, 0.3) >= penalty(1.0, 0.3));
        // small x: sqrt branch; large x: linear branch
        approx(penalty(0.0, 1e-4), (4e-4f64).sqrt(), 1e-15);
        approx(penalty(0.0, 10.0), 40.0, 1e-12);
    }

    #[test]
    fn bound_monotone_penalty_sweep() {
        // rotate one factor progressively to grow the commutator
        let base = RealMatrix::diag(&[3.0, 0.4]);
        let mut prev_penalty = 0.0;
        let mut prev_kappa = -1.0;
        for k in 0..20 {
            let angle = 0.02 * k as f64;
            let r = RealMatrix::rotation(angle);
            let rotated = r.mul(&RealMatrix::diag(&[2.0, 0.6])).mul(&r.transpose());
            let sample =
                PDCocycleSample::new(vec![base.clone(), rotated], vec![0.5, 0.5], 1.0).unwrap();
            let bound = almost_commuting_bound(&sample).unwrap();
            let kappa_c = bound.term("kappa_c").unwrap();
            let pen = -bound.term("commutator_penalty").unwrap();
            if kappa_c >= prev_kappa {
                assert!(pen >= prev_penalty - 1e-12);
            }
            prev_kappa = kappa_c;
            prev_penalty = pen;
        }
    }

    #[test]
    fn probe_t_zero_bitwise_equals_real_estimator() {
        let sample = PDCocycleSample::new(
            vec![
                RealMatrix::from_rows(&[&[2.0, 0.3], &[0.3, 1.0]]).unwrap(),
                RealMatrix::from_rows(&[&[1.4, -0.2], &[-0.2, 0.9]]).unwrap(),
            ],
            vec![0.5, 0.5],
            1.0,
        )
        .unwrap();
        let probe = gamma_t_probe(&sample, 0.0, 200, 4, 77).unwrap();
        let mats = sample.mats.clone();
        let dist = sample.dist.clone();
        let mc = mc_exponent_with(200, 4, 77, move |trial_seed| {
            let mut rng = seeded_rng(trial_seed);
            Ok((0..200).map(|_| mats[draw(&dist, &mut rng)].clone()).collect())
        })
        .unwrap();
        assert_eq!(probe.estimate.to_bits(), mc.mean.to_bits());
        assert_eq!(probe.stderr.to_bits(), mc.stderr.to_bits());
    }

    #[test]
    fn probe_commuting_diagonals_t_independent() {
        let sample = PDCocycleSample::new(
            vec![RealMatrix::diag(&[2.0, 0.5]), RealMatrix::diag(&[1.5, 0.8])],
            vec![0.5, 0.5],
            0.0,
        )
        .unwrap();
        let p0 = gamma_t_probe(&sample, 0.0, 300, 3, 5).unwrap();
        for &t in &[0.5, 1.0, 3.0] {
            let pt = gamma_t_probe(&sample, t, 300, 3, 5).unwrap();
            approx(pt.estimate, p0.estimate, 1e-10);
        }
    }

    #[test]
    fn probe_conditional_inequality_nearly_commuting() {
        // nearly commuting pair: |gamma(t) - gamma(0)| within the
        // conditional penalty plus Monte Carlo noise
        let r = RealMatrix::rotation(0.02);
        let sample = PDCocycleSample::new(
            vec![
                RealMatrix::diag(&[2.0, 0.5]),
                r.mul(&RealMatrix::diag(&[1.7, 0.6])).mul(&r.transpose()),
            ],
            vec![0.5, 0.5],
            1.0,
        )
        .unwrap();
        for &t in &[0.5, 1.0] {
            let p0 = gamma_t_probe(&sample, 0.0, 2000, 6, 31).unwrap();
            let pt = gamma_t_probe(&sample, t, 2000, 6, 31).unwrap();
            let pen = prop_penalty_t(&sample, t).unwrap();
            let noise = 3.0 * (p0.stderr + pt.stderr);
            assert!(
                (pt.estimate - p0.estimate).abs() <= pen + noise,
                "t={t}: |{} - {}| vs {pen} + {noise}",
                pt.estimate,
                p0.estimate
            );
        }
    }

    #[test]
    fn sample_rejects_non_pd() {
        let not_pd = RealMatrix::diag(&[1.0, -0.1]);
        assert!(matches!(
            PDCocycleSample::new(vec![not_pd], vec![1.0], 1.0),
            Err(Error::NotPositiveDefinite(_))
        ));
        let shear = RealMatrix::from_rows(&[&[1.0, 0.5], &[0.0, 1.0]]).unwrap();
        assert!(PDCocycleSample::new(vec![shear], vec![1.0], 1.0).is_err());
    }
}
