//! Ergodic dynamical systems and cocycle sampling.
//!
//! Samplers: Bernoulli and two-state Markov shifts (Markov chains cover
//! Ising-type nearest-neighbor correlations), irrational rotation,
//! skew-shift, doubling map, and explicit symbol lists for regression
//! fixtures. A cocycle maps states to invertible matrices; iterating it
//! along an orbit produces the matrix sequences the estimators consume.
//!
//! Polymer potentials are handled at block granularity: a symbol drawn
//! from an ergodic {+,-} process selects a 2p-site block, which is the
//! product of 2p transfer matrices. Sampling at block boundaries leaves
//! the Lyapunov exponent unchanged, so the offset-randomizing suspension
//! is never materialized.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matan::RealMatrix;
use crate::schrodinger::power_via_f;
use crate::seeds::seeded_rng;

/// Kind of dynamical system.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum DynKind {
    /// I.i.d. two-symbol process; `p0` is the probability of symbol 0.
    Bernoulli { p0: f64 },
    /// Two-state Markov chain: `rows[i][j]` is P(next = j | current = i);
    /// the initial state is drawn from `init`.
    Markov { rows: [[f64; 2]; 2], init: [f64; 2] },
    /// Irrational rotation x ↦ x + α (mod 1); initial point from the seed.
    Rotation { alpha: f64 },
    /// Skew-shift orbit sₖ = x₀ + kβ + k(k−1)/2·α (mod 1), emitted via the
    /// recurrence sₖ₊₁ = sₖ + β + kα; initial point from the seed.
    SkewShift { alpha: f64, beta: f64 },
    /// Doubling map x ↦ 2x (mod 1); initial point from the seed.
    Doubling,
    /// Fixed symbol list, repeated cyclically when more states are needed.
    Explicit(Vec<usize>),
}

/// A dynamical system descriptor plus its sampling seed. Immutable;
/// sampling creates per-call generator state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DynSystem {
    pub kind: DynKind,
    pub seed: u64,
}

impl DynSystem {
    pub fn new(kind: DynKind) -> Result<Self> {
        validate_kind(&kind)?;
        Ok(Self { kind, seed: 0 })
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self { kind: self.kind.clone(), seed }
    }
}

fn validate_kind(kind: &DynKind) -> Result<()> {
    let prob_ok = |p: f64| (0.0..=1.0).contains(&p);
    match kind {
        DynKind::Bernoulli { p0 } => {
            if !prob_ok(*p0) {
                return Err(Error::DomainError(format!("bernoulli p0 {p0} outside [0,1]")));
            }
        }
        DynKind::Markov { rows, init } => {
            for row in rows {
                if !row.iter().all(|&p| prob_ok(p)) || (row[0] + row[1] - 1.0).abs() > 1e-12 {
                    return Err(Error::DomainError("markov rows must sum to 1".into()));
                }
            }
            if !init.iter().all(|&p| prob_ok(p)) || (init[0] + init[1] - 1.0).abs() > 1e-12 {
                return Err(Error::DomainError("markov initial distribution must sum to 1".into()));
            }
        }
        DynKind::Explicit(syms) => {
            if syms.is_empty() {
                return Err(Error::DomainError("explicit symbol list is empty".into()));
            }
        }
        _ => {}
    }
    Ok(())
}

/// State emitted by an orbit: a discrete symbol or a point of the circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum State {
    Symbol(usize),
    Point(f64),
}

/// Deterministic orbit of length `n` for the system's seed.
pub fn orbit(sys: &DynSystem, n: usize) -> Vec<State> {
    let mut rng = seeded_rng(sys.seed);
    let mut out = Vec::with_capacity(n);
    match &sys.kind {
        DynKind::Bernoulli { p0 } => {
            for _ in 0..n {
                let u: f64 = rng.gen();
                out.push(State::Symbol(usize::from(u >= *p0)));
            }
        }
        DynKind::Markov { rows, init } => {
            let u: f64 = rng.gen();
            let mut state = usize::from(u >= init[0]);
            out.push(State::Symbol(state));
            for _ in 1..n {
                let u: f64 = rng.gen();
                state = usize::from(u >= rows[state][0]);
                out.push(State::Symbol(state));
            }
        }
        DynKind::Rotation { alpha } => {
            let mut x: f64 = rng.gen();
            for _ in 0..n {
                out.push(State::Point(x));
                x = (x + alpha).rem_euclid(1.0);
            }
        }
        DynKind::SkewShift { alpha, beta } => {
            let mut s: f64 = rng.gen();
            for k in 0..n {
                out.push(State::Point(s));
                s = (s + beta + k as f64 * alpha).rem_euclid(1.0);
            }
        }
        DynKind::Doubling => {
            let mut x: f64 = rng.gen();
            for _ in 0..n {
                out.push(State::Point(x));
                x = (2.0 * x).rem_euclid(1.0);
            }
        }
        DynKind::Explicit(syms) => {
            for k in 0..n {
                out.push(State::Symbol(syms[k % syms.len()]));
            }
        }
    }
    out
}

/// Map from states to invertible matrices.
#[derive(Debug, Clone)]
pub enum Cocycle {
    /// Symbol-indexed table.
    Table { mats: Vec<RealMatrix> },
    /// Threshold map for circle states: `below` when x < threshold.
    Threshold { threshold: f64, below: RealMatrix, above: RealMatrix },
}

impl Cocycle {
    pub fn table(mats: Vec<RealMatrix>) -> Result<Self> {
        if mats.is_empty() {
            return Err(Error::DomainError("cocycle table is empty".into()));
        }
        let d = mats[0].dim();
        for m in &mats {
            if m.dim() != d {
                return Err(Error::InvalidMatrix("cocycle dimensions differ".into()));
            }
            if m.det().abs() == 0.0 {
                return Err(Error::DegenerateMatrix("cocycle image not invertible".into()));
            }
        }
        Ok(Self::Table { mats })
    }

    pub fn threshold(threshold: f64, below: RealMatrix, above: RealMatrix) -> Result<Self> {
        if below.dim() != above.dim() {
            return Err(Error::InvalidMatrix("cocycle dimensions differ".into()));
        }
        Ok(Self::Threshold { threshold, below, above })
    }

    pub fn dim(&self) -> usize {
        match self {
            Cocycle::Table { mats } => mats[0].dim(),
            Cocycle::Threshold { below, .. } => below.dim(),
        }
    }

    pub fn at(&self, state: &State) -> Result<&RealMatrix> {
        match (self, state) {
            (Cocycle::Table { mats }, State::Symbol(s)) => mats
                .get(*s)
                .ok_or_else(|| Error::UnknownSymbol(format!("symbol {s} outside table"))),
            (Cocycle::Threshold { threshold, below, above }, State::Point(x)) => {
                Ok(if x < threshold { below } else { above })
            }
            (Cocycle::Table { .. }, State::Point(_)) => {
                Err(Error::UnknownSymbol("table cocycle fed a circle point".into()))
            }
            (Cocycle::Threshold { .. }, State::Symbol(_)) => {
                Err(Error::UnknownSymbol("threshold cocycle fed a symbol".into()))
            }
        }
    }
}

/// Matrices of the cocycle along the orbit, element k = A(state_k).
pub fn sample_cocycle(sys: &DynSystem, coc: &Cocycle, n: usize) -> Result<Vec<RealMatrix>> {
    orbit(sys, n).iter().map(|s| coc.at(s).cloned()).collect()
}

/// Polymer model: blocks of 2p sites whose potential is either all −v
/// (symbol '−', probability 𝔭) or p free sites followed by p values −v
/// (symbol '+'). With a := E and b := E + v the block transfer matrices
/// are B²ᵖ for '−' and AᵖBᵖ for '+'.
#[derive(Debug, Clone, Serialize)]
pub struct PolymerSystem {
    /// Polymer half-length (blocks have 2p sites).
    pub p: u32,
    /// Potential depth v > 0.
    pub v: f64,
    /// Stationary probability of the '−' block (symbol 0).
    pub prob_minus: f64,
    /// Ergodic {+,−} sampler: symbol 0 is '−', symbol 1 is '+'.
    pub sampler: DynSystem,
}

impl PolymerSystem {
    /// Validates that the sampler's stationary probability of symbol 0
    /// matches `prob_minus`.
    pub fn new(p: u32, v: f64, prob_minus: f64, sampler: DynSystem) -> Result<Self> {
        if p == 0 {
            return Err(Error::DomainError("polymer half-length p must be >= 1".into()));
        }
        if !(v > 0.0) {
            return Err(Error::DomainError("potential depth v must be positive".into()));
        }
        if !(0.0..=1.0).contains(&prob_minus) {
            return Err(Error::DomainError("prob_minus outside [0,1]".into()));
        }
        let stat = match &sampler.kind {
            DynKind::Bernoulli { p0 } => Some(*p0),
            DynKind::Markov { rows, .. } => Some(stationary_2state(rows)[0]),
            _ => None,
        };
        if let Some(s) = stat {
            if (s - prob_minus).abs() > 1e-9 {
                return Err(Error::DomainError(format!(
                    "sampler stationary P(-) = {s} but prob_minus = {prob_minus}"
                )));
            }
        }
        Ok(Self { p, v, prob_minus, sampler })
    }
}

/// The two distinct polymer block matrices at energy `e`:
/// `(minus, plus) = (B²ᵖ, AᵖBᵖ)` with a = e and b = e + v.
pub fn polymer_block_matrices(ps: &PolymerSystem, e: f64) -> Result<(RealMatrix, RealMatrix)> {
    let a = e;
    let b = e + ps.v;
    let a_pow = power_via_f(a, ps.p)?;
    let b_pow = power_via_f(b, ps.p)?;
    let minus_block = b_pow.mul(&b_pow);
    let plus_block = a_pow.mul(&b_pow);
    Ok((minus_block, plus_block))
}

/// Samples `n_blocks` polymer blocks at energy `e`.
pub fn polymer_blocks(ps: &PolymerSystem, e: f64, n_blocks: usize) -> Result<Vec<RealMatrix>> {
    if n_blocks == 0 {
        return Err(Error::DomainError("n_blocks must be >= 1".into()));
    }
    let (minus_block, plus_block) = polymer_block_matrices(ps, e)?;
    let states = orbit(&ps.sampler, n_blocks);
    let mut out = Vec::with_capacity(n_blocks);
    for s in &states {
        match s {
            State::Symbol(0) => out.push(minus_block.clone()),
            State::Symbol(1) => out.push(plus_block.clone()),
            State::Symbol(k) => {
                return Err(Error::UnknownSymbol(format!("polymer sampler emitted symbol {k}")))
            }
            State::Point(_) => {
                return Err(Error::UnknownSymbol("polymer sampler emitted a circle point".into()))
            }
        }
    }
    Ok(out)
}

/// Exact probability-weighted expectations (E log|L|, E log|Lᵀ|) over a
/// finite symbol distribution. No sampling is involved, so certified
/// bounds built on these are deterministic.
pub fn exact_expectations(
    mats: &[RealMatrix],
    dist: &[f64],
) -> Result<(RealMatrix, RealMatrix)> {
    if mats.is_empty() || mats.len() != dist.len() {
        return Err(Error::DomainError("matrices and distribution lengths differ".into()));
    }
    if dist.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
        return Err(Error::DomainError("probabilities outside [0,1]".into()));
    }
    let total: f64 = dist.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::DomainError(format!("distribution sums to {total}, not 1")));
    }
    let d = mats[0].dim();
    let mut e_log = RealMatrix::zeros(d);
    let mut e_log_dag = RealMatrix::zeros(d);
    for (m, &p) in mats.iter().zip(dist) {
        if p == 0.0 {
            continue;
        }
        e_log = e_log.add(&crate::matan::log_abs(m)?.scale(p));
        e_log_dag = e_log_dag.add(&crate::matan::log_abs(&m.transpose())?.scale(p));
    }
    Ok((e_log, e_log_dag))
}

/// Stationary distribution of a two-state chain.
pub fn stationary_2state(rows: &[[f64; 2]; 2]) -> [f64; 2] {
    // pi solves pi P = pi: pi0 * p01 = pi1 * p10.
    let p01 = rows[0][1];
    let p10 = rows[1][0];
    if p01 + p10 == 0.0 {
        return [0.5, 0.5]; // reducible chain; both states absorbing
    }
    [p10 / (p01 + p10), p01 / (p01 + p10)]
}

/// Two-state Markov kind with stationary distribution (pi0, 1-pi0) and
/// lag-one autocorrelation `rho`: P = rho·I + (1-rho)·1πᵀ.
pub fn markov_correlated(pi0: f64, rho: f64) -> Result<DynKind> {
    if !(0.0..=1.0).contains(&pi0) || !(0.0..1.0).contains(&rho.abs()) {
        return Err(Error::DomainError("need pi0 in [0,1], |rho| < 1".into()));
    }
    let pi1 = 1.0 - pi0;
    let rows = [
        [rho + (1.0 - rho) * pi0, (1.0 - rho) * pi1],
        [(1.0 - rho) * pi0, rho + (1.0 - rho) * pi1],
    ];
    if rows.iter().flatten().any(|&p| !(0.0..=1.0).contains(&p)) {
        return Err(Error::DomainError("correlation incompatible with distribution".into()));
    }
    Ok(DynKind::Markov { rows, init: [pi0, pi1] })
}

/// Alphabet for ASCII symbol-sequence fixtures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Alphabet {
    /// '-' is symbol 0, '+' is symbol 1 (polymer convention).
    PlusMinus,
    /// '0', '1', … up to '9'.
    Digits,
}

/// Renders a symbol sequence as a newline-free ASCII string.
pub fn symbols_to_ascii(symbols: &[usize], alphabet: Alphabet) -> Result<String> {
    let mut s = String::with_capacity(symbols.len());
    for &k in symbols {
        match alphabet {
            Alphabet::PlusMinus => match k {
                0 => s.push('-'),
                1 => s.push('+'),
                _ => return Err(Error::UnknownSymbol(format!("symbol {k} not in {{+,-}}"))),
            },
            Alphabet::Digits => {
                if k > 9 {
                    return Err(Error::UnknownSymbol(format!("symbol {k} not a digit")));
                }
                s.push(char::from(b'0' + k as u8));
            }
        }
    }
    Ok(s)
}

/// Parses an ASCII symbol string ("+-+-…" or "0101…").
pub fn symbols_from_ascii(s: &str) -> Result<Vec<usize>> {
    s.chars()
        .map(|c| match c {
            '-' => Ok(0),
            '+' => Ok(1),
            '0'..='9' => Ok((c as u8 - b'0') as usize),
            _ => Err(Error::UnknownSymbol(format!("character {c:?} is not a symbol"))),
        })
        .collect()
}
