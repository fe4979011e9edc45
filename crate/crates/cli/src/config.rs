//! Run configuration: a single JSON document with per-subcommand
//! parameter blocks, overridable by command-line flags. Unknown keys are
//! rejected everywhere so a typo cannot silently fall back to a default.

use serde::{Deserialize, Serialize};

use lyapcert::error::{Error, Result};

/// Top-level configuration file shape.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub subcommand: String,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub out: Option<String>,
    #[serde(default)]
    pub format: Option<String>,
    #[serde(default)]
    pub params: serde_json::Value,
}

pub fn parse_file(text: &str) -> Result<FileConfig> {
    serde_json::from_str(text).map_err(|e| Error::DomainError(format!("bad config: {e}")))
}

/// Parses a subcommand parameter block, rejecting unknown keys.
pub fn parse_params<T: for<'de> Deserialize<'de> + Default>(v: &serde_json::Value) -> Result<T> {
    if v.is_null() {
        return Ok(T::default());
    }
    serde_json::from_value(v.clone())
        .map_err(|e| Error::DomainError(format!("bad params: {e}")))
}

fn sqrt1000() -> f64 {
    1000.0f64.sqrt()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExampleParams {
    pub a: f64,
    pub b: f64,
    pub p0: f64,
    pub n: usize,
    pub trials: usize,
}

impl Default for ExampleParams {
    fn default() -> Self {
        Self { a: sqrt1000(), b: sqrt1000(), p0: 0.5, n: 100_000, trials: 20 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PolymerParams {
    pub p: u32,
    pub delta1: f64,
    pub delta2: f64,
    pub prob_minus: f64,
    /// Energy; when absent the first admissible grid point is used.
    pub e: Option<f64>,
    /// Potential depth; when absent ⌈b₀ + |E|⌉ + 1 is used.
    pub v: Option<f64>,
    /// "bernoulli" or "markov".
    pub sampler: String,
    /// Lag-one autocorrelation of the Markov sampler.
    pub markov_rho: f64,
    pub n_blocks: usize,
    pub trials: usize,
}

impl Default for PolymerParams {
    fn default() -> Self {
        Self {
            p: 5,
            delta1: 0.5,
            delta2: 0.5,
            prob_minus: 0.6,
            e: None,
            v: None,
            sampler: "bernoulli".into(),
            markov_rho: 0.8,
            n_blocks: 10_000,
            trials: 10,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OffSpectrumParams {
    pub e: f64,
    /// Two-valued potential; v0 with probability p0, else v1.
    pub v0: f64,
    pub v1: f64,
    pub p0: f64,
    pub n: usize,
    pub trials: usize,
}

impl Default for OffSpectrumParams {
    fn default() -> Self {
        Self { e: 0.0, v0: -32.0, v1: -48.0, p0: 0.5, n: 10_000, trials: 5 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StabilityParams {
    pub d: usize,
    pub gamma: f64,
    pub eta: f64,
    pub c0: f64,
    pub c1: f64,
    pub eps1: f64,
    /// Perturbation as a fraction of δ₀.
    pub delta_frac: f64,
    pub n: usize,
    pub families: usize,
}

impl Default for StabilityParams {
    fn default() -> Self {
        Self {
            d: 2,
            gamma: 0.5,
            eta: 0.2,
            c0: 1.0,
            c1: 2.5,
            eps1: 0.4,
            delta_frac: 0.5,
            n: 10_000,
            families: 20,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct JacobiParams {
    pub theta_min: f64,
    pub theta_max: f64,
    pub eps1: f64,
    /// Absolute energy; takes precedence over `e_frac` when set.
    pub e: Option<f64>,
    /// Energy as a fraction of the admissible window E₀.
    pub e_frac: f64,
    pub n: usize,
    pub seeds: usize,
}

impl Default for JacobiParams {
    fn default() -> Self {
        Self { theta_min: 1.5, theta_max: 2.5, eps1: 0.3, e: None, e_frac: 0.5, n: 10_000, seeds: 50 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GtCheckParams {
    pub families: usize,
    pub n_max: usize,
    pub d_max: usize,
    /// Entry scale of the random Hermitian factors.
    pub scale: f64,
    pub half_width: f64,
    pub nodes: usize,
}

impl Default for GtCheckParams {
    fn default() -> Self {
        Self { families: 1000, n_max: 5, d_max: 4, scale: 0.5, half_width: 9.0, nodes: 4001 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ApCheckParams {
    /// "v1" or "v2".
    pub preset: String,
    pub families: usize,
    pub len_min: usize,
    pub len_max: usize,
    /// Fixed sequence length overriding the range (guard demos).
    pub fixed_len: Option<usize>,
}

impl Default for ApCheckParams {
    fn default() -> Self {
        Self { preset: "v1".into(), families: 500, len_min: 2, len_max: 200, fixed_len: None }
    }
}

/// Dynamical system description for the estimator subcommand.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "snake_case")]
pub enum SystemSpec {
    Bernoulli { p0: f64 },
    Markov { rows: [[f64; 2]; 2], init: [f64; 2] },
    Rotation { alpha: f64 },
    SkewShift { alpha: f64, beta: f64 },
    Doubling,
    /// ASCII symbol string, "+-+-…" or "0101…".
    Explicit { symbols: String },
}

/// Cocycle description: matrices as row-major nested arrays.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "snake_case")]
pub enum CocycleSpec {
    Table { mats: Vec<Vec<Vec<f64>>> },
    Threshold { threshold: f64, below: Vec<Vec<f64>>, above: Vec<Vec<f64>> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EstimateParams {
    pub system: SystemSpec,
    pub cocycle: CocycleSpec,
    pub n: usize,
    pub trials: usize,
}

impl Default for EstimateParams {
    fn default() -> Self {
        Self {
            system: SystemSpec::Bernoulli { p0: 0.5 },
            cocycle: CocycleSpec::Table {
                mats: vec![
                    vec![vec![3.0, 0.0], vec![0.0, 1.0 / 3.0]],
                    vec![vec![0.0, -3.0], vec![1.0 / 3.0, 0.0]],
                ],
            },
            n: 10_000,
            trials: 10,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AlmostCommutingParams {
    /// Positive definite symbol matrices (row-major nested arrays).
    pub mats: Vec<Vec<Vec<f64>>>,
    pub dist: Vec<f64>,
    /// Convergence-speed constant of the conditional bounds.
    pub c: f64,
    pub t_values: Vec<f64>,
    pub n: usize,
    pub trials: usize,
    /// Points in the commutator-monotonicity sweep.
    pub sweep: usize,
}

impl Default for AlmostCommutingParams {
    fn default() -> Self {
        Self {
            mats: vec![
                vec![vec![2.0, 0.0], vec![0.0, 0.5]],
                vec![vec![1.7012, 0.0219], vec![0.0219, 0.6004]],
            ],
            dist: vec![0.5, 0.5],
            c: 1.0,
            t_values: vec![0.5, 1.0],
            n: 2000,
            trials: 6,
            sweep: 20,
        }
    }
}

pub fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<lyapcert::matan::RealMatrix> {
    let refs: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
    lyapcert::matan::RealMatrix::from_rows(&refs)
}

pub fn system_from_spec(spec: &SystemSpec) -> Result<lyapcert::dynamics::DynSystem> {
    use lyapcert::dynamics::{DynKind, DynSystem};
    let kind = match spec {
        SystemSpec::Bernoulli { p0 } => DynKind::Bernoulli { p0: *p0 },
        SystemSpec::Markov { rows, init } => DynKind::Markov { rows: *rows, init: *init },
        SystemSpec::Rotation { alpha } => DynKind::Rotation { alpha: *alpha },
        SystemSpec::SkewShift { alpha, beta } => DynKind::SkewShift { alpha: *alpha, beta: *beta },
        SystemSpec::Doubling => DynKind::Doubling,
        SystemSpec::Explicit { symbols } => {
            DynKind::Explicit(lyapcert::dynamics::symbols_from_ascii(symbols)?)
        }
    };
    DynSystem::new(kind)
}

pub fn cocycle_from_spec(spec: &CocycleSpec) -> Result<lyapcert::dynamics::Cocycle> {
    use lyapcert::dynamics::Cocycle;
    match spec {
        CocycleSpec::Table { mats } => {
            let ms = mats.iter().map(|m| matrix_from_rows(m)).collect::<Result<Vec<_>>>()?;
            Cocycle::table(ms)
        }
        CocycleSpec::Threshold { threshold, below, above } => {
            Cocycle::threshold(*threshold, matrix_from_rows(below)?, matrix_from_rows(above)?)
        }
    }
}
