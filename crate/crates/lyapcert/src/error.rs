//! Crate-wide error type.
//!
//! Errors fall into three families that callers (in particular the CLI)
//! treat differently:
//!
//! * input/parameter problems (`InvalidMatrix`, `DomainError`, ...),
//! * theorem hypotheses that failed a runtime check (`HypothesisNotMet`,
//!   `APHypothesisViolated`, ...) — the requested certificate simply does
//!   not apply to the given data,
//! * broken certificates (`CertificateBroken`, `SandwichViolated`) — a
//!   verified hypothesis led to a violated conclusion, which signals an
//!   implementation bug or numerically invalid input, never a failure of
//!   the underlying theorems.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("degenerate matrix: {0}")]
    DegenerateMatrix(String),

    #[error("matrix is not positive definite: {0}")]
    NotPositiveDefinite(String),

    #[error("matrix is not normal: {0}")]
    NotNormal(String),

    #[error("avalanche-principle hypotheses violated: {0}")]
    APHypothesisViolated(String),

    #[error("sandwich inequality violated (implementation bug or singular input): {0}")]
    SandwichViolated(String),

    #[error("alpha too large for certified bound: {0}")]
    AlphaTooLarge(String),

    #[error("quadrature underresolved: {0}")]
    QuadratureUnderresolved(String),

    #[error("near-singular argument: {0}")]
    NearSingularArgument(String),

    #[error("hypothesis not met: {0}")]
    HypothesisNotMet(String),

    #[error("certificate broken (measured data violates a verified certificate): {0}")]
    CertificateBroken(String),

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("perturbation too large: {0}")]
    PerturbationTooLarge(String),

    #[error("mixed regime: {0}")]
    MixedRegime(String),

    #[error("energy too large: {0}")]
    EnergyTooLarge(String),

    #[error("unknown symbol: {0}")]
    UnknownSymbol(String),
}

pub type Result<T> = std::result::Result<T, Error>;
