//! Error type shared by all solver modules.

use thiserror::Error;

/// Errors surfaced by domain construction, solves and scans.
///
/// Numeric payloads are carried as `f64` regardless of the scalar type the
/// computation ran in; they only feed diagnostics.
#[derive(Debug, Clone, Error)]
pub enum AmpError {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid mode index: {0}")]
    InvalidMode(String),

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("norm kind not supported on this domain: {0}")]
    NormUnsupported(String),

    #[error("point not strictly inside the domain: ({x}, {y:?})")]
    PointOutsideDomain { x: f64, y: Option<f64> },

    #[error("resonance: mu = {mu} is within the guard of eigenvalue {lambda} (mode {mode})")]
    Resonance { mode: String, lambda: f64, mu: f64 },

    #[error(
        "system resonance: mu = {mu} makes mode {mode} singular on branch {branch} \
         (lambda - mu - xi = {gap})"
    )]
    SystemResonance {
        mode: String,
        branch: usize,
        mu: f64,
        gap: f64,
    },

    #[error("discrete resonance: mu = {mu} is within {tol} of discrete eigenvalue {lambda}")]
    DiscreteResonance { mu: f64, lambda: f64, tol: f64 },

    #[error("hypothesis violation: {0}")]
    Hypothesis(String),

    #[error("every family member is cap-bound; the ratio estimate is undefined")]
    AllCapBound,
}

pub type Result<T> = std::result::Result<T, AmpError>;
