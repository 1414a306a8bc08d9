use thiserror::Error;

use crate::tam::Coefficient;

/// One violated [`JointSpec`](crate::model::JointSpec) invariant. Each variant
/// names exactly one field.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecViolation {
    #[error("n_bolts below minimum: {n} < {min}")]
    TooFewBolts { n: usize, min: usize },
    #[error("target_load must be positive (got {0})")]
    TargetLoad(f64),
    #[error("yield_load must be positive (got {0})")]
    YieldLoad(f64),
    #[error("warn_fraction must lie in (0, 1] (got {0})")]
    WarnFraction(f64),
}

impl SpecViolation {
    /// Name of the offending field.
    pub fn field(&self) -> &'static str {
        match self {
            Self::TooFewBolts { .. } => "n_bolts",
            Self::TargetLoad(_) => "target_load",
            Self::YieldLoad(_) => "yield_load",
            Self::WarnFraction(_) => "warn_fraction",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid joint spec: {}", join(.0))]
    InvalidSpec(Vec<SpecViolation>),

    #[error("position {position} out of range 1..={n}")]
    PositionOutOfRange { position: usize, n: usize },

    #[error("position {position} is not part of the pattern")]
    UnknownPosition { position: usize },

    #[error("tightening step {step} out of range 1..={n}")]
    StepOutOfRange { step: usize, n: usize },

    #[error("order is not a permutation of 1..={n}: {reason}")]
    NotAPermutation { n: usize, reason: String },

    #[error("{kind} requires {required} bolts (got {n})")]
    UnsupportedPattern {
        kind: &'static str,
        required: usize,
        n: usize,
    },

    #[error("custom pattern requires an explicit order")]
    MissingCustomOrder,

    #[error("pattern covers {pattern} bolts but the joint has {joint}")]
    PatternSizeMismatch { pattern: usize, joint: usize },

    #[error("load at bolt {position} must be positive (got {load})")]
    NonPositiveLoad { position: usize, load: f64 },

    #[error("invalid bench model: {0}")]
    InvalidModel(String),

    #[error("load history has zero diagonal entry at step {step}")]
    ZeroDiagonal { step: usize },

    #[error("invalid load history: {0}")]
    InvalidHistory(String),

    #[error("interaction matrix is not unit upper triangular at ({row}, {col})")]
    NotUnitUpperTriangular { row: usize, col: usize },

    #[error("infeasible target: bolt {position} would need initial load {load}")]
    InfeasibleTarget { position: usize, load: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("did not converge after {iterations} iterations; residuals {residuals:?}")]
    DidNotConverge {
        iterations: usize,
        residuals: Vec<f64>,
    },

    #[error("ring too small for disjoint influence zones: n = {n}, need at least {min}")]
    RingTooSmall { n: usize, min: usize },

    #[error("invalid protocol: {0}")]
    InvalidProtocol(String),

    #[error("missing measurement of bolt {position} after operation {operation}")]
    MissingMeasurement { position: usize, operation: usize },

    #[error("zero applied load on bolt {position}; cannot normalise {coefficient}")]
    ZeroAppliedLoad {
        position: usize,
        coefficient: Coefficient,
    },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("no tightened bolts to summarise")]
    EmptyLoads,

    #[error("reference load of bolt {position} is zero")]
    ZeroReference { position: usize },

    #[error("csv: {0}")]
    Csv(String),
}

fn join(violations: &[SpecViolation]) -> String {
    violations
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        Error::Csv(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
