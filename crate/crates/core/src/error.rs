use thiserror::Error;

/// Errors raised by state validation, model transforms and the LP engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("density matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("density matrix trace is {trace} (expected 1)")]
    BadTrace { trace: f64 },

    #[error("state is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("G[0][0] must be exactly 1 (got {value})")]
    BadNormalization { value: f64 },

    #[error("{which} Bloch vector has norm {norm} > 1")]
    BlochTooLong { which: &'static str, norm: f64 },

    #[error("measurement axis has norm {norm} (expected unit)")]
    NotUnitAxis { norm: f64 },

    #[error("invalid {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid measurement set: {0}")]
    MeasurementSet(String),

    #[error("measurement set is empty")]
    EmptyMeasurementSet,

    #[error("model and target use different measurement sets")]
    MismatchedMeasurements,

    #[error("models are defined on different hidden-state grids")]
    MismatchedGrid,

    #[error("invalid g-model: {0}")]
    InvalidModel(String),

    #[error("model has zero total mass; reconstructed probabilities are undefined")]
    DegenerateModel,

    #[error("interior atom at |eta| = {norm} lies outside the unit ball")]
    OutsideBall { norm: f64 },

    #[error("model with S = {s} > 1 cannot be completed to an LHS model")]
    NotCompletable { s: f64 },

    #[error("model is inconsistent with its target: {0}")]
    Inconsistent(String),

    #[error("no ABT decomposition exists: |a| + |b| + max|T_ij| = {required} > 1")]
    DecompositionInfeasible { required: f64 },

    #[error("objective {objective} <= 1: no steering witness exists")]
    NoWitness { objective: f64 },

    #[error("unknown LP solver `{0}`")]
    UnknownSolver(String),

    #[error("LP solver failure: {0}")]
    Solver(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
