use thiserror::Error;

/// Error type shared by every module in the crate.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum CoreError {
    #[error("invalid grid configuration: {0}")]
    GridConfig(String),

    #[error("field is on the {found} side, expected {expected}")]
    WrongSide { expected: &'static str, found: &'static str },

    #[error("field contains a non-finite value at node {index}")]
    NonFinite { index: usize },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("boundary guard tripped at t = {time}: mass fraction {fraction:.3e} beyond 0.9 R exceeds {threshold:.3e}")]
    GuardTripped { time: f64, fraction: f64, threshold: f64 },

    #[error("high-frequency smallness violated: |P_{{>=N}} u0|_{{H^sc}} = {norm:.6e} > delta0 = {delta0:.6e}")]
    SmallnessViolated { norm: f64, delta0: f64 },

    #[error("target unreachable: {0}")]
    Unreachable(String),

    #[error("iteration diverged: distance grew to {distance:.3e} (initial {initial:.3e})")]
    Diverged { distance: f64, initial: f64 },

    #[error("fit rejected: {0}")]
    FitDegenerate(String),

    #[error("solver failure at t = {time}: {message}")]
    SolverFailure { time: f64, message: String },
}
