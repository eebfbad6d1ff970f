use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("adaptive integrator could not meet tolerance near x = {x} (step {step:e})")]
    StepUnderflow { x: f64, step: f64 },

    #[error("trial eigenvalue has Re κ = {re_kappa} ≤ 0; state is not square integrable")]
    NonDecaying { re_kappa: f64 },

    #[error("unknown vector has length {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("Newton iteration did not converge after {iterations} iterations (residual {last_norm:e})")]
    NoConvergence { iterations: usize, last_norm: f64 },

    #[error("enlarging the cutoff still moves κ by {shift:e}")]
    CutoffNotConverged { shift: f64 },

    #[error("Jacobian is singular (residual {last_norm:e})")]
    SingularJacobian { last_norm: f64 },

    #[error("branch lost after parameter {last_good}")]
    BranchLost { last_good: f64 },

    #[error("γ² + g²/4 vanishes")]
    DegenerateDenominator,

    #[error("similarity matrix is singular at this parameter")]
    SingularSimilarity,

    #[error("entrywise extrapolation did not settle (spread {spread:e})")]
    NonConvergentLimit { spread: f64 },

    #[error("no mode occupation satisfies the two-mode equations for this energy")]
    NoAmplitudeSolution,

    #[error("spectrum size changed from {expected} to {got} along the contour")]
    CardinalityChange { expected: usize, got: usize },

    #[error("branch matching still ambiguous at minimal step (φ = {phi})")]
    AmbiguousMatching { phi: f64 },

    #[error("log-log fit residual {residual:e} exceeds threshold")]
    FitFailure { residual: f64 },
}
