use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("zero vector has no projective class")]
    ZeroVector,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("point is outside chart U_{chart} (|zeta_{chart}|/|zeta| below floor)")]
    ChartUndefined { chart: usize },

    #[error("regularization parameter must be positive, got {0}")]
    NonpositiveEpsilon(f64),

    #[error("atoms[{index}].weight: weight must be positive, got {weight}")]
    NegativeWeight { index: usize, weight: f64 },

    #[error("weights sum to {sum}, expected 1")]
    WeightSumMismatch { sum: f64 },

    #[error("measure has no atoms")]
    EmptyMeasure,

    #[error("Riesz exponent alpha = {alpha} outside (0, {max})")]
    AlphaOutOfRange { alpha: f64, max: f64 },

    #[error("finite-difference stencil touches a singularity")]
    SingularStencil,

    #[error("Monge-Ampere density {value} is negative beyond tolerance; step too large")]
    NegativeDensity { value: f64 },

    #[error("grid too coarse: chart-overlap volume mismatch {mismatch:.3e}")]
    GridTooCoarse { mismatch: f64 },

    #[error("expansion needs {terms} tuples, cap is {cap}")]
    CombinatorialBlowup { terms: u128, cap: u128 },

    #[error("quadrature did not converge: estimate {estimate}, error {error:.3e}")]
    NonConvergent { estimate: f64, error: f64 },

    #[error("{path}: {message}")]
    Parse { path: String, message: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// True for failures of a numerical method, as opposed to bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::NonConvergent { .. }
                | Error::GridTooCoarse { .. }
                | Error::NegativeDensity { .. }
                | Error::SingularStencil
        )
    }
}
