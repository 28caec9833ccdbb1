use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("statistics parameter alpha = {0} outside [0, 1)")]
    AlphaOutOfRange(f64),

    #[error("requested grid needs {needed} points per side, cap is {cap}")]
    GridTooLarge { needed: usize, cap: usize },

    #[error("radius {radius} exceeds half box length {half_box}")]
    RadiusOutsideBox { radius: f64, half_box: f64 },

    #[error("density mass {actual} does not match reference mass {expected}")]
    MassMismatch { actual: f64, expected: f64 },

    #[error("density is negative ({min}) somewhere on the grid")]
    NegativeDensity { min: f64 },

    #[error("retraction failed: orbital block is rank deficient")]
    RankDeficient,

    #[error("line search failed after {backtracks} backtracks (step {step:e})")]
    LineSearchFailed { backtracks: usize, step: f64 },

    #[error("eigensolver did not converge after {iterations} iterations (max residual {residual:e})")]
    EigensolverNotConverged { iterations: usize, residual: f64 },

    #[error("Husimi window of radius {radius} around ({cx}, {cy}) leaves the box")]
    WindowOutsideBox { radius: f64, cx: f64, cy: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("checkpoint format: {0}")]
    Checkpoint(String),

    #[error("configuration invalid:\n  - {}", .0.join("\n  - "))]
    Config(Vec<String>),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Numerical failures of a run, as opposed to rejected input.
    pub fn is_solver_failure(&self) -> bool {
        matches!(
            self,
            Error::MassMismatch { .. }
                | Error::NegativeDensity { .. }
                | Error::RankDeficient
                | Error::LineSearchFailed { .. }
                | Error::EigensolverNotConverged { .. }
        )
    }
}
