use thiserror::Error;

/// Errors raised by the construction and evaluation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("value {value} outside the domain [{lo}, {hi}]")]
    OutOfDomain { value: f64, lo: f64, hi: f64 },

    #[error("radius map is not certified monotone for epsilon = {epsilon}")]
    NotMonotone { epsilon: f64 },

    #[error("operation requires n = 2, got n = {0}")]
    UnsupportedDimension(usize),

    #[error("blocks {0} and {1} violate the spacing rule |p_i - p_j| >= max(R_i, R_j) + 2")]
    SpacingViolation(usize, usize),

    #[error("epsilon = {epsilon} failed admissibility ({failed})")]
    EpsilonInadmissible { epsilon: f64, failed: String },

    #[error("no unit sphere through the point avoids every block ball")]
    NoBubble,

    #[error("paper normalization with g(0) = {g0} != 1 does not describe a bubble family")]
    NormalizationMismatch { g0: f64 },

    #[error("degenerate stencil at index {0}")]
    DegenerateStencil(usize),

    #[error("degenerate face {0}")]
    DegenerateFace(usize),

    #[error("integration did not converge: {0}")]
    NonConvergence(String),

    #[error("path reached the axis off target at s = {s} (cos phi = {cos_phi})")]
    PoleSingularity { s: f64, cos_phi: f64 },

    #[error("perturbation constraint violated: {0}")]
    ConstraintViolation(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
