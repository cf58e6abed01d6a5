use thiserror::Error;

/// Errors raised by the solver pipeline and its kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,
    #[error("zero direction vector")]
    ZeroDirection,
    #[error("cylinder axes are parallel")]
    ParallelAxes,
    #[error("could not separate parallel axis directions by perturbation")]
    PerturbationFailed,
    #[error("cylinders {0} and {1} do not intersect")]
    NotPairwiseIntersecting(usize, usize),
    #[error("cylinder {0} of the first family and {1} of the second do not intersect")]
    NotCrossIntersecting(usize, usize),
    #[error("line hits {hits} cylinders, guarantee requires {required}")]
    GuaranteeMissed { hits: usize, required: usize },
    #[error("pipeline invariant violated: {0}")]
    InvariantViolated(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("body {0} is not well-rounded for the given D")]
    NotWellRounded(usize),
    #[error("body {0} is too far from the reference body")]
    NotPairwiseIntersectable(usize),
    #[error("instance generation failed: {0}")]
    GenerationFailed(String),
    #[error("oracle resolution too coarse: {0} kept samples")]
    InsufficientResolution(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
