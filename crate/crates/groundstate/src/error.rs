//! Error type shared by every module of the crate.

use crate::eigen::EigenResult;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("empty mask: no grid point lies strictly inside the domain")]
    EmptyMask,
    #[error("invalid domain spec: {0}")]
    InvalidSpec(String),
    #[error("resolution too coarse: h = {h} exceeds r/4 = {limit}")]
    ResolutionTooCoarse { h: f64, limit: f64 },
    #[error("invalid weight parameters: {0}")]
    InvalidParams(String),
    #[error("negative semi-classical scale n = {0}")]
    NegativeScale(f64),
    #[error("nodes {0} and {1} are not adjacent on the grid")]
    NonAdjacent(usize, usize),
    #[error("weight overflow: n * (max phi - min phi) = {0} exceeds the guard 300")]
    WeightOverflow(f64),
    #[error("solver did not converge after {iters} iterations (best residual {residual:.3e})")]
    NoConvergence {
        iters: usize,
        residual: f64,
        /// Best iterate found; callers that tolerate loose records may still use it.
        best: Box<EigenResult>,
    },
    #[error("mass matrix is not positive definite")]
    MassNotPd,
    #[error("matrix dimension {dim} exceeds the dense-solver cap {max}")]
    TooLarge { dim: usize, max: usize },
    #[error("zero vector supplied where a nonzero vector is required")]
    ZeroVector,
    #[error("too few records for a verdict: {0} < {1}")]
    TooFewRecords(usize, usize),
    #[error("wrong weight tag: expected {expected}, got {got}")]
    WrongWeightTag {
        expected: &'static str,
        got: &'static str,
    },
    #[error("test function is supported on nodes where the ground state falls below threshold")]
    SupportViolation,
}

pub type Result<T> = std::result::Result<T, Error>;
