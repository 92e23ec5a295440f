use std::io;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum McapError {
    #[error("MissingHeader: expected header `parameter,loglik`")]
    MissingHeader,
    #[error("MalformedRow: line {0}")]
    MalformedRow(u64),
    #[error("NonFiniteValue: line {0}")]
    NonFiniteValue(u64),
    #[error("TooFewPoints: got {0} points, need at least 5")]
    TooFewPoints(usize),
    #[error("SpanTooSmall: trunc(lambda * K) = {0}, need at least 3")]
    SpanTooSmall(usize),
    #[error("DegenerateNeighborhood: fewer than 3 distinct parameter values with positive weight")]
    DegenerateNeighborhood,
    #[error("SingularLocalFit: rank-deficient local design at grid point {0}")]
    SingularLocalFit(f64),
    #[error("SingularDesign: fewer than 3 distinct positive-weight parameter values")]
    SingularDesign,
    #[error("InsufficientDof: only {0} positive-weight points, need at least 4")]
    InsufficientDof(usize),
    #[error("NonConcaveFit: quadratic coefficient a = {0} is not positive")]
    NonConcaveFit(f64),
    #[error("ZeroCurvature: quadratic coefficient a is zero")]
    ZeroCurvature,
    #[error("InvalidConfidence: {0} is not in (0, 1)")]
    InvalidConfidence(f64),
    #[error("InvalidLambda: {0} is not in (0, 1]")]
    InvalidLambda(f64),
    #[error("InvalidGrid: ngrid = {0}, need at least 2")]
    InvalidGrid(usize),
    #[error("DomainError: {0}")]
    DomainError(String),
    #[error("OptimizationFailure: {0}")]
    OptimizationFailure(String),
    #[error("ReplicateFailureRate: {failed} of {total} replicates failed (limit 2%)")]
    ReplicateFailureRate { failed: usize, total: usize },
    #[error("IoError: {0}")]
    Io(#[from] io::Error),
    #[error("JsonError: {0}")]
    Json(#[from] serde_json::Error),
}

impl McapError {
    /// Short stable name used in CLI diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            McapError::MissingHeader => "MissingHeader",
            McapError::MalformedRow(_) => "MalformedRow",
            McapError::NonFiniteValue(_) => "NonFiniteValue",
            McapError::TooFewPoints(_) => "TooFewPoints",
            McapError::SpanTooSmall(_) => "SpanTooSmall",
            McapError::DegenerateNeighborhood => "DegenerateNeighborhood",
            McapError::SingularLocalFit(_) => "SingularLocalFit",
            McapError::SingularDesign => "SingularDesign",
            McapError::InsufficientDof(_) => "InsufficientDof",
            McapError::NonConcaveFit(_) => "NonConcaveFit",
            McapError::ZeroCurvature => "ZeroCurvature",
            McapError::InvalidConfidence(_) => "InvalidConfidence",
            McapError::InvalidLambda(_) => "InvalidLambda",
            McapError::InvalidGrid(_) => "InvalidGrid",
            McapError::DomainError(_) => "DomainError",
            McapError::OptimizationFailure(_) => "OptimizationFailure",
            McapError::ReplicateFailureRate { .. } => "ReplicateFailureRate",
            McapError::Io(_) => "IoError",
            McapError::Json(_) => "JsonError",
        }
    }

    /// True for errors arising from the numerics of a fit rather than bad user input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            McapError::DegenerateNeighborhood
                | McapError::SingularLocalFit(_)
                | McapError::SingularDesign
                | McapError::InsufficientDof(_)
                | McapError::NonConcaveFit(_)
                | McapError::ZeroCurvature
                | McapError::OptimizationFailure(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, McapError>;
