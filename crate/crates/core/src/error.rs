use thiserror::Error;

use crate::lang::ParseError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid arity {arity}: at least one argument is required")]
    InvalidArity { arity: usize },

    #[error("arity {arity} exceeds the supported maximum of {max}")]
    ArityTooLarge { arity: usize, max: usize },

    #[error("value {value} at position {index} is not a probability in [0, 1]")]
    Domain { index: usize, value: f64 },

    #[error("operation `{op}` returned {value}, which is outside [0, 1]")]
    OperationRange { op: String, value: f64 },

    #[error("boundary decomposition needs sum = {expected}, got {sum}")]
    BoundarySum { sum: f64, expected: f64 },

    #[error("interior decomposition needs sum <= {limit}, got {sum}")]
    InteriorSum { sum: f64, limit: f64 },

    #[error("upper decomposition needs sum > {limit}, got {sum}")]
    UpperSum { sum: f64, limit: f64 },

    #[error("target {target} lies outside the Frechet interval [{lower}, {upper}]")]
    InfeasibleTarget { target: f64, lower: f64, upper: f64 },

    #[error("index {index} out of range for arity {arity}")]
    IndexOutOfRange { index: usize, arity: usize },

    #[error("blend {0} is not in [0, 1]")]
    InvalidBlend(f64),

    #[error("loss exponent {0} < 1 makes the objective nonconvex")]
    NonConvexLoss(f64),

    #[error("LP export needs a piecewise-linear loss (exponent 1), got exponent {0}")]
    NotPiecewiseLinear(f64),

    #[error("grid oracle supports at most {max} free atoms, model has {free}")]
    OracleScale { free: usize, max: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("interpretation does not match the model: {0}")]
    Interpretation(String),

    #[error("grounding failed: {0}")]
    Grounding(String),

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("malformed input at line {line}: {message}")]
    Format { line: usize, message: String },
}
