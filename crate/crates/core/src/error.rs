use thiserror::Error;

use crate::tensor::Label;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("local dimension must be at least 2, got {0}")]
    InvalidDimension(usize),

    #[error("duplicate leg label {0}")]
    DuplicateLabel(Label),

    #[error("unknown leg label {0}")]
    UnknownLabel(Label),

    #[error("operator on {legs} legs of dimension {n} needs {entries} entries, cap is {cap}")]
    CapExceeded {
        n: usize,
        legs: usize,
        entries: u128,
        cap: u128,
    },

    #[error("expected an operator on {expected} legs, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("operands live on different leg spaces")]
    SpaceMismatch,

    #[error("matrix shape {rows}x{cols} does not match leg space dimension {dim}")]
    ShapeMismatch {
        rows: usize,
        cols: usize,
        dim: usize,
    },

    #[error("operator has non-finite entries")]
    NonFinite,

    #[error("reference operator is numerically zero")]
    ZeroReference,

    #[error("{what} is singular at x = {at}")]
    Singular { what: String, at: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid chain configuration: {0}")]
    InvalidConfig(String),

    #[error("could not draw a non-singular sample after {0} attempts")]
    SamplingExhausted(usize),

    #[error("{equation} not satisfied: relative residual {residual:e} exceeds {tolerance:e}")]
    EquationViolated {
        equation: String,
        residual: f64,
        tolerance: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
