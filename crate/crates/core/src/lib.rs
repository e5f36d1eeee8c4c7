//! Dense operator calculus for trigonometric R-matrices, boundary K-matrices,
//! transfer matrices and qKZ transport matrices, with residual-based checks of
//! the identities relating them.
//!
//! Everything is generic over the real scalar type (`f32` or `f64`); the
//! aliases at the crate root fix it to `f64`.

pub mod error;
pub mod function;
pub mod maps;
pub mod poly;
pub mod qkz;
pub mod rk;
pub mod sampling;
pub mod scalar;
pub mod sectors;
pub mod tensor;
pub mod transfer;

pub use error::{Error, Result};
pub use scalar::Real;

/// Complex scalar in double precision.
pub type C64 = num_complex::Complex<f64>;
pub type Operator = tensor::TensorOperator<f64>;
pub type Function = function::MatrixFunction<f64>;
pub type RDatum = rk::RMatrixDatum<f64>;
pub type KDatum = rk::KMatrixDatum<f64>;
pub type Config = transfer::ChainConfig<f64>;
pub type SpinChain = transfer::Chain<f64>;
