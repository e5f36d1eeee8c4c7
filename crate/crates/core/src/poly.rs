//! Polynomial-degree checks by interpolation.

use num_complex::Complex;

use crate::error::Result;
use crate::function::{lagrange, MatrixFunction};
use crate::scalar::{lit, Real};
use crate::tensor::{equality_residual, Residual, TensorOperator};

/// Radius of the interpolation circle.
pub const NODE_RADIUS: f64 = 1.05;

/// Default held-out point, strictly inside the node circle.
pub fn default_probe<T: Real>() -> Complex<T> {
    Complex::from_polar(lit(0.7), lit(0.9))
}

/// Interpolates `f` at `degree + 1` nodes on a circle and compares the
/// interpolant with `f` at `probe`. A small residual means `f` is a
/// polynomial of degree at most `degree`.
pub fn degree_residual<T: Real>(
    f: impl Fn(Complex<T>) -> Result<TensorOperator<T>>,
    degree: usize,
    probe: Complex<T>,
) -> Result<Residual> {
    let nodes: Vec<Complex<T>> = (0..=degree)
        .map(|k| {
            let phase = 0.3 + std::f64::consts::TAU * k as f64 / (degree as f64 + 1.0);
            Complex::from_polar(lit(NODE_RADIUS), lit(phase))
        })
        .collect();
    let values = nodes.iter().map(|&z| f(z)).collect::<Result<Vec<_>>>()?;
    equality_residual(&lagrange(&nodes, &values, probe)?, &f(probe)?)
}

/// Degree check of a [`MatrixFunction`] against its declared degree.
pub fn check_degree_hint<T: Real>(
    f: &MatrixFunction<T>,
    probe: Complex<T>,
) -> Result<Option<Residual>> {
    match f.degree_hint() {
        Some(d) => degree_residual(|x| f.eval(x), d, probe).map(Some),
        None => Ok(None),
    }
}
