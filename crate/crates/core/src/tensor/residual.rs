use num_complex::Complex;

use super::TensorOperator;
use crate::error::{Error, Result};
use crate::scalar::{norm_floor, rmax, to_c64, to_f64, Real};

/// Frobenius defect of an identity, reported in `f64` regardless of the
/// working precision.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Residual {
    pub absolute: f64,
    pub relative: f64,
    /// Fitted proportionality constant, when the check is a "∝" claim.
    pub scalar: Option<Complex<f64>>,
}

impl Residual {
    pub fn new(absolute: f64, reference: f64) -> Self {
        Self {
            absolute,
            relative: absolute / reference.max(1e-300),
            scalar: None,
        }
    }

    pub fn with_scalar(mut self, scalar: Complex<f64>) -> Self {
        self.scalar = Some(scalar);
        self
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.relative.is_finite() && self.relative <= tol
    }

    /// Entrywise worst case of several residuals (scalar of the worst one).
    pub fn worst(items: impl IntoIterator<Item = Residual>) -> Option<Residual> {
        // NaN counts as worse than anything finite.
        let key = |r: &Residual| {
            if r.relative.is_nan() {
                f64::INFINITY
            } else {
                r.relative
            }
        };
        items
            .into_iter()
            .fold(None, |acc: Option<Residual>, r| match acc {
                Some(a) if key(&a) >= key(&r) => Some(a),
                _ => Some(r),
            })
    }
}

fn floor<T: Real>(v: T) -> T {
    rmax(v, norm_floor())
}

/// Least-squares fit `X ≈ λY`; relative residual is normalized by `‖X‖`.
pub fn proportionality<T: Real>(x: &TensorOperator<T>, y: &TensorOperator<T>) -> Result<Residual> {
    let yy = y.frobenius_norm();
    if yy < norm_floor() {
        return Err(Error::ZeroReference);
    }
    let lambda = y.inner(x)? / Complex::new(yy * yy, T::zero());
    let abs = x.sub(&y.scale(lambda))?.frobenius_norm();
    let rel = abs / floor(x.frobenius_norm());
    Ok(Residual {
        absolute: to_f64(abs),
        relative: to_f64(rel),
        scalar: Some(to_c64(lambda)),
    })
}

/// `‖XY − YX‖`, relative to `‖X‖·‖Y‖`.
pub fn commutator_residual<T: Real>(
    x: &TensorOperator<T>,
    y: &TensorOperator<T>,
) -> Result<Residual> {
    let abs = x.dot(y)?.sub(&y.dot(x)?)?.frobenius_norm();
    let rel = abs / floor(x.frobenius_norm() * y.frobenius_norm());
    Ok(Residual {
        absolute: to_f64(abs),
        relative: to_f64(rel),
        scalar: None,
    })
}

/// `‖L − R‖`, relative to the larger of the two norms.
pub fn equality_residual<T: Real>(
    lhs: &TensorOperator<T>,
    rhs: &TensorOperator<T>,
) -> Result<Residual> {
    let abs = lhs.sub(rhs)?.frobenius_norm();
    let rel = abs / floor(rmax(lhs.frobenius_norm(), rhs.frobenius_norm()));
    Ok(Residual {
        absolute: to_f64(abs),
        relative: to_f64(rel),
        scalar: None,
    })
}
