//! Local identity checks for R- and K-matrices. Each returns the Frobenius
//! residual of the identity at the given spectral parameters.

use num_complex::Complex;
use num_traits::{One, Zero};

use super::{bar, RMatrixDatum};
use crate::error::{Error, Result};
use crate::function::MatrixFunction;
use crate::scalar::{rmax, to_f64, Real};
use crate::tensor::{
    commutator_residual, equality_residual, proportionality, LegSpace, Residual, TensorOperator,
};

/// Product of local factors applied in order on a fixed leg space.
pub(crate) fn ordered_product<T: Real>(
    space: &LegSpace,
    factors: &[(TensorOperator<T>, &[i32])],
) -> Result<TensorOperator<T>> {
    let mut acc = TensorOperator::identity(space.clone());
    for (op, targets) in factors {
        acc = acc.right_apply(op, targets)?;
    }
    Ok(acc)
}

fn space3<T: Real>(d: &RMatrixDatum<T>) -> Result<LegSpace> {
    LegSpace::chain(d.n, 3)
}

fn space2<T: Real>(d: &RMatrixDatum<T>) -> Result<LegSpace> {
    LegSpace::chain(d.n, 2)
}

/// `R12(x/y) R13(x) R23(y) = R23(y) R13(x) R12(x/y)`.
pub fn check_ybe<T: Real>(d: &RMatrixDatum<T>, x: Complex<T>, y: Complex<T>) -> Result<Residual> {
    let s = space3(d)?;
    let (a, b, c) = (d.r_fn.eval(x / y)?, d.r_fn.eval(x)?, d.r_fn.eval(y)?);
    let lhs = ordered_product(
        &s,
        &[
            (a.clone(), &[1, 2]),
            (b.clone(), &[1, 3]),
            (c.clone(), &[2, 3]),
        ],
    )?;
    let rhs = ordered_product(&s, &[(c, &[2, 3]), (b, &[1, 3]), (a, &[1, 2])])?;
    equality_residual(&lhs, &rhs)
}

/// `R12(x/y)⁻¹ R̃13(x) R̃23(y) = R̃23(y) R̃13(x) R12(x/y)⁻¹`.
pub fn check_twisted_ybe<T: Real>(
    d: &RMatrixDatum<T>,
    x: Complex<T>,
    y: Complex<T>,
) -> Result<Residual> {
    let s = space3(d)?;
    let a = d.r_fn.eval_inverse(x / y)?;
    let (b, c) = (d.rtilde.eval(x)?, d.rtilde.eval(y)?);
    let lhs = ordered_product(
        &s,
        &[
            (a.clone(), &[1, 2]),
            (b.clone(), &[1, 3]),
            (c.clone(), &[2, 3]),
        ],
    )?;
    let rhs = ordered_product(&s, &[(c, &[2, 3]), (b, &[1, 3]), (a, &[1, 2])])?;
    equality_residual(&lhs, &rhs)
}

/// `R(x) R21(1/x) ∝ Id`.
pub fn check_unitarity<T: Real>(d: &RMatrixDatum<T>, x: Complex<T>) -> Result<Residual> {
    let prod = d.r_fn.eval(x)?.dot(&d.r21.eval(x.inv())?)?;
    proportionality(&prod, &TensorOperator::identity(prod.space().clone()))
}

/// `K(x) K(1/x) ∝ Id`.
pub fn check_boundary_unitarity<T: Real>(k: &MatrixFunction<T>, x: Complex<T>) -> Result<Residual> {
    let prod = k.eval(x)?.dot(&k.eval(x.inv())?)?;
    proportionality(&prod, &TensorOperator::identity(prod.space().clone()))
}

/// `R(1) ∝ P`; the fitted scalar is `1 − q²`.
pub fn check_regularity<T: Real>(d: &RMatrixDatum<T>) -> Result<Residual> {
    proportionality(&d.r_fn.eval(Complex::one())?, &d.p)
}

/// Outcome of a boundary-regularity check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Regularity {
    Proportional(Residual),
    /// `K(±1)` vanishes, so the "∝ Id" claim holds only with multiple zero.
    Degenerate,
}

/// `K(σ) ∝ Id` for `σ = ±1`.
pub fn check_boundary_regularity<T: Real>(
    k: &MatrixFunction<T>,
    sigma: Complex<T>,
) -> Result<Regularity> {
    let value = k.eval(sigma)?;
    let scale = rmax(
        k.eval(Complex::zero())?.frobenius_norm(),
        k.eval(sigma + sigma)?.frobenius_norm(),
    );
    if to_f64(value.frobenius_norm()) <= 1e-12 * to_f64(scale).max(1e-300) {
        return Ok(Regularity::Degenerate);
    }
    let id = TensorOperator::identity(value.space().clone());
    Ok(Regularity::Proportional(proportionality(&value, &id)?))
}

/// `M2⁻¹ R(r²x)⁻¹ M2 ∝ R̃(x)`.
pub fn check_crossing<T: Real>(d: &RMatrixDatum<T>, x: Complex<T>) -> Result<Residual> {
    let s = space2(d)?;
    let m_inv = d.m.inverse()?;
    let lhs = ordered_product(
        &s,
        &[
            (m_inv, &[2]),
            (d.r_fn.eval_inverse(d.r * d.r * x)?, &[1, 2]),
            (d.m.clone(), &[2]),
        ],
    )?;
    proportionality(&lhs, &d.rtilde.eval(x)?)
}

/// `[R(x), M ⊗ M] = 0`.
pub fn check_rmm<T: Real>(d: &RMatrixDatum<T>, x: Complex<T>) -> Result<Residual> {
    let s = space2(d)?;
    let mm = ordered_product(&s, &[(d.m.clone(), &[1]), (d.m.clone(), &[2])])?;
    commutator_residual(&d.r_fn.eval(x)?, &mm)
}

/// `R12(x) J1 J2 = J1 J2 R21(x)`.
pub fn check_rjj<T: Real>(d: &RMatrixDatum<T>, x: Complex<T>) -> Result<Residual> {
    let s = space2(d)?;
    let jj = ordered_product(&s, &[(d.j.clone(), &[1]), (d.j.clone(), &[2])])?;
    equality_residual(&d.r_fn.eval(x)?.dot(&jj)?, &jj.dot(&d.r21.eval(x)?)?)
}

/// `R̃̃(x) = R(x)`: applying the tilde construction to `R̃` recovers `R`.
pub fn check_double_tilde<T: Real>(d: &RMatrixDatum<T>, x: Complex<T>) -> Result<Residual> {
    use crate::tensor::partial_transpose;
    let rt = d.rtilde.eval(x)?;
    let back = partial_transpose(&partial_transpose(&rt, 1)?.inverse()?, 1)?;
    equality_residual(&back, &d.r_fn.eval(x)?)
}

/// Which reflection equation to test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Reflection {
    /// `R12(x/y) K1(x) R21(xy) K2(y) = K2(y) R12(xy) K1(x) R21(x/y)`.
    Left,
    /// `R21(x/y) K1(x) R12(xy) K2(y) = K2(y) R21(xy) K1(x) R12(x/y)`.
    Right,
    /// `R12(x/y)⁻¹ K1(x) R̃21(xy) K2(y) = K2(y) R̃12(xy) K1(x) R21(x/y)⁻¹`.
    Dual,
}

impl Reflection {
    pub fn name(self) -> &'static str {
        match self {
            Reflection::Left => "LRE",
            Reflection::Right => "RRE",
            Reflection::Dual => "DRE",
        }
    }
}

/// Residual of the chosen reflection equation for `k` at `(x, y)`.
pub fn check_reflection<T: Real>(
    d: &RMatrixDatum<T>,
    k: &MatrixFunction<T>,
    which: Reflection,
    x: Complex<T>,
    y: Complex<T>,
) -> Result<Residual> {
    if k.arity() != 1 {
        return Err(Error::ArityMismatch {
            expected: 1,
            got: k.arity(),
        });
    }
    let s = space2(d)?;
    let (kx, ky) = (k.eval(x)?, k.eval(y)?);
    let (ratio, prod) = (x / y, x * y);
    let (lhs, rhs) = match which {
        Reflection::Left => {
            let (a, b) = (d.r_fn.eval(ratio)?, d.r_fn.eval(prod)?);
            (
                ordered_product(
                    &s,
                    &[
                        (a.clone(), &[1, 2]),
                        (kx.clone(), &[1]),
                        (b.clone(), &[2, 1]),
                        (ky.clone(), &[2]),
                    ],
                )?,
                ordered_product(&s, &[(ky, &[2]), (b, &[1, 2]), (kx, &[1]), (a, &[2, 1])])?,
            )
        }
        Reflection::Right => {
            let (a, b) = (d.r_fn.eval(ratio)?, d.r_fn.eval(prod)?);
            (
                ordered_product(
                    &s,
                    &[
                        (a.clone(), &[2, 1]),
                        (kx.clone(), &[1]),
                        (b.clone(), &[1, 2]),
                        (ky.clone(), &[2]),
                    ],
                )?,
                ordered_product(&s, &[(ky, &[2]), (b, &[2, 1]), (kx, &[1]), (a, &[1, 2])])?,
            )
        }
        Reflection::Dual => {
            let (a, b) = (d.r_fn.eval_inverse(ratio)?, d.rtilde.eval(prod)?);
            (
                ordered_product(
                    &s,
                    &[
                        (a.clone(), &[1, 2]),
                        (kx.clone(), &[1]),
                        (b.clone(), &[2, 1]),
                        (ky.clone(), &[2]),
                    ],
                )?,
                ordered_product(&s, &[(ky, &[2]), (b, &[1, 2]), (kx, &[1]), (a, &[2, 1])])?,
            )
        }
    };
    equality_residual(&lhs, &rhs)
}

/// Largest entry of `op` at a position where `allowed(row, col)` is false.
pub fn pattern_violation<T: Real>(
    op: &TensorOperator<T>,
    allowed: impl Fn(usize, usize) -> bool,
) -> f64 {
    let mut worst = 0.0f64;
    for c in 0..op.dim() {
        for r in 0..op.dim() {
            if !allowed(r, c) {
                worst = worst.max(to_f64(op.entry(r, c).norm()));
            }
        }
    }
    worst
}

/// `R(0)(v_α ⊗ v_β)` must lie in the span of `v_γ ⊗ v_δ` with `γ ≤ α`, `δ ≥ β`.
pub fn r0_structure_violation<T: Real>(d: &RMatrixDatum<T>) -> Result<f64> {
    let n = d.n;
    let r0 = d.r_fn.eval(Complex::zero())?;
    Ok(pattern_violation(&r0, |row, col| {
        let (g, dl) = (row / n, row % n);
        let (a, b) = (col / n, col % n);
        g <= a && dl >= b
    }))
}

/// `K⁻(0)(v_α)` must lie in the span of `v_γ̄` with `γ ≤ α`.
pub fn kminus0_structure_violation<T: Real>(kminus: &MatrixFunction<T>) -> Result<f64> {
    let n = kminus.n();
    let k0 = kminus.eval(Complex::zero())?;
    Ok(pattern_violation(&k0, |row, col| bar(n, row) <= col))
}

/// `K′(0)(v_ᾱ)` must lie in the span of `v_γ` with `γ ≤ α`.
pub fn kprime0_structure_violation<T: Real>(kprime: &MatrixFunction<T>) -> Result<f64> {
    let n = kprime.n();
    let k0 = kprime.eval(Complex::zero())?;
    Ok(pattern_violation(&k0, |row, col| row <= bar(n, col)))
}

/// Each column `v_α ⊗ v_β` of `R(x)` may only touch `v_α ⊗ v_β` and `v_β ⊗ v_α`.
pub fn r_image_violation<T: Real>(d: &RMatrixDatum<T>, x: Complex<T>) -> Result<f64> {
    let n = d.n;
    let rx = d.r_fn.eval(x)?;
    Ok(pattern_violation(&rx, |row, col| {
        row == col || row == (col % n) * n + col / n
    }))
}

/// Each column `v_α` of a one-leg `K(x)` may only touch `v_α` and `v_ᾱ`.
pub fn k_image_violation<T: Real>(k: &MatrixFunction<T>, x: Complex<T>) -> Result<f64> {
    let n = k.n();
    let kx = k.eval(x)?;
    Ok(pattern_violation(&kx, |row, col| {
        row == col || row == bar(n, col)
    }))
}
