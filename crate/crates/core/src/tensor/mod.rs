//! Dense operators on labelled tensor products of `n`-dimensional legs.
//!
//! Basis vectors `v_{b_1} ⊗ … ⊗ v_{b_k}` (0-based digits here) are indexed
//! big-endian over the listed leg order: the first leg is the most
//! significant digit. Every other module inherits this convention.

mod identities;
mod residual;

pub use identities::{appendix_a_identities, random_operator, IdentityCheck};
pub use residual::{commutator_residual, equality_residual, proportionality, Residual};

use std::collections::HashSet;

use nalgebra::DMatrix;
use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{is_finite, lit, rmax, Real};

/// Leg label. Chain sites are `1..=N`, the auxiliary space is [`AUX`] and a
/// second auxiliary copy is [`AUX_PRIME`].
pub type Label = i32;

pub const AUX: Label = 0;
pub const AUX_PRIME: Label = -1;

/// Default cap on complex entries per operator (`2^20`).
pub const DEFAULT_ENTRY_CAP: u128 = 1 << 20;

/// Condition-number threshold above which an inversion is reported singular.
pub const CONDITION_LIMIT: f64 = 1e12;

/// Ordered list of legs, each of local dimension `n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LegSpace {
    n: usize,
    legs: Vec<Label>,
}

impl LegSpace {
    pub fn new(n: usize, legs: Vec<Label>) -> Result<Self> {
        Self::with_cap(n, legs, DEFAULT_ENTRY_CAP)
    }

    pub fn with_cap(n: usize, legs: Vec<Label>, cap: u128) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDimension(n));
        }
        let mut seen = HashSet::new();
        for &l in &legs {
            if !seen.insert(l) {
                return Err(Error::DuplicateLabel(l));
            }
        }
        let dim = (n as u128).checked_pow(legs.len() as u32);
        let entries = dim.and_then(|d| d.checked_mul(d)).unwrap_or(u128::MAX);
        if entries > cap {
            return Err(Error::CapExceeded {
                n,
                legs: legs.len(),
                entries,
                cap,
            });
        }
        Ok(Self { n, legs })
    }

    /// Legs `[1, 2, …, len]`.
    pub fn chain(n: usize, len: usize) -> Result<Self> {
        Self::new(n, (1..=len as Label).collect())
    }

    /// Legs `[0, 1, …, len]`, the auxiliary leg first.
    pub fn with_aux(n: usize, len: usize) -> Result<Self> {
        Self::new(n, (0..=len as Label).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn legs(&self) -> &[Label] {
        &self.legs
    }

    pub fn num_legs(&self) -> usize {
        self.legs.len()
    }

    pub fn dim(&self) -> usize {
        self.n.pow(self.legs.len() as u32)
    }

    pub fn position(&self, label: Label) -> Result<usize> {
        self.legs
            .iter()
            .position(|&l| l == label)
            .ok_or(Error::UnknownLabel(label))
    }

    pub fn contains(&self, label: Label) -> bool {
        self.legs.contains(&label)
    }

    /// Index weight of the leg at `pos`: `n^(k-1-pos)`.
    pub fn stride(&self, pos: usize) -> usize {
        self.n.pow((self.legs.len() - 1 - pos) as u32)
    }

    /// Flat index of a digit tuple (0-based digits, listed leg order).
    pub fn index_of(&self, digits: &[usize]) -> usize {
        digits.iter().fold(0, |acc, &d| acc * self.n + d)
    }

    /// Digit tuple of a flat index.
    pub fn digits_of(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.legs.len()];
        for slot in out.iter_mut().rev() {
            *slot = index % self.n;
            index /= self.n;
        }
        out
    }

    /// Same space with `label` removed.
    pub fn without(&self, label: Label) -> Result<Self> {
        let pos = self.position(label)?;
        let mut legs = self.legs.clone();
        legs.remove(pos);
        Ok(Self { n: self.n, legs })
    }

    /// Positions of `targets`, rejecting unknown and repeated labels.
    fn target_positions(&self, targets: &[Label]) -> Result<Vec<usize>> {
        let mut seen = HashSet::new();
        targets
            .iter()
            .map(|&t| {
                if !seen.insert(t) {
                    return Err(Error::DuplicateLabel(t));
                }
                self.position(t)
            })
            .collect()
    }

    /// Splits flat indices into (offsets over target digits, bases over the
    /// remaining digits) so that every index is `base + offset` uniquely.
    fn split_indices(&self, positions: &[usize]) -> (Vec<usize>, Vec<usize>) {
        let n = self.n;
        let k = positions.len();
        let offsets: Vec<usize> = (0..n.pow(k as u32))
            .map(|a| {
                let mut rem = a;
                let mut off = 0;
                for &p in positions.iter().rev() {
                    off += (rem % n) * self.stride(p);
                    rem /= n;
                }
                off
            })
            .collect();
        let rest: Vec<usize> = (0..self.legs.len())
            .filter(|p| !positions.contains(p))
            .collect();
        let bases: Vec<usize> = (0..n.pow(rest.len() as u32))
            .map(|b| {
                let mut rem = b;
                let mut base = 0;
                for &p in rest.iter().rev() {
                    base += (rem % n) * self.stride(p);
                    rem /= n;
                }
                base
            })
            .collect();
        (offsets, bases)
    }
}

/// Dense linear operator on a [`LegSpace`].
#[derive(Clone, Debug, PartialEq)]
pub struct TensorOperator<T: Real> {
    space: LegSpace,
    mat: DMatrix<Complex<T>>,
}

impl<T: Real> TensorOperator<T> {
    pub fn from_matrix(space: LegSpace, mat: DMatrix<Complex<T>>) -> Result<Self> {
        let dim = space.dim();
        if mat.nrows() != dim || mat.ncols() != dim {
            return Err(Error::ShapeMismatch {
                rows: mat.nrows(),
                cols: mat.ncols(),
                dim,
            });
        }
        if !mat.iter().all(|&z| is_finite(z)) {
            return Err(Error::NonFinite);
        }
        Ok(Self { space, mat })
    }

    /// Builds an operator from `f(row, col)`.
    pub fn from_fn(space: LegSpace, f: impl FnMut(usize, usize) -> Complex<T>) -> Result<Self> {
        let dim = space.dim();
        Self::from_matrix(space, DMatrix::from_fn(dim, dim, f))
    }

    /// Operator on fresh labels `[1..=legs]`.
    pub fn local(n: usize, legs: usize, mat: DMatrix<Complex<T>>) -> Result<Self> {
        Self::from_matrix(LegSpace::chain(n, legs)?, mat)
    }

    pub fn identity(space: LegSpace) -> Self {
        let dim = space.dim();
        Self {
            space,
            mat: DMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(space: LegSpace) -> Self {
        let dim = space.dim();
        Self {
            space,
            mat: DMatrix::zeros(dim, dim),
        }
    }

    /// Diagonal operator on a single leg `[1]`.
    pub fn diagonal(n: usize, diag: &[Complex<T>]) -> Result<Self> {
        if diag.len() != n {
            return Err(Error::InvalidParameter(format!(
                "diagonal of length {} for local dimension {n}",
                diag.len()
            )));
        }
        Self::local(
            n,
            1,
            DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(diag)),
        )
    }

    /// 0-leg (1×1) operator holding a scalar; `n` is carried for bookkeeping.
    pub fn scalar(n: usize, value: Complex<T>) -> Result<Self> {
        Self::from_matrix(
            LegSpace::new(n, vec![])?,
            DMatrix::from_element(1, 1, value),
        )
    }

    pub fn space(&self) -> &LegSpace {
        &self.space
    }

    pub fn matrix(&self) -> &DMatrix<Complex<T>> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<Complex<T>> {
        self.mat
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn n(&self) -> usize {
        self.space.n
    }

    pub fn num_legs(&self) -> usize {
        self.space.num_legs()
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex<T> {
        self.mat[(row, col)]
    }

    /// Same matrix, new labels (same count).
    pub fn relabel(&self, legs: Vec<Label>) -> Result<Self> {
        if legs.len() != self.num_legs() {
            return Err(Error::ArityMismatch {
                expected: self.num_legs(),
                got: legs.len(),
            });
        }
        Ok(Self {
            space: LegSpace::new(self.space.n, legs)?,
            mat: self.mat.clone(),
        })
    }

    fn same_space(&self, other: &Self) -> Result<()> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch);
        }
        Ok(())
    }

    /// Operator product `self · other`.
    pub fn dot(&self, other: &Self) -> Result<Self> {
        self.same_space(other)?;
        Ok(Self {
            space: self.space.clone(),
            mat: &self.mat * &other.mat,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_space(other)?;
        Ok(Self {
            space: self.space.clone(),
            mat: &self.mat + &other.mat,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_space(other)?;
        Ok(Self {
            space: self.space.clone(),
            mat: &self.mat - &other.mat,
        })
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        Self {
            space: self.space.clone(),
            mat: self.mat.map(|z| z * c),
        }
    }

    /// Full transpose (all legs).
    pub fn transpose(&self) -> Self {
        Self {
            space: self.space.clone(),
            mat: self.mat.transpose(),
        }
    }

    pub fn trace(&self) -> Complex<T> {
        self.mat
            .diagonal()
            .iter()
            .fold(Complex::zero(), |acc, &z| acc + z)
    }

    pub fn frobenius_norm(&self) -> T {
        crate::scalar::rsqrt(self.mat.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()))
    }

    /// Frobenius inner product `⟨self, other⟩`, conjugate-linear in `self`.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        self.same_space(other)?;
        Ok(self
            .mat
            .iter()
            .zip(other.mat.iter())
            .fold(Complex::zero(), |acc, (a, b)| acc + a.conj() * b))
    }

    pub fn max_abs_entry(&self) -> T {
        self.mat
            .iter()
            .fold(T::zero(), |acc, z| rmax(acc, z.norm()))
    }

    /// 1-norm (max column sum).
    fn one_norm(mat: &DMatrix<Complex<T>>) -> T {
        mat.column_iter()
            .map(|c| c.iter().fold(T::zero(), |acc, z| acc + z.norm()))
            .fold(T::zero(), rmax)
    }

    /// Matrix inverse, rejecting operators whose 1-norm condition number
    /// exceeds [`CONDITION_LIMIT`].
    pub fn inverse(&self) -> Result<Self> {
        let singular = || Error::Singular {
            what: format!("operator on legs {:?}", self.space.legs),
            at: "inversion".into(),
        };
        let inv = self.mat.clone().try_inverse().ok_or_else(singular)?;
        let cond = Self::one_norm(&self.mat) * Self::one_norm(&inv);
        if !num_traits::Float::is_finite(cond) || cond > lit(CONDITION_LIMIT) {
            return Err(singular());
        }
        Self::from_matrix(self.space.clone(), inv)
    }

    /// 1-norm condition number (infinite when not invertible).
    pub fn condition_number(&self) -> T {
        match self.mat.clone().try_inverse() {
            Some(inv) => Self::one_norm(&self.mat) * Self::one_norm(&inv),
            None => T::infinity(),
        }
    }

    /// `local_{targets} · self` without forming the embedded operator.
    pub fn left_apply(&self, local: &Self, targets: &[Label]) -> Result<Self> {
        let positions = self.check_local(local, targets)?;
        let (offsets, bases) = self.space.split_indices(&positions);
        let k = offsets.len();
        let dim = self.dim();
        let mut out = DMatrix::zeros(dim, dim);
        let mut gathered = vec![Complex::zero(); k];
        for c in 0..dim {
            let src = self.mat.column(c);
            let mut dst = out.column_mut(c);
            for &b in &bases {
                for (a, g) in gathered.iter_mut().enumerate() {
                    *g = src[b + offsets[a]];
                }
                for (a_out, &off) in offsets.iter().enumerate() {
                    let mut acc = Complex::zero();
                    for (a, &g) in gathered.iter().enumerate() {
                        acc += local.mat[(a_out, a)] * g;
                    }
                    dst[b + off] = acc;
                }
            }
        }
        Ok(Self {
            space: self.space.clone(),
            mat: out,
        })
    }

    /// `self · local_{targets}` without forming the embedded operator.
    pub fn right_apply(&self, local: &Self, targets: &[Label]) -> Result<Self> {
        let positions = self.check_local(local, targets)?;
        let (offsets, bases) = self.space.split_indices(&positions);
        let dim = self.dim();
        let mut out = DMatrix::zeros(dim, dim);
        for &b in &bases {
            for (bb, &off_out) in offsets.iter().enumerate() {
                let mut col = out.column_mut(b + off_out);
                for (a, &off_in) in offsets.iter().enumerate() {
                    let w = local.mat[(a, bb)];
                    if w.is_zero() {
                        continue;
                    }
                    col.axpy(w, &self.mat.column(b + off_in), Complex::one());
                }
            }
        }
        Ok(Self {
            space: self.space.clone(),
            mat: out,
        })
    }

    fn check_local(&self, local: &Self, targets: &[Label]) -> Result<Vec<usize>> {
        if local.num_legs() != targets.len() {
            return Err(Error::ArityMismatch {
                expected: targets.len(),
                got: local.num_legs(),
            });
        }
        if local.n() != self.n() {
            return Err(Error::SpaceMismatch);
        }
        self.space.target_positions(targets)
    }
}

/// The flip `P(v ⊗ v') = v' ⊗ v` on legs `[1, 2]`.
pub fn flip<T: Real>(n: usize) -> Result<TensorOperator<T>> {
    let space = LegSpace::chain(n, 2)?;
    TensorOperator::from_fn(space, |r, c| {
        if r == (c % n) * n + c / n {
            Complex::one()
        } else {
            Complex::zero()
        }
    })
}

/// Embeds a local operator into `ambient`, acting on `targets` in the listed
/// order (targets may be non-adjacent or reversed) and as identity elsewhere.
pub fn embed<T: Real>(
    op: &TensorOperator<T>,
    targets: &[Label],
    ambient: &LegSpace,
) -> Result<TensorOperator<T>> {
    if op.num_legs() != targets.len() {
        return Err(Error::ArityMismatch {
            expected: targets.len(),
            got: op.num_legs(),
        });
    }
    if op.n() != ambient.n() {
        return Err(Error::SpaceMismatch);
    }
    let positions = ambient.target_positions(targets)?;
    let (offsets, bases) = ambient.split_indices(&positions);
    let dim = ambient.dim();
    let mut mat = DMatrix::zeros(dim, dim);
    for &b in &bases {
        for (r, &ro) in offsets.iter().enumerate() {
            for (c, &co) in offsets.iter().enumerate() {
                mat[(b + ro, b + co)] = op.mat[(r, c)];
            }
        }
    }
    Ok(TensorOperator {
        space: ambient.clone(),
        mat,
    })
}

/// Transposes the indicated leg only.
pub fn partial_transpose<T: Real>(op: &TensorOperator<T>, leg: Label) -> Result<TensorOperator<T>> {
    let pos = op.space.position(leg)?;
    let n = op.n();
    let stride = op.space.stride(pos);
    let dim = op.dim();
    let mut mat = DMatrix::zeros(dim, dim);
    for c in 0..dim {
        let dc = (c / stride) % n;
        for r in 0..dim {
            let dr = (r / stride) % n;
            let new_r = r - dr * stride + dc * stride;
            let new_c = c - dc * stride + dr * stride;
            mat[(new_r, new_c)] = op.mat[(r, c)];
        }
    }
    Ok(TensorOperator {
        space: op.space.clone(),
        mat,
    })
}

/// Contracts the indicated leg. Tracing the last leg yields a 0-leg operator.
pub fn partial_trace<T: Real>(op: &TensorOperator<T>, leg: Label) -> Result<TensorOperator<T>> {
    let pos = op.space.position(leg)?;
    let n = op.n();
    let stride = op.space.stride(pos);
    let space = op.space.without(leg)?;
    let dim = space.dim();
    let lift = |i: usize, a: usize| (i / stride) * stride * n + a * stride + i % stride;
    let mut mat = DMatrix::zeros(dim, dim);
    for c in 0..dim {
        for r in 0..dim {
            let mut acc = Complex::zero();
            for a in 0..n {
                acc += op.mat[(lift(r, a), lift(c, a))];
            }
            mat[(r, c)] = acc;
        }
    }
    Ok(TensorOperator { space, mat })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cplx;

    type C = Complex<f64>;

    fn op_from(n: usize, legs: usize, rows: &[&[f64]]) -> TensorOperator<f64> {
        let dim = rows.len();
        TensorOperator::local(
            n,
            legs,
            DMatrix::from_fn(dim, dim, |r, c| C::new(rows[r][c], 0.0)),
        )
        .unwrap()
    }

    #[test]
    fn flip_n2_has_expected_pattern() {
        let p = flip::<f64>(2).unwrap();
        let ones = [(0, 0), (1, 2), (2, 1), (3, 3)];
        for r in 0..4 {
            for c in 0..4 {
                let expected = if ones.contains(&(r, c)) { 1.0 } else { 0.0 };
                assert_eq!(p.entry(r, c), C::new(expected, 0.0));
            }
        }
        let p2 = p.dot(&p).unwrap();
        assert_eq!(p2, TensorOperator::identity(p.space().clone()));
    }

    #[test]
    fn flip_n3_maps_v1v2_to_v2v1() {
        let p = flip::<f64>(3).unwrap();
        let s = p.space().clone();
        let col = s.index_of(&[0, 1]);
        let row = s.index_of(&[1, 0]);
        assert_eq!(p.entry(row, col), C::new(1.0, 0.0));
        assert_eq!(
            p.matrix()
                .column(col)
                .iter()
                .filter(|z| z.norm() > 0.0)
                .count(),
            1
        );
    }

    #[test]
    fn trace_of_flip_over_one_leg_is_identity() {
        for n in 2..=4 {
            let p = flip::<f64>(n).unwrap();
            let t = partial_trace(&p, 2).unwrap();
            assert_eq!(
                t,
                TensorOperator::identity(LegSpace::new(n, vec![1]).unwrap())
            );
        }
    }

    #[test]
    fn leg_space_validation() {
        assert_eq!(LegSpace::new(1, vec![1]), Err(Error::InvalidDimension(1)));
        assert_eq!(LegSpace::new(2, vec![1, 1]), Err(Error::DuplicateLabel(1)));
        assert!(matches!(
            LegSpace::new(2, (0..11).collect()),
            Err(Error::CapExceeded { .. })
        ));
        assert!(LegSpace::new(2, (0..10).collect()).is_ok());
        assert!(LegSpace::with_cap(2, (0..3).collect(), 63).is_err());
    }

    #[test]
    fn embed_middle_leg() {
        let y = op_from(2, 1, &[&[1.0, 2.0], &[3.0, 4.0]]);
        let amb = LegSpace::chain(2, 3).unwrap();
        let e = embed(&y, &[2], &amb).unwrap();
        let id = nalgebra::DMatrix::<C>::identity(2, 2);
        let expected = id.kronecker(&y.matrix().kronecker(&id));
        assert_eq!(e.matrix(), &expected);
    }

    #[test]
    fn embed_reversed_targets_equals_flip_conjugate() {
        let x = op_from(
            2,
            2,
            &[
                &[1.0, 2.0, 0.5, 0.0],
                &[0.0, 3.0, 1.0, 2.0],
                &[4.0, 0.0, 1.5, 1.0],
                &[2.0, 1.0, 0.0, 5.0],
            ],
        );
        let p = flip::<f64>(2).unwrap();
        let pxp = p.dot(&x).unwrap().dot(&p).unwrap();
        let amb = LegSpace::chain(2, 3).unwrap();
        assert_eq!(
            embed(&x, &[3, 1], &amb).unwrap(),
            embed(&pxp, &[1, 3], &amb).unwrap()
        );
    }

    #[test]
    fn embed_errors() {
        let y = op_from(2, 1, &[&[1.0, 0.0], &[0.0, 1.0]]);
        let amb = LegSpace::chain(2, 2).unwrap();
        assert_eq!(embed(&y, &[7], &amb), Err(Error::UnknownLabel(7)));
        let p = flip::<f64>(2).unwrap();
        assert_eq!(embed(&p, &[1, 1], &amb), Err(Error::DuplicateLabel(1)));
        assert!(matches!(
            embed(&p, &[1], &amb),
            Err(Error::ArityMismatch { .. })
        ));
    }

    #[test]
    fn partial_transpose_of_product_transposes_one_factor() {
        let a = op_from(2, 1, &[&[1.0, 2.0], &[3.0, 4.0]]);
        let b = op_from(2, 1, &[&[5.0, 6.0], &[7.0, 8.0]]);
        let ab = TensorOperator::local(2, 2, a.matrix().kronecker(b.matrix())).unwrap();
        let t2 = partial_transpose(&ab, 2).unwrap();
        let expected = a.matrix().kronecker(&b.matrix().transpose());
        assert_eq!(t2.matrix(), &expected);
        let t1 = partial_transpose(&ab, 1).unwrap();
        assert_eq!(t1.matrix(), &a.matrix().transpose().kronecker(b.matrix()));
        assert_eq!(partial_transpose(&ab, 9), Err(Error::UnknownLabel(9)));
    }

    #[test]
    fn partial_trace_of_product() {
        let a = op_from(2, 1, &[&[1.0, 2.0], &[3.0, 4.0]]);
        let b = op_from(2, 1, &[&[5.0, 6.0], &[7.0, 8.0]]);
        let ab = TensorOperator::local(2, 2, a.matrix().kronecker(b.matrix())).unwrap();
        let t = partial_trace(&ab, 1).unwrap();
        assert_eq!(t.space().legs(), &[2]);
        assert_eq!(t.matrix(), &b.matrix().map(|z| z * C::new(5.0, 0.0)));
        let full = partial_trace(&t, 2).unwrap();
        assert_eq!(full.num_legs(), 0);
        assert_eq!(full.entry(0, 0), C::new(5.0 * 13.0, 0.0));
    }

    #[test]
    fn local_application_matches_embedding() {
        let amb = LegSpace::new(3, vec![0, 1, 2]).unwrap();
        let base = TensorOperator::from_fn(amb.clone(), |r, c| {
            cplx::<f64>((r * 7 + c * 3) as f64 % 5.0 - 2.0, (r + 2 * c) as f64 % 3.0)
        })
        .unwrap();
        let local = TensorOperator::local(
            3,
            2,
            DMatrix::from_fn(9, 9, |r, c| {
                C::new((r as f64 - c as f64).sin(), (r * c) as f64 % 4.0)
            }),
        )
        .unwrap();
        for targets in [[0, 2], [2, 0], [1, 0]] {
            let e = embed(&local, &targets, &amb).unwrap();
            let left = base.left_apply(&local, &targets).unwrap();
            let right = base.right_apply(&local, &targets).unwrap();
            assert!(left.sub(&e.dot(&base).unwrap()).unwrap().frobenius_norm() < 1e-12);
            assert!(right.sub(&base.dot(&e).unwrap()).unwrap().frobenius_norm() < 1e-12);
        }
    }

    #[test]
    fn inverse_rejects_singular() {
        let s = op_from(2, 1, &[&[1.0, 2.0], &[2.0, 4.0]]);
        assert!(matches!(s.inverse(), Err(Error::Singular { .. })));
        let near = op_from(2, 1, &[&[1.0, 2.0], &[2.0, 4.0 + 1e-14]]);
        assert!(near.inverse().is_err());
        let ok = op_from(2, 1, &[&[2.0, 1.0], &[1.0, 1.0]]);
        let inv = ok.inverse().unwrap();
        assert!(
            ok.dot(&inv)
                .unwrap()
                .sub(&TensorOperator::identity(ok.space().clone()))
                .unwrap()
                .frobenius_norm()
                < 1e-15
        );
    }

    #[test]
    fn non_finite_entries_rejected() {
        let m = DMatrix::from_element(2, 2, C::new(f64::NAN, 0.0));
        assert_eq!(TensorOperator::local(2, 1, m), Err(Error::NonFinite));
    }

    #[test]
    fn digits_round_trip() {
        let s = LegSpace::new(3, vec![4, 1, 7]).unwrap();
        for i in 0..s.dim() {
            assert_eq!(s.index_of(&s.digits_of(i)), i);
        }
        assert_eq!(s.digits_of(5), vec![0, 1, 2]);
    }
}
