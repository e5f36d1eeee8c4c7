//! Orbit decompositions of `V^{⊗N}` under `S_N` and the hyperoctahedral
//! group, block-invariance checks, and the scalars by which `T(0; z)` and
//! `𝒯̃(0; z)` act on basis vectors.

use std::collections::{BTreeSet, VecDeque};

use num_complex::Complex;
use num_traits::Zero;

use crate::error::Result;
use crate::function::MatrixFunction;
use crate::rk::{bar, RMatrixDatum};
use crate::scalar::{rsqrt, to_f64, Real};
use crate::tensor::{LegSpace, Residual, TensorOperator};
use crate::transfer::Chain;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SectorKind {
    /// Orbits under permutations of the tensor factors.
    Symmetric,
    /// Orbits under permutations and entrywise flips `α ↦ ᾱ`.
    Hyperoctahedral,
}

/// One orbit of basis tuples. Tuples are 1-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sector {
    /// Lexicographically smallest member.
    pub representative: Vec<usize>,
    /// Members in lexicographic order.
    pub members: Vec<Vec<usize>>,
    /// Flat indices of the members, same order.
    pub basis_indices: Vec<usize>,
}

fn neighbours(n: usize, t: &[usize], kind: SectorKind) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for k in 0..t.len().saturating_sub(1) {
        let mut s = t.to_vec();
        s.swap(k, k + 1);
        out.push(s);
    }
    if kind == SectorKind::Hyperoctahedral {
        for k in 0..t.len() {
            let mut s = t.to_vec();
            s[k] = bar(n, s[k] - 1) + 1;
            out.push(s);
        }
    }
    out
}

/// Partition of `{1..n}^N` into orbits, found by breadth-first closure under
/// adjacent transpositions (and flips). Sectors are sorted by representative.
pub fn enumerate_sectors(n: usize, sites: usize, kind: SectorKind) -> Result<Vec<Sector>> {
    let space = LegSpace::chain(n, sites)?;
    let mut seen = vec![false; space.dim()];
    let mut sectors = Vec::new();
    for start in 0..space.dim() {
        if seen[start] {
            continue;
        }
        let mut orbit = BTreeSet::new();
        let mut queue = VecDeque::new();
        let first: Vec<usize> = space.digits_of(start).into_iter().map(|d| d + 1).collect();
        seen[start] = true;
        orbit.insert(first.clone());
        queue.push_back(first);
        while let Some(t) = queue.pop_front() {
            for s in neighbours(n, &t, kind) {
                let idx = index(&space, &s);
                if !seen[idx] {
                    seen[idx] = true;
                    orbit.insert(s.clone());
                    queue.push_back(s);
                }
            }
        }
        let members: Vec<Vec<usize>> = orbit.into_iter().collect();
        sectors.push(Sector {
            representative: members[0].clone(),
            basis_indices: members.iter().map(|m| index(&space, m)).collect(),
            members,
        });
    }
    sectors.sort_by(|a, b| a.representative.cmp(&b.representative));
    Ok(sectors)
}

fn index(space: &LegSpace, tuple: &[usize]) -> usize {
    let digits: Vec<usize> = tuple.iter().map(|&a| a - 1).collect();
    space.index_of(&digits)
}

/// Largest entry of `op` coupling different sectors; `relative` is scaled by
/// the largest entry overall.
pub fn check_block_invariance<T: Real>(op: &TensorOperator<T>, sectors: &[Sector]) -> Residual {
    let mut label = vec![usize::MAX; op.dim()];
    for (s, sector) in sectors.iter().enumerate() {
        for &i in &sector.basis_indices {
            label[i] = s;
        }
    }
    let mut worst = 0.0f64;
    for c in 0..op.dim() {
        for r in 0..op.dim() {
            if label[r] != label[c] {
                worst = worst.max(to_f64(op.entry(r, c).norm()));
            }
        }
    }
    Residual::new(worst, to_f64(op.max_abs_entry()))
}

/// Diagonal entry of `R(0)` at `(a, b)`, 0-based.
fn r0_entry<T: Real>(r0: &TensorOperator<T>, n: usize, a: usize, b: usize) -> Complex<T> {
    r0.entry(a * n + b, a * n + b)
}

/// `Σ_α d_α Π_i r(α, β_i)`, with `r(α, β)` the diagonal entry of `R(0)` at
/// `v_α ⊗ v_β` and `d` the twist.
pub fn scalar_eigenvalue_periodic<T: Real>(chain: &Chain<T>, beta: &[usize]) -> Result<Complex<T>> {
    let n = chain.n();
    let r0 = chain.datum.r_fn.eval(Complex::zero())?;
    Ok((0..n)
        .map(|a| {
            beta.iter().fold(chain.twist.entry(a, a), |acc, &b| {
                acc * r0_entry(&r0, n, a, b - 1)
            })
        })
        .sum())
}

/// `Σ_α K⁻(0)_{ᾱα} K′(0)_{αᾱ} Π_i r(α, β_i) r(α, β̄_i)`.
pub fn scalar_eigenvalue_boundary<T: Real>(
    datum: &RMatrixDatum<T>,
    kminus: &MatrixFunction<T>,
    kprime: &MatrixFunction<T>,
    beta: &[usize],
) -> Result<Complex<T>> {
    let n = datum.n;
    let r0 = datum.r_fn.eval(Complex::zero())?;
    let (k0, l0) = (kminus.eval(Complex::zero())?, kprime.eval(Complex::zero())?);
    Ok((0..n)
        .map(|a| {
            let ab = bar(n, a);
            beta.iter()
                .fold(k0.entry(ab, a) * l0.entry(a, ab), |acc, &b| {
                    acc * r0_entry(&r0, n, a, b - 1) * r0_entry(&r0, n, a, bar(n, b - 1))
                })
        })
        .sum())
}

/// `‖X − diag(s(β))‖ / ‖X‖` for an operator on `[1..N]` and a per-tuple scalar.
pub fn diagonal_action_residual<T: Real>(
    op: &TensorOperator<T>,
    scalar: impl Fn(&[usize]) -> Result<Complex<T>>,
) -> Result<Residual> {
    let space = op.space();
    let mut diff = op.matrix().clone();
    for i in 0..op.dim() {
        let beta: Vec<usize> = space.digits_of(i).into_iter().map(|d| d + 1).collect();
        diff[(i, i)] -= scalar(&beta)?;
    }
    Ok(Residual::new(
        to_f64(rsqrt(
            diff.iter()
                .map(|v| v.norm_sqr())
                .fold(T::zero(), |a, b| a + b),
        )),
        to_f64(op.frobenius_norm()),
    ))
}

/// `T(0; z)` against the closed-form scalars.
pub fn zero_point_periodic<T: Real>(chain: &Chain<T>) -> Result<Residual> {
    diagonal_action_residual(&chain.transfer_periodic(Complex::zero())?, |b| {
        scalar_eigenvalue_periodic(chain, b)
    })
}

/// `𝒯̃(0; z)` against the closed-form scalars.
pub fn zero_point_boundary<T: Real>(
    chain: &Chain<T>,
    kprime: &MatrixFunction<T>,
    kminus: &MatrixFunction<T>,
) -> Result<Residual> {
    diagonal_action_residual(
        &chain.transfer_boundary_modified(kprime, kminus, Complex::zero())?,
        |b| scalar_eigenvalue_boundary(&chain.datum, kminus, kprime, b),
    )
}

/// Distinct scalar values per sector: the closed form must be constant on
/// each orbit. Returns the largest relative spread.
pub fn scalar_spread_over_sectors(
    sectors: &[Sector],
    scalar: impl Fn(&[usize]) -> Result<Complex<f64>>,
) -> Result<f64> {
    let mut worst = 0.0f64;
    for s in sectors {
        let reference = scalar(&s.representative)?;
        for m in &s.members {
            let v = scalar(m)?;
            worst = worst.max((v - reference).norm() / reference.norm().max(1e-300));
        }
    }
    Ok(worst)
}

/// Interpolation points of the periodic argument: `{z_1, …, z_N, 0}`.
pub fn interpolation_set_periodic<T: Real>(chain: &Chain<T>) -> Vec<Complex<T>> {
    let mut out = chain.z().to_vec();
    out.push(Complex::zero());
    out
}

/// Interpolation points of the boundary argument:
/// `{z_i, 1/z_i, ±1, ±1/r, 0}`.
pub fn interpolation_set_boundary<T: Real>(chain: &Chain<T>) -> Vec<Complex<T>> {
    let one = Complex::<T>::new(T::one(), T::zero());
    let rinv = chain.datum.r.inv();
    let mut out = chain.z().to_vec();
    out.extend(chain.z().iter().map(|z| z.inv()));
    out.extend([one, -one, rinv, -rinv, Complex::zero()]);
    out
}
