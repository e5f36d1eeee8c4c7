//! Transport matrices of the periodic and boundary qKZ systems, their
//! consistency conditions, and the identities tying them to transfer
//! matrices at the inhomogeneities and at special points.

use num_complex::Complex;
use num_traits::One;

use crate::error::{Error, Result};
use crate::function::MatrixFunction;
use crate::scalar::{to_c64, Real};
use crate::tensor::{
    commutator_residual, equality_residual, partial_transpose, proportionality, Label, LegSpace,
    Residual, TensorOperator,
};
use crate::transfer::Chain;

fn check_site<T: Real>(chain: &Chain<T>, i: usize) -> Result<()> {
    if i == 0 || i > chain.sites() {
        return Err(Error::InvalidParameter(format!(
            "site {i} outside 1..={}",
            chain.sites()
        )));
    }
    Ok(())
}

fn leg(i: usize) -> Label {
    i as Label
}

/// Tail shared by both transport matrices:
/// `R_N,i(z_N/z_i)⁻¹ ⋯ R_{i+1},i(z_{i+1}/z_i)⁻¹`.
fn inverse_tail<T: Real>(
    chain: &Chain<T>,
    acc: TensorOperator<T>,
    i: usize,
) -> Result<TensorOperator<T>> {
    let z = chain.z();
    let mut acc = acc;
    for j in (i + 1..=chain.sites()).rev() {
        acc = acc.right_apply(
            &chain.datum.r_fn.eval_inverse(z[j - 1] / z[i - 1])?,
            &[leg(j), leg(i)],
        )?;
    }
    Ok(acc)
}

/// Head shared by both transport matrices:
/// `R_i,{i−1}(p z_i/z_{i−1}) ⋯ R_i,1(p z_i/z_1)`.
fn shifted_head<T: Real>(chain: &Chain<T>, i: usize, p: Complex<T>) -> Result<TensorOperator<T>> {
    let z = chain.z();
    let mut acc = TensorOperator::identity(chain.chain_space().clone());
    for j in (1..i).rev() {
        acc = acc.right_apply(
            &chain.datum.r_fn.eval(p * z[i - 1] / z[j - 1])?,
            &[leg(i), leg(j)],
        )?;
    }
    Ok(acc)
}

/// `A_i(z; p) = R_i,{i−1}(p z_i/z_{i−1}) ⋯ R_i1(p z_i/z_1) D_i
///  R_Ni(z_N/z_i)⁻¹ ⋯ R_{i+1},i(z_{i+1}/z_i)⁻¹` with `p = sqrt_p²`.
pub fn transport_periodic<T: Real>(
    chain: &Chain<T>,
    i: usize,
    sqrt_p: Complex<T>,
) -> Result<TensorOperator<T>> {
    check_site(chain, i)?;
    let acc = shifted_head(chain, i, sqrt_p * sqrt_p)?.right_apply(&chain.twist, &[leg(i)])?;
    inverse_tail(chain, acc, i)
}

/// `𝒜_i(z; p) = R_i,{i−1}(p z_i/z_{i−1}) ⋯ R_i1(p z_i/z_1) K⁺_i(p^(1/2) z_i)
///  R_1i(z_1 z_i) ⋯ R_Ni(z_N z_i) K⁻_i(z_i) R_Ni(z_N/z_i)⁻¹ ⋯ R_{i+1},i(z_{i+1}/z_i)⁻¹`,
/// where the product `R_1i ⋯ R_Ni` skips `j = i` and `p^(1/2) = sqrt_p`.
pub fn transport_boundary<T: Real>(
    chain: &Chain<T>,
    kplus: &MatrixFunction<T>,
    kminus: &MatrixFunction<T>,
    i: usize,
    sqrt_p: Complex<T>,
) -> Result<TensorOperator<T>> {
    check_site(chain, i)?;
    let z = chain.z();
    let mut acc = shifted_head(chain, i, sqrt_p * sqrt_p)?
        .right_apply(&kplus.eval(sqrt_p * z[i - 1])?, &[leg(i)])?;
    for j in (1..=chain.sites()).filter(|&j| j != i) {
        acc = acc.right_apply(
            &chain.datum.r_fn.eval(z[j - 1] * z[i - 1])?,
            &[leg(j), leg(i)],
        )?;
    }
    acc = acc.right_apply(&kminus.eval(z[i - 1])?, &[leg(i)])?;
    inverse_tail(chain, acc, i)
}

/// The chain with `z_j` replaced by `p z_j`, re-validated.
pub fn shifted<T: Real>(chain: &Chain<T>, j: usize, p: Complex<T>) -> Result<Chain<T>> {
    check_site(chain, j)?;
    let mut z = chain.z().to_vec();
    z[j - 1] *= p;
    chain.with_z(z)
}

/// `X_i(p^(ε_j) z) X_j(z) = X_j(p^(ε_i) z) X_i(z)` for a transport builder `X`.
pub fn consistency<T: Real>(
    chain: &Chain<T>,
    i: usize,
    j: usize,
    sqrt_p: Complex<T>,
    transport: impl Fn(&Chain<T>, usize) -> Result<TensorOperator<T>>,
) -> Result<Residual> {
    let p = sqrt_p * sqrt_p;
    let lhs = transport(&shifted(chain, j, p)?, i)?.dot(&transport(chain, j)?)?;
    let rhs = transport(&shifted(chain, i, p)?, j)?.dot(&transport(chain, i)?)?;
    equality_residual(&lhs, &rhs)
}

/// Periodic consistency condition for the pair `(i, j)`.
pub fn consistency_periodic<T: Real>(
    chain: &Chain<T>,
    i: usize,
    j: usize,
    sqrt_p: Complex<T>,
) -> Result<Residual> {
    consistency(chain, i, j, sqrt_p, |c, k| transport_periodic(c, k, sqrt_p))
}

/// Boundary consistency condition for the pair `(i, j)`.
pub fn consistency_boundary<T: Real>(
    chain: &Chain<T>,
    kplus: &MatrixFunction<T>,
    kminus: &MatrixFunction<T>,
    i: usize,
    j: usize,
    sqrt_p: Complex<T>,
) -> Result<Residual> {
    consistency(chain, i, j, sqrt_p, |c, k| {
        transport_boundary(c, kplus, kminus, k, sqrt_p)
    })
}

/// Residuals of the interpolation identities at one site.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InterpolationResult {
    pub site: usize,
    /// `T(z_i; z) ∝ A_i(z; 1)`.
    pub periodic: Residual,
    /// `𝒯(z_i; z) ∝ 𝒜_i(z; 1)`.
    pub boundary: Residual,
    /// `𝒯(1/z_i; z) ∝ 𝒜_i(z; 1)⁻¹`.
    pub boundary_inverse: Residual,
}

/// All three interpolation identities at every site. The fitted scalars are
/// reported but have no closed form to compare against.
pub fn interpolation_identities<T: Real>(
    chain: &Chain<T>,
    kplus: &MatrixFunction<T>,
    kprime: &MatrixFunction<T>,
    kminus: &MatrixFunction<T>,
) -> Result<Vec<InterpolationResult>> {
    let one = Complex::<T>::one();
    (1..=chain.sites())
        .map(|i| {
            let zi = chain.z()[i - 1];
            let a = transport_boundary(chain, kplus, kminus, i, one)?;
            Ok(InterpolationResult {
                site: i,
                periodic: proportionality(
                    &chain.transfer_periodic(zi)?,
                    &transport_periodic(chain, i, one)?,
                )?,
                boundary: proportionality(&chain.transfer_boundary(kprime, kminus, zi)?, &a)?,
                boundary_inverse: proportionality(
                    &chain.transfer_boundary(kprime, kminus, zi.inv())?,
                    &a.inverse()?,
                )?,
            })
        })
        .collect()
}

/// Pairwise commutators of `{A_i(z; 1)}`.
pub fn periodic_commutators<T: Real>(chain: &Chain<T>) -> Result<Vec<((usize, usize), Residual)>> {
    let one = Complex::<T>::one();
    let ops = (1..=chain.sites())
        .map(|i| transport_periodic(chain, i, one))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::new();
    for i in 0..ops.len() {
        for j in i + 1..ops.len() {
            out.push(((i + 1, j + 1), commutator_residual(&ops[i], &ops[j])?));
        }
    }
    Ok(out)
}

/// Pairwise commutators of `{𝒜_i(z; 1)^(±1)}`: for each `i < j`, both
/// `[𝒜_i, 𝒜_j]` and `[𝒜_i, 𝒜_j⁻¹]`.
pub fn boundary_commutators<T: Real>(
    chain: &Chain<T>,
    kplus: &MatrixFunction<T>,
    kminus: &MatrixFunction<T>,
) -> Result<Vec<((usize, usize), Residual, Residual)>> {
    let one = Complex::<T>::one();
    let ops = (1..=chain.sites())
        .map(|i| transport_boundary(chain, kplus, kminus, i, one))
        .collect::<Result<Vec<_>>>()?;
    let invs = ops
        .iter()
        .map(|a| a.inverse())
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::new();
    for i in 0..ops.len() {
        for j in 0..ops.len() {
            if i != j {
                out.push((
                    (i + 1, j + 1),
                    commutator_residual(&ops[i], &ops[j])?,
                    commutator_residual(&ops[i], &invs[j])?,
                ));
            }
        }
    }
    Ok(out)
}

/// `𝒯(x) ∝ Id` at a special point, with the fitted scalar compared against
/// its prediction from traces.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpecialValue {
    pub point: Complex<f64>,
    /// Proportionality of `𝒯(x)` to the identity.
    pub residual: Residual,
    pub fitted: Complex<f64>,
    pub predicted: Complex<f64>,
    /// `|fitted − predicted| / |predicted|`.
    pub scalar_error: f64,
}

fn special_value(point: Complex<f64>, residual: Residual, predicted: Complex<f64>) -> SpecialValue {
    let fitted = residual.scalar.unwrap_or_default();
    SpecialValue {
        point,
        residual,
        fitted,
        predicted,
        scalar_error: (fitted - predicted).norm() / predicted.norm().max(1e-300),
    }
}

/// `𝒯(±1) ∝ Tr K′(±1) · Id`. The prediction is `k · Tr K′(±1)` with `k` the
/// fitted scalar of `K⁻(±1) ∝ Id`; the two monodromy halves cancel exactly.
pub fn special_values_unit<T: Real>(
    chain: &Chain<T>,
    kprime: &MatrixFunction<T>,
    kminus: &MatrixFunction<T>,
) -> Result<Vec<SpecialValue>> {
    let one = Complex::<T>::one();
    [one, -one]
        .into_iter()
        .map(|s| {
            let t = chain.transfer_boundary(kprime, kminus, s)?;
            let residual = proportionality(&t, &TensorOperator::identity(t.space().clone()))?;
            let km = kminus.eval(s)?;
            let k = proportionality(&km, &TensorOperator::identity(km.space().clone()))?
                .scalar
                .unwrap_or_default();
            Ok(special_value(
                to_c64(s),
                residual,
                k * to_c64(kprime.eval(s)?.trace()),
            ))
        })
        .collect()
}

/// `𝒯(±1/r) ∝ Tr(K⁻(±1/r) M) · Id`. The prediction is
/// `μ · Π_i c_i · Tr(K⁻(±1/r) M)`, where `K′(±1/r) = μ M` and
/// `(R(r² a)⁻¹)^{t_0} M_0 R(a)^{t_0} = c_i M_0` with `a = ±1/(r z_i)`.
pub fn special_values_crossing<T: Real>(
    chain: &Chain<T>,
    kprime: &MatrixFunction<T>,
    kminus: &MatrixFunction<T>,
) -> Result<Vec<SpecialValue>> {
    let d = &chain.datum;
    let one = Complex::<T>::one();
    let space2 = LegSpace::chain(d.n, 2)?;
    let m0 = TensorOperator::identity(space2).left_apply(&d.m, &[1])?;
    [one, -one]
        .into_iter()
        .map(|s| {
            let x = s / d.r;
            let t = chain.transfer_boundary(kprime, kminus, x)?;
            let residual = proportionality(&t, &TensorOperator::identity(t.space().clone()))?;
            let mu = proportionality(&kprime.eval(x)?, &d.m)?
                .scalar
                .unwrap_or_default();
            let mut factor = mu;
            for &z in chain.z() {
                let a = x / z;
                let lhs = partial_transpose(&d.r_fn.eval_inverse(d.r * d.r * a)?, 1)?
                    .dot(&m0)?
                    .dot(&partial_transpose(&d.r_fn.eval(a)?, 1)?)?;
                factor *= proportionality(&lhs, &m0)?.scalar.unwrap_or_default();
            }
            let trace = to_c64(kminus.eval(x)?.dot(&d.m)?.trace());
            Ok(special_value(to_c64(x), residual, factor * trace))
        })
        .collect()
}
