//! Trace/transpose identities of the leg calculus, evaluated on random
//! operators. Each check builds both sides through different routes.

use num_complex::Complex;
use rand::seq::SliceRandom;
use rand::Rng;

use super::{
    embed, equality_residual, flip, partial_trace, partial_transpose, Label, LegSpace, Residual,
    TensorOperator,
};
use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// One evaluated identity.
#[derive(Clone, Debug, PartialEq)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub residual: Residual,
}

/// Operator with entries uniform in the unit square of the complex plane.
pub fn random_operator<T: Real, R: Rng + ?Sized>(
    space: LegSpace,
    rng: &mut R,
) -> TensorOperator<T> {
    let dim = space.dim();
    let mat = nalgebra::DMatrix::from_fn(dim, dim, |_, _| {
        Complex::new(
            lit(rng.random_range(-1.0..1.0)),
            lit(rng.random_range(-1.0..1.0)),
        )
    });
    TensorOperator::from_matrix(space, mat).expect("finite random entries")
}

fn random_local<T: Real, R: Rng + ?Sized>(n: usize, legs: usize, rng: &mut R) -> TensorOperator<T> {
    random_operator(LegSpace::chain(n, legs).expect("small local space"), rng)
}

/// Evaluates every identity on an ambient space of `num_legs` legs (3 or 4)
/// with randomly shuffled labels and random operands.
pub fn appendix_a_identities<T: Real, R: Rng + ?Sized>(
    n: usize,
    num_legs: usize,
    rng: &mut R,
) -> Result<Vec<IdentityCheck>> {
    if !(3..=4).contains(&num_legs) {
        return Err(Error::InvalidParameter(format!(
            "identity checks need 3 or 4 legs, got {num_legs}"
        )));
    }
    let mut labels: Vec<Label> = (1..=num_legs as Label).collect();
    labels.shuffle(rng);
    let ambient = LegSpace::new(n, labels.clone())?;
    let (i, j, k) = (labels[0], labels[1], labels[2]);
    let mut out = Vec::new();
    let mut push = |name, residual| out.push(IdentityCheck { name, residual });

    // (X_ij X̃_ik)^{t_i} = X̃_ik^{t_i} X_ij^{t_i}, and the t_j, t_k variants.
    let x = random_local::<T, _>(n, 2, rng);
    let xt = random_local::<T, _>(n, 2, rng);
    let xij = embed(&x, &[i, j], &ambient)?;
    let xtik = embed(&xt, &[i, k], &ambient)?;
    let prod = xij.dot(&xtik)?;
    push(
        "transpose_of_product_i",
        equality_residual(
            &partial_transpose(&prod, i)?,
            &partial_transpose(&xtik, i)?.dot(&partial_transpose(&xij, i)?)?,
        )?,
    );
    push(
        "transpose_of_product_j",
        equality_residual(
            &partial_transpose(&prod, j)?,
            &partial_transpose(&xij, j)?.dot(&xtik)?,
        )?,
    );
    push(
        "transpose_of_product_k",
        equality_residual(
            &partial_transpose(&prod, k)?,
            &xij.dot(&partial_transpose(&xtik, k)?)?,
        )?,
    );

    // Tr_j P_ij = Id.
    let pij = embed(&flip::<T>(n)?, &[i, j], &ambient)?;
    let traced = partial_trace(&pij, j)?;
    push(
        "flip_trace",
        equality_residual(&traced, &TensorOperator::identity(traced.space().clone()))?,
    );

    // Tr_i Z Y_i = Tr_i Y_i Z.
    let z = random_operator::<T, _>(ambient.clone(), rng);
    let y = random_local::<T, _>(n, 1, rng);
    push(
        "commute_inside_trace",
        equality_residual(
            &partial_trace(&z.right_apply(&y, &[i])?, i)?,
            &partial_trace(&z.left_apply(&y, &[i])?, i)?,
        )?,
    );

    // Tr_{i,j} X_ik X̃_jk = (Tr_i X_ik)(Tr_j X̃_jk), the right side assembled
    // from single-leg traces of the local operators.
    let xik = embed(&x, &[i, k], &ambient)?;
    let xtjk = embed(&xt, &[j, k], &ambient)?;
    let lhs = partial_trace(&partial_trace(&xik.dot(&xtjk)?, i)?, j)?;
    let lhs_other_order = partial_trace(&partial_trace(&xik.dot(&xtjk)?, j)?, i)?;
    let rest = lhs.space().clone();
    let tx = partial_trace(&x, 1)?.relabel(vec![k])?;
    let txt = partial_trace(&xt, 1)?.relabel(vec![k])?;
    let rhs = embed(&tx, &[k], &rest)?.dot(&embed(&txt, &[k], &rest)?)?;
    push("product_of_traces", equality_residual(&lhs, &rhs)?);
    push("trace_order", equality_residual(&lhs, &lhs_other_order)?);

    // Tr_i Z^{t_i} Z̃^{t_i} = Tr_i Z Z̃.
    let zt = random_operator::<T, _>(ambient.clone(), rng);
    push(
        "trace_of_transposes",
        equality_residual(
            &partial_trace(
                &partial_transpose(&z, i)?.dot(&partial_transpose(&zt, i)?)?,
                i,
            )?,
            &partial_trace(&z.dot(&zt)?, i)?,
        )?,
    );

    // Tr_i (Z^{t_j}) = (Tr_i Z)^{t_j}.
    push(
        "trace_of_other_transpose",
        equality_residual(
            &partial_trace(&partial_transpose(&z, j)?, i)?,
            &partial_transpose(&partial_trace(&z, i)?, j)?,
        )?,
    );

    // Tr_i P_ij X_jk X̃_ik = (X_jk^{t_j} X̃_jk^{t_j})^{t_j}.
    let xjk = embed(&x, &[j, k], &ambient)?;
    let lhs = partial_trace(&pij.dot(&xjk)?.dot(&embed(&xt, &[i, k], &ambient)?)?, i)?;
    let rest = lhs.space().clone();
    let a = partial_transpose(&embed(&x, &[j, k], &rest)?, j)?;
    let b = partial_transpose(&embed(&xt, &[j, k], &rest)?, j)?;
    push(
        "flip_in_trace",
        equality_residual(&lhs, &partial_transpose(&a.dot(&b)?, j)?)?,
    );

    Ok(out)
}
