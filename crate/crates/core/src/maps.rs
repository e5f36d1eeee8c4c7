//! Maps between solution sets of the left, right and dual reflection
//! equations, returned as lazily evaluated [`MatrixFunction`]s.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::function::MatrixFunction;
use crate::rk::RMatrixDatum;
use crate::scalar::Real;
use crate::tensor::{embed, partial_trace, LegSpace, TensorOperator, AUX};

fn require_one_leg<T: Real>(k: &MatrixFunction<T>) -> Result<()> {
    if k.arity() != 1 {
        return Err(Error::ArityMismatch {
            expected: 1,
            got: k.arity(),
        });
    }
    Ok(())
}

/// `χ_J(K)(x) = J⁻¹ K(x) J`.
pub fn chi_j<T: Real>(k: &MatrixFunction<T>, j: &TensorOperator<T>) -> Result<MatrixFunction<T>> {
    require_one_leg(k)?;
    let j_inv = j.inverse()?;
    let j = j.clone();
    Ok(k.map(format!("chi({})", k.name()), move |v| {
        j_inv.dot(&v)?.dot(&j)
    })
    .with_zeros(k.zeros().to_vec()))
}

/// `ψ_{M,r}(K)(x) = K(rx)⁻¹ M`.
pub fn psi_mr<T: Real>(
    k: &MatrixFunction<T>,
    m: &TensorOperator<T>,
    r: Complex<T>,
) -> Result<MatrixFunction<T>> {
    require_one_leg(k)?;
    let inner = k.clone();
    let m = m.clone();
    let rinv = r.inv();
    let scaled = |pts: &[Complex<T>]| pts.iter().map(|&s| s * rinv).collect::<Vec<_>>();
    Ok(
        MatrixFunction::new(format!("psi({})", k.name()), k.n(), 1, move |x| {
            inner.eval_inverse(r * x)?.dot(&m)
        })
        .with_poles([scaled(k.poles()), scaled(k.zeros())].concat()),
    )
}

/// `ψ_{M,r}⁻¹(K)(x) = M K(x/r)⁻¹`.
pub fn psi_mr_inverse<T: Real>(
    k: &MatrixFunction<T>,
    m: &TensorOperator<T>,
    r: Complex<T>,
) -> Result<MatrixFunction<T>> {
    require_one_leg(k)?;
    let inner = k.clone();
    let m = m.clone();
    let scaled = |pts: &[Complex<T>]| pts.iter().map(|&s| s * r).collect::<Vec<_>>();
    Ok(
        MatrixFunction::new(format!("psi_inv({})", k.name()), k.n(), 1, move |x| {
            m.dot(&inner.eval_inverse(x / r)?)
        })
        .with_poles([scaled(k.poles()), scaled(k.zeros())].concat()),
    )
}

/// Square roots (both signs) of each point.
fn square_roots<T: Real>(points: &[Complex<T>]) -> Vec<Complex<T>> {
    points
        .iter()
        .flat_map(|&s| {
            let root = s.sqrt();
            [root, -root]
        })
        .collect()
}

/// `φ_R(K)_1(x) = Tr_0 K_0(x) P_01 R_01(x²)`, or with `R̃` in place of `R`.
pub fn phi_r<T: Real>(
    k: &MatrixFunction<T>,
    datum: &RMatrixDatum<T>,
    use_rtilde: bool,
) -> Result<MatrixFunction<T>> {
    require_one_leg(k)?;
    let n = datum.n;
    let inner = k.clone();
    let r = if use_rtilde {
        datum.rtilde.clone()
    } else {
        datum.r_fn.clone()
    };
    let p = datum.p.clone();
    let pair = LegSpace::new(n, vec![AUX, 1])?;
    let mut poles = k.poles().to_vec();
    poles.extend(square_roots(r.poles()));
    let name = format!(
        "phi_{}({})",
        if use_rtilde { "Rtilde" } else { "R" },
        k.name()
    );
    let out = MatrixFunction::new(name, n, 1, move |x| {
        let kx = embed(&inner.eval(x)?, &[AUX], &pair)?;
        let rx = r.eval(x * x)?.relabel(vec![AUX, 1])?;
        let pr = p.relabel(vec![AUX, 1])?.dot(&rx)?;
        partial_trace(&kx.dot(&pr)?, AUX)?.relabel(vec![1])
    })
    .with_poles(poles);
    Ok(match (use_rtilde, k.degree_hint()) {
        (false, Some(d)) => out.with_degree(d + 2),
        _ => out,
    })
}

/// Composite `φ_R ∘ ψ_{M,r} ∘ χ_J`, mapping left-reflection solutions to
/// left-reflection solutions.
pub fn boundary_crossing<T: Real>(
    k: &MatrixFunction<T>,
    datum: &RMatrixDatum<T>,
) -> Result<MatrixFunction<T>> {
    let chi = chi_j(k, &datum.j)?;
    let psi = psi_mr(&chi, &datum.m, datum.r)?;
    phi_r(&psi, datum, false)
}

/// The same composite as one contraction,
/// `Tr_0 J_0⁻¹ K_0(rx)⁻¹ J_0 M_0 P_01 R_01(x²)`, evaluated without the
/// intermediate maps.
pub fn boundary_crossing_single_trace<T: Real>(
    k: &MatrixFunction<T>,
    datum: &RMatrixDatum<T>,
) -> Result<MatrixFunction<T>> {
    require_one_leg(k)?;
    let n = datum.n;
    let inner = k.clone();
    let d = datum.clone();
    let j_inv = datum.j.inverse()?;
    let pair = LegSpace::new(n, vec![AUX, 1])?;
    Ok(MatrixFunction::new(
        format!("crossing1({})", k.name()),
        n,
        1,
        move |x| {
            let mut acc = TensorOperator::identity(pair.clone());
            for (factor, leg) in [
                (j_inv.clone(), AUX),
                (inner.eval_inverse(d.r * x)?, AUX),
                (d.j.clone(), AUX),
                (d.m.clone(), AUX),
            ] {
                acc = acc.right_apply(&factor, &[leg])?;
            }
            acc = acc.right_apply(&d.p, &[AUX, 1])?;
            acc = acc.right_apply(&d.r_fn.eval(x * x)?, &[AUX, 1])?;
            partial_trace(&acc, AUX)?.relabel(vec![1])
        },
    ))
}

/// Worst residual of the reflection equation `which` over the given pairs;
/// membership in a solution set means this stays below tolerance.
pub fn membership<T: Real>(
    datum: &RMatrixDatum<T>,
    k: &MatrixFunction<T>,
    which: crate::rk::Reflection,
    pairs: &[(Complex<T>, Complex<T>)],
) -> Result<crate::tensor::Residual> {
    let mut worst = None;
    for &(x, y) in pairs {
        let r = crate::rk::check_reflection(datum, k, which, x, y)?;
        worst = crate::tensor::Residual::worst(worst.into_iter().chain([r]));
    }
    worst.ok_or_else(|| Error::InvalidParameter("no sample points".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::local_space;
    use crate::rk::{
        check_reflection, default_minus_params, default_plus_params, make_k_family, make_k_minus,
        make_k_plus, make_r, Reflection,
    };
    use crate::sampling::random_point;
    use crate::tensor::equality_residual;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    type C = Complex<f64>;

    fn q() -> C {
        C::from_polar(1.1, 0.37)
    }

    #[test]
    fn chi_with_identity_is_identity_map() {
        let k = make_k_family(2, C::new(1.0, 0.0), C::new(2.0, 0.0), &[C::new(1.0, 0.0)]).unwrap();
        let id = TensorOperator::identity(local_space(2, 1).unwrap());
        let x = C::new(2.0, 0.0);
        assert_eq!(chi_j(&k, &id).unwrap().eval(x).unwrap(), k.eval(x).unwrap());
    }

    #[test]
    fn chi_example_and_inverse() {
        let d = make_r(2, q()).unwrap();
        let k = make_k_family(2, C::new(1.0, 0.0), C::new(2.0, 0.0), &[C::new(1.0, 0.0)]).unwrap();
        let v = chi_j(&k, &d.j).unwrap().eval(C::new(2.0, 0.0)).unwrap();
        let expected = [[-2.0, -6.0], [-3.0, 1.0]];
        for r in 0..2 {
            for c in 0..2 {
                assert_eq!(v.entry(r, c), C::new(expected[r][c], 0.0));
            }
        }
        let j3 = make_r(3, q()).unwrap().j;
        let k3 =
            make_k_family(3, C::new(0.3, 0.1), C::new(0.5, 0.0), &[C::new(1.2, -0.4)]).unwrap();
        let back = chi_j(&chi_j(&k3, &j3).unwrap(), &j3.inverse().unwrap()).unwrap();
        let x = C::new(0.4, 1.1);
        assert!(
            equality_residual(&back.eval(x).unwrap(), &k3.eval(x).unwrap())
                .unwrap()
                .relative
                < 1e-15
        );
    }

    #[test]
    fn psi_round_trip_and_trivial_case() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let d = make_r(3, q()).unwrap();
        let (t, k, xi) = default_minus_params::<f64>(3);
        let km = make_k_minus(&d, t, k, &xi).unwrap();
        let there = psi_mr(&km.k, &d.m, d.r).unwrap();
        let back = psi_mr_inverse(&there, &d.m, d.r).unwrap();
        for _ in 0..10 {
            let x = random_point(&mut rng);
            let r = equality_residual(&back.eval(x).unwrap(), &km.k.eval(x).unwrap()).unwrap();
            assert!(r.relative <= 1e-10);
        }
        let a = TensorOperator::local(
            2,
            1,
            nalgebra::DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 1.0].map(|v| C::new(v, 0.0))),
        )
        .unwrap();
        let konst = MatrixFunction::constant("A", a.clone());
        let id = TensorOperator::identity(a.space().clone());
        let psi = psi_mr(&konst, &id, C::new(1.0, 0.0)).unwrap();
        assert_eq!(psi.eval(C::new(0.5, 0.0)).unwrap(), a.inverse().unwrap());
    }

    #[test]
    fn phi_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in [2, 3] {
            let d = make_r(n, q()).unwrap().with_margin(1e-3);
            let (t, k, xi) = default_plus_params::<f64>(n);
            let fam = make_k_family(n, t, k, &xi).unwrap();
            let round = phi_r(&phi_r(&fam, &d, false).unwrap(), &d, true).unwrap();
            for _ in 0..10 {
                let (_, r) = crate::sampling::sample_regular(&mut rng, 1, |p| {
                    equality_residual(&round.eval(p[0])?, &fam.eval(p[0])?)
                })
                .unwrap();
                assert!(r.relative <= 1e-9, "{r:?}");
            }
        }
    }

    #[test]
    fn phi_of_identity_by_elementwise_summation() {
        let d = make_r(2, C::new(2.0, 0.0)).unwrap();
        let id =
            MatrixFunction::constant("Id", TensorOperator::identity(local_space(2, 1).unwrap()));
        let x = C::new(3.0, 0.0);
        let v = phi_r(&id, &d, false).unwrap().eval(x).unwrap();
        // (Tr_0 P_01 R_01(x²))[i][j] = Σ_a (P R)[(a,i),(a,j)], with (P R)[(a,i),·] = R[(i,a),·].
        let r = d.r_fn.eval(x * x).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let s: C = (0..2).map(|a| r.entry(i * 2 + a, a * 2 + j)).sum();
                assert_eq!(v.entry(i, j), s);
            }
        }
        // R only mixes v_a⊗v_b with v_b⊗v_a, so the contraction is diagonal.
        assert_eq!(v.entry(0, 1), C::new(0.0, 0.0));
    }

    #[test]
    fn phi_is_linear() {
        let d = make_r(3, q()).unwrap();
        let (t, k, xi) = default_plus_params::<f64>(3);
        let (t2, k2, xi2) = default_minus_params::<f64>(3);
        let f1 = make_k_family(3, t, k, &xi).unwrap();
        let f2 = make_k_family(3, t2, k2, &xi2).unwrap();
        let (a, b) = (C::new(0.3, -1.2), C::new(2.0, 0.5));
        let comb = MatrixFunction::new("comb", 3, 1, {
            let (f1, f2) = (f1.clone(), f2.clone());
            move |x| f1.eval(x)?.scale(a).add(&f2.eval(x)?.scale(b))
        });
        let x = C::new(0.8, 0.6);
        let lhs = phi_r(&comb, &d, false).unwrap().eval(x).unwrap();
        let rhs = phi_r(&f1, &d, false)
            .unwrap()
            .eval(x)
            .unwrap()
            .scale(a)
            .add(&phi_r(&f2, &d, false).unwrap().eval(x).unwrap().scale(b))
            .unwrap();
        assert!(equality_residual(&lhs, &rhs).unwrap().relative <= 1e-12);
    }

    #[test]
    fn maps_land_in_the_claimed_solution_sets() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for n in [2, 3] {
            let d = make_r(n, q()).unwrap().with_margin(1e-3);
            let (t, k, xi) = default_plus_params::<f64>(n);
            let (tm, km_, xim) = default_minus_params::<f64>(n);
            let kp = make_k_plus(&d, t, k, &xi).unwrap();
            let km = make_k_minus(&d, tm, km_, &xim).unwrap();
            let chi = chi_j(&kp.k, &d.j).unwrap();
            let psi = psi_mr(&km.k, &d.m, d.r).unwrap();
            let phi = phi_r(kp.kprime().unwrap(), &d, false).unwrap();
            let crossing = boundary_crossing(&kp.k, &d).unwrap();
            let twice = boundary_crossing(&crossing, &d).unwrap();
            for (f, which) in [
                (&chi, Reflection::Right),
                (&psi, Reflection::Dual),
                (&phi, Reflection::Left),
                (&crossing, Reflection::Left),
                (&twice, Reflection::Left),
            ] {
                let mut worst = 0.0f64;
                for _ in 0..5 {
                    let (_, r) = crate::sampling::sample_regular(&mut rng, 2, |p| {
                        check_reflection(&d, f, which, p[0], p[1])
                    })
                    .unwrap();
                    worst = worst.max(r.relative);
                }
                assert!(worst <= 1e-9, "{} {}: {worst}", f.name(), which.name());
            }
        }
    }

    #[test]
    fn crossing_composite_equals_single_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in [2, 3] {
            let d = make_r(n, q()).unwrap();
            let (t, k, xi) = default_plus_params::<f64>(n);
            let kp = make_k_plus(&d, t, k, &xi).unwrap();
            let a = boundary_crossing(&kp.k, &d).unwrap();
            let b = boundary_crossing_single_trace(&kp.k, &d).unwrap();
            for _ in 0..10 {
                let x = random_point(&mut rng);
                let r = equality_residual(&a.eval(x).unwrap(), &b.eval(x).unwrap()).unwrap();
                assert!(r.relative <= 1e-10);
            }
        }
    }
}
