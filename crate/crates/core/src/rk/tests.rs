use super::*;
use crate::tensor::{equality_residual, proportionality};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type C = Complex<f64>;

fn c(re: f64) -> C {
    C::new(re, 0.0)
}

fn default_q() -> C {
    C::from_polar(1.1, 0.37)
}

fn random_point(rng: &mut ChaCha8Rng) -> C {
    C::from_polar(
        rng.random_range(0.6..1.8),
        rng.random_range(0.0..std::f64::consts::TAU),
    )
}

#[test]
fn r_matrix_n2_q2_x3_columns() {
    let d = make_r(2, c(2.0)).unwrap();
    let r = d.r_fn.eval(c(3.0)).unwrap();
    // Basis order 11, 12, 21, 22; expected[row][col].
    let expected = [
        [-11.0, 0.0, 0.0, 0.0],
        [0.0, -4.0, -3.0, 0.0],
        [0.0, -9.0, -4.0, 0.0],
        [0.0, 0.0, 0.0, -11.0],
    ];
    for (row, vals) in expected.iter().enumerate() {
        for (col, &v) in vals.iter().enumerate() {
            assert_eq!(r.entry(row, col), c(v), "({row},{col})");
        }
    }
    // Mixing block determinant (q²x − 1)(x − q²) = 11 · (−1).
    let det = r.entry(1, 1) * r.entry(2, 2) - r.entry(1, 2) * r.entry(2, 1);
    assert_eq!(det, c(-11.0));
}

#[test]
fn regularity_scalar_is_one_minus_q_squared() {
    for n in 2..=4 {
        let q = default_q();
        let d = make_r(n, q).unwrap();
        let res = check_regularity(&d).unwrap();
        assert!(res.relative <= 1e-13);
        assert!((res.scalar.unwrap() - (C::new(1.0, 0.0) - q * q)).norm() < 1e-13);
    }
    let d = make_r(2, c(2.0)).unwrap();
    assert!((check_regularity(&d).unwrap().scalar.unwrap() - c(-3.0)).norm() < 1e-14);
}

#[test]
fn generic_q_guard() {
    assert!(make_r::<f64>(2, c(1.0)).is_err());
    assert!(make_r::<f64>(2, c(-1.0)).is_err());
    assert!(make_r::<f64>(2, c(0.0)).is_err());
    assert!(make_r::<f64>(2, C::from_polar(1.0, std::f64::consts::PI / 4.0)).is_err());
    assert!(make_r::<f64>(3, C::from_polar(1.0, std::f64::consts::PI / 6.0)).is_err());
    assert!(make_r::<f64>(2, C::from_polar(1.0, std::f64::consts::PI / 6.0)).is_ok());
}

#[test]
fn k_family_example_matrix() {
    let k = make_k_family(2, c(1.0), c(2.0), &[c(1.0)]).unwrap();
    let v = k.eval(c(2.0)).unwrap();
    assert_eq!(v.entry(0, 0), c(1.0));
    assert_eq!(v.entry(0, 1), c(-3.0));
    assert_eq!(v.entry(1, 0), c(-6.0));
    assert_eq!(v.entry(1, 1), c(-2.0));
}

#[test]
fn k_family_values_at_plus_minus_one() {
    let (theta, kappa) = (C::new(0.7, 0.2), C::new(0.4, -0.3));
    for n in 2..=5 {
        let xi: Vec<C> = (0..n / 2).map(|a| C::new(1.0 + a as f64, 0.3)).collect();
        let k = make_k_family(n, theta, kappa, &xi).unwrap();
        let one = C::new(1.0, 0.0);
        for (sigma, expected) in [(one, theta + one - kappa), (-one, one - kappa - theta)] {
            let id = TensorOperator::identity(local_space(n, 1).unwrap()).scale(expected);
            assert!(
                equality_residual(&k.eval(sigma).unwrap(), &id)
                    .unwrap()
                    .relative
                    < 1e-15
            );
        }
    }
}

#[test]
fn odd_middle_column() {
    let (theta, kappa) = (C::new(0.7, 0.2), C::new(0.4, -0.3));
    let k = make_k_family(3, theta, kappa, &[C::new(1.3, 0.1)]).unwrap();
    let x = C::new(0.9, 0.4);
    let v = k.eval(x).unwrap();
    assert!((v.entry(1, 1) - (theta * x + 1.0 - kappa * x * x)).norm() < 1e-15);
    assert_eq!(v.entry(0, 1), c(0.0));
    assert_eq!(v.entry(2, 1), c(0.0));
}

#[test]
fn k_family_rejects_bad_xi() {
    assert!(make_k_family(2, c(1.0), c(2.0), &[c(0.0)]).is_err());
    assert!(make_k_family(3, c(1.0), c(2.0), &[]).is_err());
    assert!(make_k_family(4, c(1.0), c(2.0), &[c(1.0)]).is_err());
}

#[test]
fn k_minus_is_j_conjugate_of_family() {
    let d = make_r(2, default_q()).unwrap();
    let km = make_k_minus(&d, c(1.0), c(2.0), &[c(1.0)]).unwrap();
    let v = km.k.eval(c(2.0)).unwrap();
    // J⁻¹ [[1,−3],[−6,−2]] J with J antidiagonal.
    let expected = [[-2.0, -6.0], [-3.0, 1.0]];
    for r in 0..2 {
        for cc in 0..2 {
            assert_eq!(v.entry(r, cc), c(expected[r][cc]));
        }
    }
}

#[test]
fn k_plus_at_one() {
    let q = default_q();
    let d = make_r(2, q).unwrap();
    let (theta, kappa, xi) = default_plus_params::<f64>(2);
    let kp = make_k_plus(&d, theta, kappa, &xi).unwrap();
    let one = C::new(1.0, 0.0);
    let expected = (one - q.powi(4)) * (theta + one - kappa);
    let id = TensorOperator::identity(local_space(2, 1).unwrap()).scale(expected);
    assert!(
        equality_residual(&kp.k.eval(one).unwrap(), &id)
            .unwrap()
            .relative
            < 1e-14
    );
}

#[test]
fn kprime_routes_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in [2, 3, 4] {
        let d = make_r(n, default_q()).unwrap();
        let (theta, kappa, xi) = default_plus_params::<f64>(n);
        let kp = make_k_plus(&d, theta, kappa, &xi).unwrap();
        let (a, b) = (kp.kprime().unwrap(), kp.kprime_closed.as_ref().unwrap());
        let mut points: Vec<C> = (0..20).map(|_| random_point(&mut rng)).collect();
        let r = d.r;
        points.extend([c(1.0), c(-1.0), r.inv(), -r.inv(), c(0.0), c(1.0) + 1e-6]);
        for x in points {
            let res = equality_residual(&a.eval(x).unwrap(), &b.eval(x).unwrap()).unwrap();
            assert!(res.relative <= 1e-9, "n={n} x={x}: {res:?}");
        }
    }
}

#[test]
fn kprime_at_special_points_is_multiple_of_m() {
    for n in [2, 3] {
        let d = make_r(n, default_q()).unwrap();
        let (theta, kappa, xi) = default_plus_params::<f64>(n);
        let kp = make_k_plus(&d, theta, kappa, &xi).unwrap();
        for x in [d.r.inv(), -d.r.inv()] {
            let res = proportionality(&kp.kprime().unwrap().eval(x).unwrap(), &d.m).unwrap();
            assert!(res.relative <= 1e-9, "{res:?}");
        }
    }
}

#[test]
fn ybe_examples() {
    let d = make_r(2, c(2.0)).unwrap();
    assert!(check_ybe(&d, c(3.0), c(5.0)).unwrap().relative <= 1e-12);
    assert!(check_ybe(&d, c(3.0), c(3.0)).unwrap().relative <= 1e-12);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let d3 = make_r(3, default_q()).unwrap();
    for _ in 0..20 {
        let (x, y) = (random_point(&mut rng), random_point(&mut rng));
        assert!(check_ybe(&d3, x, y).unwrap().relative <= 1e-11);
    }
}

#[test]
fn twisted_ybe_examples() {
    let d = make_r(2, c(2.0)).unwrap();
    assert!(check_twisted_ybe(&d, c(3.0), c(5.0)).unwrap().relative <= 1e-10);
    assert!(check_twisted_ybe(&d, c(3.0), c(3.0)).unwrap().relative <= 1e-10);
}

#[test]
fn unitarity_and_crossing() {
    let d = make_r(2, c(2.0)).unwrap();
    let u = check_unitarity(&d, c(3.0)).unwrap();
    assert!(u.relative <= 1e-13);
    // For a multiple of Id the fitted scalar is the (0,0) entry of the product.
    let rx = d.r_fn.eval(c(3.0)).unwrap();
    let r21 = d.r21.eval(c(1.0 / 3.0)).unwrap();
    let s = (0..4)
        .map(|k| rx.matrix().row(0)[k] * r21.matrix().column(0)[k])
        .sum::<C>();
    assert!((u.scalar.unwrap() - s).norm() < 1e-12);

    let q = default_q();
    for n in [2, 3] {
        let d = make_r(n, q).unwrap();
        let x = C::new(0.9, 0.4);
        assert!(check_crossing(&d, x).unwrap().relative <= 1e-9);
        assert!(check_rmm(&d, x).unwrap().absolute == 0.0);
        assert!(check_rjj(&d, x).unwrap().relative == 0.0);
        assert!(check_double_tilde(&d, x).unwrap().relative <= 1e-10);
    }
}

#[test]
fn boundary_unitarity_and_regularity() {
    let k = make_k_family(2, c(1.0), c(2.0), &[c(1.0)]).unwrap();
    assert!(check_boundary_unitarity(&k, c(2.0)).unwrap().relative <= 1e-13);
    assert!(check_boundary_unitarity(&k, c(1.0)).unwrap().relative <= 1e-13);
    // θ + 1 − κ = 0 at σ = 1 makes K(1) vanish.
    assert_eq!(
        check_boundary_regularity(&k, c(1.0)).unwrap(),
        Regularity::Degenerate
    );
    match check_boundary_regularity(&k, c(-1.0)).unwrap() {
        Regularity::Proportional(r) => {
            assert!(r.relative <= 1e-13);
            assert!((r.scalar.unwrap() - c(-2.0)).norm() < 1e-14);
        }
        Regularity::Degenerate => panic!("1 − κ − θ = −2 is not degenerate"),
    }
}

#[test]
fn reflection_equations_hold() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in [2, 3] {
        let d = make_r(n, default_q()).unwrap();
        let (tp, kp_, xp) = default_plus_params::<f64>(n);
        let (tm, km_, xm) = default_minus_params::<f64>(n);
        let kp = make_k_plus(&d, tp, kp_, &xp).unwrap();
        let km = make_k_minus(&d, tm, km_, &xm).unwrap();
        for _ in 0..5 {
            let (x, y) = (random_point(&mut rng), random_point(&mut rng));
            assert!(
                check_reflection(&d, &kp.family, Reflection::Left, x, y)
                    .unwrap()
                    .relative
                    <= 1e-10
            );
            assert!(
                check_reflection(&d, &kp.k, Reflection::Left, x, y)
                    .unwrap()
                    .relative
                    <= 1e-10
            );
            assert!(
                check_reflection(&d, &km.k, Reflection::Right, x, y)
                    .unwrap()
                    .relative
                    <= 1e-10
            );
            assert!(
                check_reflection(&d, kp.kprime().unwrap(), Reflection::Dual, x, y)
                    .unwrap()
                    .relative
                    <= 1e-9
            );
            // A left solution is not a right solution in general.
            assert!(
                check_reflection(&d, &kp.family, Reflection::Right, x, y)
                    .unwrap()
                    .relative
                    > 1e-4
            );
        }
    }
}

#[test]
fn structure_and_image_patterns() {
    for n in [2, 3, 4] {
        let d = make_r(n, default_q()).unwrap();
        let (tp, kp_, xp) = default_plus_params::<f64>(n);
        let (tm, km_, xm) = default_minus_params::<f64>(n);
        let kp = make_k_plus(&d, tp, kp_, &xp).unwrap();
        let km = make_k_minus(&d, tm, km_, &xm).unwrap();
        assert_eq!(r0_structure_violation(&d).unwrap(), 0.0);
        assert_eq!(kminus0_structure_violation(&km.k).unwrap(), 0.0);
        assert_eq!(
            kprime0_structure_violation(kp.kprime_closed.as_ref().unwrap()).unwrap(),
            0.0
        );
        let x = C::new(0.9, 0.4);
        assert_eq!(r_image_violation(&d, x).unwrap(), 0.0);
        assert_eq!(k_image_violation(&km.k, x).unwrap(), 0.0);
        assert_eq!(
            k_image_violation(kp.kprime_closed.as_ref().unwrap(), x).unwrap(),
            0.0
        );
        // Route (a) agrees with the pattern up to roundoff.
        assert!(kprime0_structure_violation(kp.kprime().unwrap()).unwrap() < 1e-12);
        assert!(k_image_violation(kp.kprime().unwrap(), x).unwrap() < 1e-12);
    }
}

#[test]
fn rtilde_poles_are_declared() {
    let q = default_q();
    let d = make_r(2, q).unwrap();
    assert!(d.rtilde.eval(c(1.0)).is_err());
    assert!(d.rtilde.eval(q.powi(-4)).is_err());
    // Slightly off the pole the runtime condition guard still refuses.
    assert!(d.rtilde.with_margin(0.0).eval(c(1.0) + 1e-14).is_err());
    assert!(d.r_fn.eval_inverse(q * q).is_err());
}
