//! The library is generic over the scalar type; smoke-test it in `f32`.

use num_complex::Complex;
use reflectlab_core::rk::{check_reflection, check_ybe, Reflection};
use reflectlab_core::rk::{
    default_minus_params, default_plus_params, make_k_minus, make_k_plus, make_r,
};
use reflectlab_core::transfer::{commutator_at, Chain, ChainConfig};

type C32 = Complex<f32>;

#[test]
fn identities_hold_in_single_precision() {
    let d = make_r(2, C32::from_polar(1.1, 0.37)).unwrap();
    let (x, y) = (C32::new(0.8, 0.3), C32::new(-0.5, 1.1));
    assert!(check_ybe(&d, x, y).unwrap().relative < 1e-5);
    let (t, k, xi) = default_plus_params::<f32>(2);
    let kp = make_k_plus(&d, t, k, &xi).unwrap();
    let r = check_reflection(&d, kp.kprime().unwrap(), Reflection::Dual, x, y).unwrap();
    assert!(r.relative < 1e-4, "{r:?}");
}

#[test]
fn transfer_matrices_commute_in_single_precision() {
    let chain = Chain::new(ChainConfig::<f32>::with_defaults(2, 2)).unwrap();
    let (t, k, xi) = default_plus_params::<f32>(2);
    let kp = make_k_plus(&chain.datum, t, k, &xi).unwrap();
    let (t, k, xi) = default_minus_params::<f32>(2);
    let km = make_k_minus(&chain.datum, t, k, &xi).unwrap();
    let r = commutator_at(
        |x| chain.transfer_boundary(kp.kprime().unwrap(), &km.k, x),
        C32::new(0.9, 0.4),
        C32::new(1.2, -0.3),
    )
    .unwrap();
    assert!(r.relative < 1e-4, "{r:?}");
}
