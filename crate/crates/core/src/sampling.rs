//! Random spectral parameters away from singular points.
//!
//! Moduli are uniform in `[0.6, 1.8]` and phases uniform. A draw is rejected
//! when the check it feeds refuses one of its arguments; callers pass
//! functions guarded with [`REJECTION_DISTANCE`] so that every argument of
//! every inversion, including composite ones such as `x/y` or `xy`, keeps that
//! distance from the declared singular points.

use num_complex::Complex;
use rand::Rng;

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

pub const MODULUS_RANGE: (f64, f64) = (0.6, 1.8);
pub const REJECTION_DISTANCE: f64 = 1e-3;
pub const MAX_ATTEMPTS: usize = 100;

pub fn random_point<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Complex<T> {
    let modulus = rng.random_range(MODULUS_RANGE.0..MODULUS_RANGE.1);
    let phase = rng.random_range(0.0..std::f64::consts::TAU);
    Complex::from_polar(lit(modulus), lit(phase))
}

/// Draws `k` points and runs `f` on them, redrawing whenever `f` reports a
/// singular argument. Other errors are returned immediately.
pub fn sample_regular<T: Real, R: Rng + ?Sized, V>(
    rng: &mut R,
    k: usize,
    mut f: impl FnMut(&[Complex<T>]) -> Result<V>,
) -> Result<(Vec<Complex<T>>, V)> {
    for _ in 0..MAX_ATTEMPTS {
        let points: Vec<Complex<T>> = (0..k).map(|_| random_point(rng)).collect();
        match f(&points) {
            Ok(v) => return Ok((points, v)),
            Err(Error::Singular { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::SamplingExhausted(MAX_ATTEMPTS))
}

/// Whether `x` lies within `distance` of any of `points`.
pub fn near_any<T: Real>(x: Complex<T>, points: &[Complex<T>], distance: f64) -> bool {
    points
        .iter()
        .any(|&p| crate::scalar::to_f64((x - p).norm()) < distance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn points_lie_in_annulus() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..1000 {
            let z: Complex<f64> = random_point(&mut rng);
            assert!((0.6..=1.8).contains(&z.norm()));
        }
    }

    #[test]
    fn singular_draws_are_redrawn() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut calls = 0;
        let (pts, v) = sample_regular::<f64, _, _>(&mut rng, 2, |p| {
            calls += 1;
            if calls < 5 {
                Err(Error::Singular {
                    what: "test".into(),
                    at: format!("{}", p[0]),
                })
            } else {
                Ok(7)
            }
        })
        .unwrap();
        assert_eq!((pts.len(), v, calls), (2, 7, 5));
    }

    #[test]
    fn exhaustion_is_reported() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let r = sample_regular::<f64, _, ()>(&mut rng, 1, |_| {
            Err(Error::Singular {
                what: "always".into(),
                at: String::new(),
            })
        });
        assert_eq!(r, Err(Error::SamplingExhausted(MAX_ATTEMPTS)));
    }

    #[test]
    fn other_errors_propagate() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let r = sample_regular::<f64, _, ()>(&mut rng, 1, |_| Err(Error::NonFinite));
        assert_eq!(r, Err(Error::NonFinite));
    }
}
