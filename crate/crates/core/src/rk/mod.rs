//! The trigonometric `sl_n`-type R-matrix, the diagonal-plus-antidiagonal
//! K-matrix family, and the objects derived from them.

mod checks;

pub use checks::*;

use nalgebra::DMatrix;
use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::function::{local_space, MatrixFunction};
use crate::maps::phi_r;
use crate::scalar::{fmt_complex, ipow, lit, to_f64, Real};
use crate::tensor::{flip, partial_transpose, TensorOperator};

/// `|q^(2k) − 1|` must exceed this for `1 ≤ k ≤ 2n`.
pub const GENERIC_Q_GUARD: f64 = 1e-8;

/// `ᾱ` for a 0-based index.
#[inline]
pub fn bar(n: usize, a: usize) -> usize {
    n - 1 - a
}

/// R-matrix datum: `R`, `R_21`, `R̃` and the constant operators `P`, `J`, `M`.
#[derive(Clone, Debug)]
pub struct RMatrixDatum<T: Real> {
    pub n: usize,
    pub q: Complex<T>,
    /// `r = q^n`.
    pub r: Complex<T>,
    pub r_fn: MatrixFunction<T>,
    pub r21: MatrixFunction<T>,
    pub rtilde: MatrixFunction<T>,
    pub p: TensorOperator<T>,
    /// `J v_α = v_ᾱ`.
    pub j: TensorOperator<T>,
    /// `M v_α = q^(ᾱ−α) v_α`.
    pub m: TensorOperator<T>,
}

fn r_matrix<T: Real>(n: usize, q: Complex<T>, x: Complex<T>) -> DMatrix<Complex<T>> {
    let one = Complex::<T>::one();
    let q2 = q * q;
    let mut mat = DMatrix::zeros(n * n, n * n);
    for a in 0..n {
        for b in 0..n {
            let col = a * n + b;
            let swapped = b * n + a;
            if a == b {
                mat[(col, col)] = one - q2 * x;
            } else {
                mat[(col, col)] = q * (one - x);
                mat[(swapped, col)] = if a < b { (one - q2) * x } else { one - q2 };
            }
        }
    }
    mat
}

impl<T: Real> RMatrixDatum<T> {
    /// Same datum with every function refusing arguments within `margin` of
    /// its singular points.
    pub fn with_margin(&self, margin: f64) -> Self {
        Self {
            r_fn: self.r_fn.with_margin(margin),
            r21: self.r21.with_margin(margin),
            rtilde: self.rtilde.with_margin(margin),
            ..self.clone()
        }
    }
}

/// Rejects `q` at or near zero or a root of unity of order dividing `2k`, `k ≤ 2n`.
pub fn check_generic_q<T: Real>(n: usize, q: Complex<T>) -> Result<()> {
    if to_f64(q.norm()) < GENERIC_Q_GUARD || !crate::scalar::is_finite(q) {
        return Err(Error::InvalidParameter(format!(
            "q = {} is not a nonzero finite number",
            fmt_complex(q)
        )));
    }
    for k in 1..=2 * n as i32 {
        if to_f64((ipow(q, 2 * k) - Complex::one()).norm()) < GENERIC_Q_GUARD {
            return Err(Error::InvalidParameter(format!(
                "q = {} satisfies q^{} = 1 (generic q required)",
                fmt_complex(q),
                2 * k
            )));
        }
    }
    Ok(())
}

/// Builds the R-matrix datum for local dimension `n` and deformation `q`.
pub fn make_r<T: Real>(n: usize, q: Complex<T>) -> Result<RMatrixDatum<T>> {
    let space = local_space(n, 2)?;
    check_generic_q(n, q)?;
    let q2 = q * q;
    let r_fn = MatrixFunction::new("R", n, 2, {
        let space = space.clone();
        move |x| TensorOperator::from_matrix(space.clone(), r_matrix(n, q, x))
    })
    .with_zeros(vec![q2, q2.inv()])
    .with_degree(1);

    let r21 = r_fn.map("R21", move |op| {
        let src = op.matrix();
        let swap = |i: usize| (i % n) * n + i / n;
        TensorOperator::from_fn(op.space().clone(), |r, c| src[(swap(r), swap(c))])
    });

    // det R(x)^{t_1} = q^(n²−n) (1−x)^(n²−1) (1 − q^(2n) x)
    let rtilde = MatrixFunction::new("Rtilde", n, 2, {
        let r_fn = r_fn.clone();
        move |x| {
            let rt1 = partial_transpose(&r_fn.eval(x)?, 1)?;
            let inv = rt1.inverse().map_err(|_| Error::Singular {
                what: "R^{t1}".into(),
                at: fmt_complex(x),
            })?;
            partial_transpose(&inv, 1)
        }
    })
    .with_poles(vec![Complex::one(), ipow(q, -2 * n as i32)]);

    let p = flip(n)?;
    let j = TensorOperator::from_fn(local_space(n, 1)?, |r, c| {
        if r == bar(n, c) {
            Complex::one()
        } else {
            Complex::zero()
        }
    })?;
    let diag: Vec<Complex<T>> = (0..n)
        .map(|a| ipow(q, bar(n, a) as i32 - a as i32))
        .collect();
    let m = TensorOperator::diagonal(n, &diag)?;
    Ok(RMatrixDatum {
        n,
        q,
        r: ipow(q, n as i32),
        r_fn,
        r21,
        rtilde,
        p,
        j,
        m,
    })
}

/// Which boundary a K-matrix lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Plus,
    Minus,
}

/// K-matrix datum: family parameters and the derived boundary matrices.
#[derive(Clone, Debug)]
pub struct KMatrixDatum<T: Real> {
    pub side: Side,
    pub theta: Complex<T>,
    pub kappa: Complex<T>,
    pub xi: Vec<Complex<T>>,
    /// `K_{θ,κ,ξ}`.
    pub family: MatrixFunction<T>,
    /// `K⁺` or `K⁻`.
    pub k: MatrixFunction<T>,
    /// `K′ = φ_R̃(K⁺)`; plus side only.
    pub kprime: Option<MatrixFunction<T>>,
    /// Closed form of `K′`; plus side only, kept as an independent cross-check.
    pub kprime_closed: Option<MatrixFunction<T>>,
}

impl<T: Real> KMatrixDatum<T> {
    pub fn with_margin(&self, margin: f64) -> Self {
        Self {
            family: self.family.with_margin(margin),
            k: self.k.with_margin(margin),
            kprime: self.kprime.as_ref().map(|f| f.with_margin(margin)),
            kprime_closed: self.kprime_closed.as_ref().map(|f| f.with_margin(margin)),
            ..self.clone()
        }
    }

    /// `K′`, or an error on the minus side.
    pub fn kprime(&self) -> Result<&MatrixFunction<T>> {
        self.kprime
            .as_ref()
            .ok_or_else(|| Error::InvalidParameter("K′ exists only for the plus side".into()))
    }
}

fn family_matrix<T: Real>(
    n: usize,
    theta: Complex<T>,
    kappa: Complex<T>,
    xi: &[Complex<T>],
    x: Complex<T>,
) -> DMatrix<Complex<T>> {
    let one = Complex::<T>::one();
    let x2 = x * x;
    let mut mat = DMatrix::zeros(n, n);
    for a in 0..n {
        let ab = bar(n, a);
        mat[(a, a)] = theta * x;
        // 1-based α versus the midpoint (n+1)/2.
        let twice = 2 * (a + 1);
        if twice < n + 1 {
            mat[(a, a)] += one - kappa;
            mat[(ab, a)] = kappa / xi[a] * (one - x2);
        } else if twice == n + 1 {
            mat[(a, a)] += one - kappa * x2;
        } else {
            mat[(ab, a)] = xi[ab] * (one - x2);
            mat[(a, a)] += (one - kappa) * x2;
        }
    }
    mat
}

fn validate_xi<T: Real>(n: usize, xi: &[Complex<T>]) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidDimension(n));
    }
    if xi.len() != n / 2 {
        return Err(Error::InvalidParameter(format!(
            "ξ needs {} entries for n = {n}, got {}",
            n / 2,
            xi.len()
        )));
    }
    if let Some(a) = xi.iter().position(|z| to_f64(z.norm()) == 0.0) {
        return Err(Error::InvalidParameter(format!("ξ_{} is zero", a + 1)));
    }
    Ok(())
}

/// The degree-2 family `K_{θ,κ,ξ}`.
pub fn make_k_family<T: Real>(
    n: usize,
    theta: Complex<T>,
    kappa: Complex<T>,
    xi: &[Complex<T>],
) -> Result<MatrixFunction<T>> {
    validate_xi(n, xi)?;
    let space = local_space(n, 1)?;
    let xi = xi.to_vec();
    Ok(MatrixFunction::new("K_fam", n, 1, move |x| {
        TensorOperator::from_matrix(space.clone(), family_matrix(n, theta, kappa, &xi, x))
    })
    .with_degree(2))
}

/// `K⁺(x) = (1 − q^(2n) x²) K_{θ,κ,ξ}(x)`, with `K′` built from it.
pub fn make_k_plus<T: Real>(
    datum: &RMatrixDatum<T>,
    theta: Complex<T>,
    kappa: Complex<T>,
    xi: &[Complex<T>],
) -> Result<KMatrixDatum<T>> {
    let n = datum.n;
    let family = make_k_family(n, theta, kappa, xi)?;
    let q2n = ipow(datum.q, 2 * n as i32);
    let k = MatrixFunction::new("K+", n, 1, {
        let family = family.clone();
        move |x| Ok(family.eval(x)?.scale(Complex::<T>::one() - q2n * x * x))
    })
    .with_degree(4);
    let kprime = phi_r(&k, datum, true)?
        .with_removable_poles(2)
        .renamed("K'");
    let kprime_closed = kprime_closed_form(datum, theta, kappa, xi)?;
    Ok(KMatrixDatum {
        side: Side::Plus,
        theta,
        kappa,
        xi: xi.to_vec(),
        family,
        k,
        kprime: Some(kprime),
        kprime_closed: Some(kprime_closed),
    })
}

/// `K⁻(x) = J⁻¹ K_{θ,κ,ξ}(x) J`.
pub fn make_k_minus<T: Real>(
    datum: &RMatrixDatum<T>,
    theta: Complex<T>,
    kappa: Complex<T>,
    xi: &[Complex<T>],
) -> Result<KMatrixDatum<T>> {
    let family = make_k_family(datum.n, theta, kappa, xi)?;
    let k = crate::maps::chi_j(&family, &datum.j)?.renamed("K-");
    Ok(KMatrixDatum {
        side: Side::Minus,
        theta,
        kappa,
        xi: xi.to_vec(),
        family,
        k,
        kprime: None,
        kprime_closed: None,
    })
}

/// Closed form of `K′`: `q⁻¹ K_{θ,κ,Δ_q ξ}(q^n x) M` for even `n` and
/// `K_{q⁻¹θ, q⁻²κ, Δ_q ξ}(q^n x) M` for odd `n`, with
/// `Δ_q = diag(q^(2⌊n/2⌋−1), …, q³, q)`.
pub fn kprime_closed_form<T: Real>(
    datum: &RMatrixDatum<T>,
    theta: Complex<T>,
    kappa: Complex<T>,
    xi: &[Complex<T>],
) -> Result<MatrixFunction<T>> {
    let n = datum.n;
    validate_xi(n, xi)?;
    let q = datum.q;
    let half = (n / 2) as i32;
    let xi_t: Vec<Complex<T>> = xi
        .iter()
        .enumerate()
        .map(|(a, &v)| ipow(q, 2 * half - 1 - 2 * a as i32) * v)
        .collect();
    let (prefactor, th, ka) = if n % 2 == 0 {
        (q.inv(), theta, kappa)
    } else {
        (Complex::one(), theta / q, kappa / (q * q))
    };
    let r = datum.r;
    let m = datum.m.clone();
    let space = local_space(n, 1)?;
    Ok(MatrixFunction::new("K'_closed", n, 1, move |x| {
        let fam =
            TensorOperator::from_matrix(space.clone(), family_matrix(n, th, ka, &xi_t, r * x))?;
        Ok(fam.dot(&m)?.scale(prefactor))
    })
    .with_degree(2))
}

/// Default plus-side family parameters used by the harness.
pub fn default_plus_params<T: Real>(n: usize) -> (Complex<T>, Complex<T>, Vec<Complex<T>>) {
    let xi = [
        Complex::new(lit(1.3), lit(0.1)),
        Complex::new(lit(0.8), lit(-0.5)),
    ];
    (
        Complex::new(lit(0.7), lit(0.2)),
        Complex::new(lit(0.4), lit(-0.3)),
        (0..n / 2)
            .map(|a| xi[a % 2] * lit::<T>(1.0 + 0.1 * (a / 2) as f64))
            .collect(),
    )
}

/// Default minus-side family parameters used by the harness.
pub fn default_minus_params<T: Real>(n: usize) -> (Complex<T>, Complex<T>, Vec<Complex<T>>) {
    let xi = [
        Complex::new(lit(0.6), lit(0.3)),
        Complex::new(lit(1.1), T::zero()),
    ];
    (
        Complex::new(lit(-0.3), lit(0.5)),
        Complex::new(lit(1.4), lit(0.2)),
        (0..n / 2)
            .map(|a| xi[a % 2] * lit::<T>(1.0 + 0.1 * (a / 2) as f64))
            .collect(),
    )
}

#[cfg(test)]
mod tests;
