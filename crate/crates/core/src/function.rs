//! Parameter-dependent operators `x ↦ X(x)` with declared singular points.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{fmt_complex, lit, to_f64, Real};
use crate::tensor::{LegSpace, TensorOperator};

type EvalFn<T> = dyn Fn(Complex<T>) -> Result<TensorOperator<T>> + Send + Sync;

/// Distance below which an argument counts as hitting a declared singular
/// point, unless overridden with [`MatrixFunction::with_margin`].
pub const DEFAULT_MARGIN: f64 = 1e-12;

/// A parameter-dependent operator on `arity` local legs labelled `[1..=arity]`.
///
/// `poles` are points where evaluation is invalid; `zeros` are points where
/// the value exists but is not invertible. Inversions are additionally guarded
/// at runtime by a condition-number threshold, which covers singular points
/// that were not declared.
#[derive(Clone)]
pub struct MatrixFunction<T: Real> {
    name: Arc<str>,
    n: usize,
    arity: usize,
    eval: Arc<EvalFn<T>>,
    poles: Vec<Complex<T>>,
    zeros: Vec<Complex<T>>,
    degree_hint: Option<usize>,
    margin: f64,
}

impl<T: Real> fmt::Debug for MatrixFunction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MatrixFunction")
            .field("name", &self.name)
            .field("n", &self.n)
            .field("arity", &self.arity)
            .field("poles", &self.poles)
            .field("zeros", &self.zeros)
            .field("degree_hint", &self.degree_hint)
            .finish()
    }
}

impl<T: Real> MatrixFunction<T> {
    pub fn new(
        name: impl Into<Arc<str>>,
        n: usize,
        arity: usize,
        eval: impl Fn(Complex<T>) -> Result<TensorOperator<T>> + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            n,
            arity,
            eval: Arc::new(eval),
            poles: Vec::new(),
            zeros: Vec::new(),
            degree_hint: None,
            margin: DEFAULT_MARGIN,
        }
    }

    /// Constant function.
    pub fn constant(name: impl Into<Arc<str>>, value: TensorOperator<T>) -> Self {
        let (n, arity) = (value.n(), value.num_legs());
        Self::new(name, n, arity, move |_| Ok(value.clone())).with_degree(0)
    }

    pub fn with_poles(mut self, poles: Vec<Complex<T>>) -> Self {
        self.poles = poles;
        self
    }

    pub fn with_zeros(mut self, zeros: Vec<Complex<T>>) -> Self {
        self.zeros = zeros;
        self
    }

    pub fn with_degree(mut self, degree: usize) -> Self {
        self.degree_hint = Some(degree);
        self
    }

    pub fn without_degree(mut self) -> Self {
        self.degree_hint = None;
        self
    }

    /// Same function, refusing arguments within `margin` of a singular point.
    pub fn with_margin(&self, margin: f64) -> Self {
        let mut out = self.clone();
        out.margin = margin;
        out
    }

    pub fn renamed(mut self, name: impl Into<Arc<str>>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn poles(&self) -> &[Complex<T>] {
        &self.poles
    }

    pub fn zeros(&self) -> &[Complex<T>] {
        &self.zeros
    }

    pub fn degree_hint(&self) -> Option<usize> {
        self.degree_hint
    }

    pub fn margin(&self) -> f64 {
        self.margin
    }

    fn near(&self, x: Complex<T>, points: &[Complex<T>]) -> bool {
        points.iter().any(|&s| to_f64((x - s).norm()) < self.margin)
    }

    /// Whether evaluation or inversion at `x` is refused.
    pub fn is_singular(&self, x: Complex<T>) -> bool {
        self.near(x, &self.poles) || self.near(x, &self.zeros)
    }

    fn singular(&self, x: Complex<T>) -> Error {
        Error::Singular {
            what: self.name.to_string(),
            at: fmt_complex(x),
        }
    }

    pub fn eval(&self, x: Complex<T>) -> Result<TensorOperator<T>> {
        if self.near(x, &self.poles) {
            return Err(self.singular(x));
        }
        (self.eval)(x)
    }

    pub fn eval_inverse(&self, x: Complex<T>) -> Result<TensorOperator<T>> {
        if self.near(x, &self.zeros) {
            return Err(self.singular(x));
        }
        self.eval(x)?.inverse().map_err(|_| self.singular(x))
    }

    /// Pointwise transform of the values; singular data and degree are kept.
    pub fn map(
        &self,
        name: impl Into<Arc<str>>,
        f: impl Fn(TensorOperator<T>) -> Result<TensorOperator<T>> + Send + Sync + 'static,
    ) -> Self {
        let inner = self.clone();
        let mut out = Self::new(name, self.n, self.arity, move |x| f(inner.eval(x)?));
        out.poles = self.poles.clone();
        out.zeros = self.zeros.clone();
        out.degree_hint = self.degree_hint;
        out
    }

    /// Treats the declared poles as removable: near them the value is
    /// reconstructed by degree-`degree` interpolation through nodes on a small
    /// circle, away from them the function is evaluated directly.
    pub fn with_removable_poles(&self, degree: usize) -> Self {
        let poles = self.poles.clone();
        let mut sep = f64::INFINITY;
        for (a, &p) in poles.iter().enumerate() {
            for &p2 in &poles[a + 1..] {
                sep = sep.min(to_f64((p - p2).norm()));
            }
        }
        let radius = 0.1f64.min(0.25 * sep);
        let mut inner = self.clone();
        inner.poles.clear();
        let direct = inner.clone();
        let mut out = Self::new(self.name.clone(), self.n, self.arity, move |x| {
            let nearest = poles
                .iter()
                .copied()
                .min_by(|a, b| (x - *a).norm().partial_cmp(&(x - *b).norm()).unwrap());
            match nearest {
                Some(c) if to_f64((x - c).norm()) < 0.5 * radius => {
                    let nodes: Vec<Complex<T>> = (0..=degree)
                        .map(|k| {
                            let phase = 2.0 * std::f64::consts::PI * (k as f64 + 0.25)
                                / (degree as f64 + 1.0);
                            c + Complex::from_polar(lit::<T>(radius), lit(phase))
                        })
                        .collect();
                    let values = nodes
                        .iter()
                        .map(|&z| direct.eval(z))
                        .collect::<Result<Vec<_>>>()?;
                    lagrange(&nodes, &values, x)
                }
                _ => direct.eval(x),
            }
        });
        out.zeros = inner.zeros;
        out.degree_hint = Some(degree);
        out
    }
}

/// Evaluates the interpolating polynomial through `(nodes[k], values[k])` at `x`.
pub fn lagrange<T: Real>(
    nodes: &[Complex<T>],
    values: &[TensorOperator<T>],
    x: Complex<T>,
) -> Result<TensorOperator<T>> {
    let first = values
        .first()
        .ok_or_else(|| Error::InvalidParameter("no interpolation nodes".into()))?;
    let mut acc = TensorOperator::zeros(first.space().clone());
    for (k, v) in values.iter().enumerate() {
        let mut w = Complex::<T>::one();
        for (m, &zm) in nodes.iter().enumerate() {
            if m != k {
                w *= (x - zm) / (nodes[k] - zm);
            }
        }
        if !w.is_zero() {
            acc = acc.add(&v.scale(w))?;
        }
    }
    Ok(acc)
}

/// Space of a function's local values.
pub fn local_space(n: usize, arity: usize) -> Result<LegSpace> {
    LegSpace::chain(n, arity)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cplx;
    use crate::tensor::equality_residual;

    type C = Complex<f64>;

    fn quadratic() -> MatrixFunction<f64> {
        MatrixFunction::new("quad", 2, 1, |x: C| {
            TensorOperator::from_fn(local_space(2, 1)?, |r, c| {
                C::new(1.0 + r as f64, c as f64)
                    + x * C::new(0.5, -1.0) * (r + c) as f64
                    + x * x * C::new(0.0, 2.0)
            })
        })
        .with_degree(2)
    }

    #[test]
    fn poles_and_zeros_are_refused() {
        let f = quadratic()
            .with_poles(vec![cplx(1.0, 0.0)])
            .with_zeros(vec![cplx(2.0, 0.0)]);
        assert!(f.eval(cplx(1.0, 0.0)).is_err());
        assert!(f.eval(cplx(2.0, 0.0)).is_ok());
        assert!(f.eval_inverse(cplx(2.0, 0.0)).is_err());
        assert!(f.eval(cplx(1.0005, 0.0)).is_ok());
        assert!(f.with_margin(1e-3).eval(cplx(1.0005, 0.0)).is_err());
    }

    #[test]
    fn removable_poles_are_filled_by_interpolation() {
        let f = quadratic().with_poles(vec![cplx(1.0, 0.0), cplx(-1.0, 0.0)]);
        let g = f.with_removable_poles(2);
        assert!(g.poles().is_empty());
        let exact = quadratic();
        for x in [
            cplx(1.0, 0.0),
            cplx(-1.0, 0.0),
            cplx(1.01, -0.01),
            cplx(0.3, 0.4),
        ] {
            let r = equality_residual(&g.eval(x).unwrap(), &exact.eval(x).unwrap()).unwrap();
            assert!(r.relative < 1e-13, "{x}: {r:?}");
        }
    }

    #[test]
    fn lagrange_reproduces_polynomials() {
        let f = quadratic();
        let nodes = [cplx(0.1, 0.0), cplx(0.7, 0.2), cplx(-0.4, 1.0)];
        let values: Vec<_> = nodes.iter().map(|&z| f.eval(z).unwrap()).collect();
        let x = cplx(1.3, -0.8);
        let r =
            equality_residual(&lagrange(&nodes, &values, x).unwrap(), &f.eval(x).unwrap()).unwrap();
        assert!(r.relative < 1e-13);
    }
}
