//! Monodromy and transfer matrices of inhomogeneous chains: periodic `T`,
//! boundary `𝒯`, the polynomial variant `𝒯̃`, and the folding construction
//! of boundary monodromies from ordinary ones.

use num_complex::Complex;
use num_traits::One;

use crate::error::{Error, Result};
use crate::function::MatrixFunction;
use crate::rk::{make_r, RMatrixDatum};
use crate::scalar::{fmt_complex, lit, to_f64, Real};
use crate::tensor::{
    commutator_residual, embed, equality_residual, partial_trace, partial_transpose,
    proportionality, Label, LegSpace, Residual, TensorOperator, AUX, AUX_PRIME,
};

/// Minimum distance between inhomogeneities, and between any argument of a
/// required inversion and the singular points of `R`.
pub const CONFIG_DISTANCE: f64 = 1e-3;

/// Relative residual thresholds of the individual checks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub inverse_free: f64,
    pub with_inverse: f64,
    pub ybe: f64,
    pub reflection: f64,
    pub commute_periodic: f64,
    pub commute_boundary: f64,
    pub flatness: f64,
    pub interpolation: f64,
    pub special_value: f64,
    pub special_scalar: f64,
    pub sector_scalar: f64,
    pub off_block: f64,
    pub degree: f64,
    pub endgame: f64,
    pub identities: f64,
    /// The negative control must exceed this.
    pub negative_control: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            inverse_free: 1e-12,
            with_inverse: 1e-9,
            ybe: 1e-11,
            reflection: 1e-9,
            commute_periodic: 1e-10,
            commute_boundary: 1e-9,
            flatness: 1e-9,
            interpolation: 1e-8,
            special_value: 1e-9,
            special_scalar: 1e-8,
            sector_scalar: 1e-10,
            off_block: 1e-12,
            degree: 1e-8,
            endgame: 1e-9,
            identities: 1e-12,
            negative_control: 1e-4,
        }
    }
}

/// Parameters of an inhomogeneous chain.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainConfig<T: Real> {
    pub n: usize,
    /// Number of sites `N`.
    pub sites: usize,
    pub q: Complex<T>,
    /// Inhomogeneities `z_1, …, z_N`.
    pub z: Vec<Complex<T>>,
    /// Diagonal of the periodic twist `D`.
    pub twist: Vec<Complex<T>>,
    /// Square root of the shift parameter `p`; fixes the branch of `p^(1/2)`.
    pub sqrt_p: Complex<T>,
    pub tolerances: Tolerances,
    pub seed: u64,
}

impl<T: Real> ChainConfig<T> {
    /// Default parameters: `q = 1.1·e^(0.37i)`, `p = 1.3·e^(0.21i)`,
    /// `z_k = (0.8 + 0.25k)·e^(0.3ik)` and a non-scalar diagonal twist.
    pub fn with_defaults(n: usize, sites: usize) -> Self {
        let polar = |r: f64, phi: f64| Complex::from_polar(lit::<T>(r), lit(phi));
        Self {
            n,
            sites,
            q: polar(1.1, 0.37),
            z: (1..=sites)
                .map(|k| polar(0.8 + 0.25 * k as f64, 0.3 * k as f64))
                .collect(),
            twist: (1..=n)
                .map(|a| polar(1.0 + 0.2 * a as f64, 0.15 * a as f64))
                .collect(),
            sqrt_p: polar(1.3f64.sqrt(), 0.105),
            tolerances: Tolerances::default(),
            seed: 42,
        }
    }

    pub fn p(&self) -> Complex<T> {
        self.sqrt_p * self.sqrt_p
    }

    /// Checks distinctness of `z` and keeps every argument of the inversions
    /// used by the harness away from `q^(±2)`.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.n < 2 {
            return Err(Error::InvalidDimension(self.n));
        }
        if self.z.len() != self.sites {
            return bad(format!(
                "z has {} entries but N = {}",
                self.z.len(),
                self.sites
            ));
        }
        if self.twist.len() != self.n {
            return bad(format!(
                "twist has {} entries but n = {}",
                self.twist.len(),
                self.n
            ));
        }
        let finite_nonzero = |v: Complex<T>| crate::scalar::is_finite(v) && to_f64(v.norm()) > 0.0;
        if let Some(i) = self.z.iter().position(|&v| !finite_nonzero(v)) {
            return bad(format!("z_{} must be a nonzero finite number", i + 1));
        }
        if let Some(a) = self.twist.iter().position(|&v| !finite_nonzero(v)) {
            return bad(format!(
                "twist entry d_{} must be nonzero (D must be invertible)",
                a + 1
            ));
        }
        if !finite_nonzero(self.sqrt_p) {
            return bad("sqrt_p must be a nonzero finite number".into());
        }
        for i in 0..self.sites {
            for j in i + 1..self.sites {
                if to_f64((self.z[i] - self.z[j]).norm()) < CONFIG_DISTANCE {
                    return bad(format!(
                        "z_{} and z_{} must be pairwise distinct (distance at least {CONFIG_DISTANCE})",
                        i + 1,
                        j + 1
                    ));
                }
            }
        }
        let q2 = self.q * self.q;
        let singular = [q2, q2.inv()];
        let one = Complex::<T>::one();
        let check = |arg: Complex<T>, what: String| -> Result<()> {
            if singular
                .iter()
                .any(|&s| to_f64((arg - s).norm()) < CONFIG_DISTANCE)
            {
                return Err(Error::InvalidConfig(format!(
                    "{what} = {} lies within {CONFIG_DISTANCE} of q^2 or q^-2, where R is not invertible",
                    fmt_complex(arg)
                )));
            }
            Ok(())
        };
        let r = crate::scalar::ipow(self.q, self.n as i32);
        for i in 0..self.sites {
            let zi = self.z[i];
            check(zi, format!("z_{}", i + 1))?;
            check(zi.inv(), format!("1/z_{}", i + 1))?;
            for j in 0..self.sites {
                check(zi * self.z[j], format!("z_{} z_{}", i + 1, j + 1))?;
                if i != j {
                    check(zi / self.z[j], format!("z_{}/z_{}", i + 1, j + 1))?;
                }
            }
            for (s, name) in [(-one, "-1"), (r.inv(), "1/r"), (-r.inv(), "-1/r")] {
                check((s * zi).inv(), format!("1/({name} z_{})", i + 1))?;
            }
        }
        Ok(())
    }
}

/// A validated chain: configuration plus the R-matrix datum and leg spaces.
#[derive(Clone, Debug)]
pub struct Chain<T: Real> {
    pub cfg: ChainConfig<T>,
    pub datum: RMatrixDatum<T>,
    pub twist: TensorOperator<T>,
    aux_space: LegSpace,
    chain_space: LegSpace,
}

impl<T: Real> Chain<T> {
    pub fn new(cfg: ChainConfig<T>) -> Result<Self> {
        cfg.validate()?;
        let datum = make_r(cfg.n, cfg.q)?;
        let twist = TensorOperator::diagonal(cfg.n, &cfg.twist)?;
        let aux_space = LegSpace::with_aux(cfg.n, cfg.sites)?;
        let chain_space = LegSpace::chain(cfg.n, cfg.sites)?;
        Ok(Self {
            cfg,
            datum,
            twist,
            aux_space,
            chain_space,
        })
    }

    /// Same chain with new inhomogeneities, re-validated.
    pub fn with_z(&self, z: Vec<Complex<T>>) -> Result<Self> {
        let mut cfg = self.cfg.clone();
        cfg.z = z;
        cfg.validate()?;
        Ok(Self {
            cfg,
            ..self.clone()
        })
    }

    /// Same chain whose R-matrix functions refuse arguments within `margin`
    /// of their singular points.
    pub fn with_margin(&self, margin: f64) -> Self {
        Self {
            datum: self.datum.with_margin(margin),
            ..self.clone()
        }
    }

    pub fn n(&self) -> usize {
        self.cfg.n
    }

    pub fn sites(&self) -> usize {
        self.cfg.sites
    }

    pub fn z(&self) -> &[Complex<T>] {
        &self.cfg.z
    }

    /// Legs `[0, 1, …, N]`.
    pub fn aux_space(&self) -> &LegSpace {
        &self.aux_space
    }

    /// Legs `[1, …, N]`.
    pub fn chain_space(&self) -> &LegSpace {
        &self.chain_space
    }

    fn site(i: usize) -> Label {
        i as Label
    }

    fn r(&self, x: Complex<T>) -> Result<TensorOperator<T>> {
        self.datum.r_fn.eval(x)
    }

    fn r_inv(&self, x: Complex<T>) -> Result<TensorOperator<T>> {
        self.datum.r_fn.eval_inverse(x)
    }

    /// `U_0(x) = R_0N(x/z_N) ⋯ R_01(x/z_1)` on legs `[0, 1, …, N]`.
    pub fn monodromy_periodic(&self, x: Complex<T>) -> Result<TensorOperator<T>> {
        let mut acc = TensorOperator::identity(self.aux_space.clone());
        for i in (1..=self.sites()).rev() {
            acc = acc.right_apply(&self.r(x / self.z()[i - 1])?, &[AUX, Self::site(i)])?;
        }
        Ok(acc)
    }

    /// `T(x) = Tr_0 D_0 U_0(x)`.
    pub fn transfer_periodic(&self, x: Complex<T>) -> Result<TensorOperator<T>> {
        let dm = self
            .monodromy_periodic(x)?
            .left_apply(&self.twist, &[AUX])?;
        partial_trace(&dm, AUX)
    }

    /// `𝒰_0(x) = R_01(1/(x z_1))⁻¹ ⋯ R_0N(1/(x z_N))⁻¹ K⁻_0(x) R_0N(x/z_N) ⋯ R_01(x/z_1)`.
    pub fn boundary_monodromy(
        &self,
        kminus: &MatrixFunction<T>,
        x: Complex<T>,
    ) -> Result<TensorOperator<T>> {
        let mut acc = TensorOperator::identity(self.aux_space.clone());
        for i in 1..=self.sites() {
            acc = acc.right_apply(
                &self.r_inv((x * self.z()[i - 1]).inv())?,
                &[AUX, Self::site(i)],
            )?;
        }
        acc = acc.right_apply(&kminus.eval(x)?, &[AUX])?;
        for i in (1..=self.sites()).rev() {
            acc = acc.right_apply(&self.r(x / self.z()[i - 1])?, &[AUX, Self::site(i)])?;
        }
        Ok(acc)
    }

    /// `𝒰⁻(x) = U(1/x)⁻¹ K⁻_0(x) U(x)`, inverting the full monodromy.
    pub fn boundary_monodromy_folded(
        &self,
        kminus: &MatrixFunction<T>,
        x: Complex<T>,
    ) -> Result<TensorOperator<T>> {
        let u_inv = self.monodromy_periodic(x.inv())?.inverse()?;
        u_inv
            .right_apply(&kminus.eval(x)?, &[AUX])?
            .dot(&self.monodromy_periodic(x)?)
    }

    /// `𝒯(x) = Tr_0 K′_0(x) 𝒰_0(x)`.
    pub fn transfer_boundary(
        &self,
        kprime: &MatrixFunction<T>,
        kminus: &MatrixFunction<T>,
        x: Complex<T>,
    ) -> Result<TensorOperator<T>> {
        let u = self
            .boundary_monodromy(kminus, x)?
            .left_apply(&kprime.eval(x)?, &[AUX])?;
        partial_trace(&u, AUX)
    }

    /// `𝒯(x) = Tr_0 K′_0(x) U(1/x)⁻¹ K⁻_0(x) U(x)`.
    pub fn transfer_boundary_folded(
        &self,
        kprime: &MatrixFunction<T>,
        kminus: &MatrixFunction<T>,
        x: Complex<T>,
    ) -> Result<TensorOperator<T>> {
        let u = self
            .boundary_monodromy_folded(kminus, x)?
            .left_apply(&kprime.eval(x)?, &[AUX])?;
        partial_trace(&u, AUX)
    }

    /// `𝒯̃(x) = Tr_0 K′_0(x) R_10(x z_1) ⋯ R_N0(x z_N) K⁻_0(x) R_0N(x/z_N) ⋯ R_01(x/z_1)`.
    pub fn transfer_boundary_modified(
        &self,
        kprime: &MatrixFunction<T>,
        kminus: &MatrixFunction<T>,
        x: Complex<T>,
    ) -> Result<TensorOperator<T>> {
        let mut acc = TensorOperator::identity(self.aux_space.clone())
            .right_apply(&kprime.eval(x)?, &[AUX])?;
        for i in 1..=self.sites() {
            acc = acc.right_apply(&self.r(x * self.z()[i - 1])?, &[Self::site(i), AUX])?;
        }
        acc = acc.right_apply(&kminus.eval(x)?, &[AUX])?;
        for i in (1..=self.sites()).rev() {
            acc = acc.right_apply(&self.r(x / self.z()[i - 1])?, &[AUX, Self::site(i)])?;
        }
        partial_trace(&acc, AUX)
    }

    /// `U^±` for the sub-chain of sites `sites` (in increasing order):
    /// `R_0,s_last(x/z) ⋯ R_0,s_first(x/z)` on `[0] ++ sites`.
    pub fn monodromy_on(&self, sites: &[usize], x: Complex<T>) -> Result<TensorOperator<T>> {
        let mut legs = vec![AUX];
        legs.extend(sites.iter().map(|&i| Self::site(i)));
        let mut acc = TensorOperator::identity(LegSpace::new(self.n(), legs)?);
        for &i in sites.iter().rev() {
            acc = acc.right_apply(&self.r(x / self.z()[i - 1])?, &[AUX, Self::site(i)])?;
        }
        Ok(acc)
    }

    /// `𝒯` via `Tr_0 𝒰⁺_01(x) 𝒰⁻_02(x)`, with `W⁺` the first `split` sites
    /// and `W⁻` the rest, both boundary monodromies built by folding.
    pub fn transfer_boundary_split(
        &self,
        kprime: &MatrixFunction<T>,
        kminus: &MatrixFunction<T>,
        split: usize,
        x: Complex<T>,
    ) -> Result<TensorOperator<T>> {
        if split > self.sites() {
            return Err(Error::InvalidParameter(format!(
                "split {split} exceeds N = {}",
                self.sites()
            )));
        }
        let plus: Vec<usize> = (1..=split).collect();
        let minus: Vec<usize> = (split + 1..=self.sites()).collect();
        let up = fold_plus(
            &self.monodromy_on(&plus, x)?,
            &self.monodromy_on(&plus, x.inv())?,
            &kprime.eval(x)?,
        )?;
        let um = fold_minus(
            &self.monodromy_on(&minus, x)?,
            &self.monodromy_on(&minus, x.inv())?,
            &kminus.eval(x)?,
        )?;
        transfer_general(&up, &um)
    }
}

/// `𝒰⁺_01(x) = ((U⁺(1/x)⁻¹)^{t_0} K′_0(x)^t U⁺(x)^{t_0})^{t_0}` from
/// `U⁺(x)`, `U⁺(1/x)` on `[0, W⁺]` and the one-leg `K′(x)`.
pub fn fold_plus<T: Real>(
    u_x: &TensorOperator<T>,
    u_inv_x: &TensorOperator<T>,
    kprime: &TensorOperator<T>,
) -> Result<TensorOperator<T>> {
    let a = partial_transpose(&u_inv_x.inverse()?, AUX)?;
    let b = partial_transpose(u_x, AUX)?;
    partial_transpose(&a.right_apply(&kprime.transpose(), &[AUX])?.dot(&b)?, AUX)
}

/// `𝒰⁻_01(x) = U⁻(1/x)⁻¹ K⁻_0(x) U⁻(x)`.
pub fn fold_minus<T: Real>(
    u_x: &TensorOperator<T>,
    u_inv_x: &TensorOperator<T>,
    kminus: &TensorOperator<T>,
) -> Result<TensorOperator<T>> {
    u_inv_x.inverse()?.right_apply(kminus, &[AUX])?.dot(u_x)
}

/// `Tr_0 𝒰⁺_{0,W⁺} 𝒰⁻_{0,W⁻}` for operators on `[0] ++ W⁺` and `[0] ++ W⁻`
/// with disjoint `W±` labels; the result lives on `W⁺ ++ W⁻`.
pub fn transfer_general<T: Real>(
    uplus: &TensorOperator<T>,
    uminus: &TensorOperator<T>,
) -> Result<TensorOperator<T>> {
    let (lp, lm) = (uplus.space().legs(), uminus.space().legs());
    if lp.first() != Some(&AUX) || lm.first() != Some(&AUX) {
        return Err(Error::InvalidParameter(
            "boundary monodromies must list the auxiliary leg first".into(),
        ));
    }
    let mut legs = lp.to_vec();
    legs.extend_from_slice(&lm[1..]);
    let ambient = LegSpace::new(uplus.n(), legs)?;
    let prod = embed(uplus, lp, &ambient)?.dot(&embed(uminus, lm, &ambient)?)?;
    partial_trace(&prod, AUX)
}

fn with_prime(op: &TensorOperator<impl Real>) -> Vec<Label> {
    let mut legs = op.space().legs().to_vec();
    legs[0] = AUX_PRIME;
    legs
}

fn doubled_space<T: Real>(u: &TensorOperator<T>) -> Result<LegSpace> {
    let mut legs = vec![AUX, AUX_PRIME];
    legs.extend_from_slice(&u.space().legs()[1..]);
    LegSpace::new(u.n(), legs)
}

/// Embeds an operator on `[0] ++ W` into `[0, 0′] ++ W`, acting on `0` or `0′`.
fn lift<T: Real>(
    u: &TensorOperator<T>,
    ambient: &LegSpace,
    primed: bool,
) -> Result<TensorOperator<T>> {
    let legs = if primed {
        with_prime(u)
    } else {
        u.space().legs().to_vec()
    };
    let relabelled = u.relabel(legs.clone())?;
    embed(&relabelled, &legs, ambient)
}

/// `R_00′(x/y) U_0(x) U_0′(y) = U_0′(y) U_0(x) R_00′(x/y)` for a monodromy
/// function on `[0] ++ W`.
pub fn check_global_ybe<T: Real>(
    d: &RMatrixDatum<T>,
    u: impl Fn(Complex<T>) -> Result<TensorOperator<T>>,
    x: Complex<T>,
    y: Complex<T>,
) -> Result<Residual> {
    let (ux, uy) = (u(x)?, u(y)?);
    let amb = doubled_space(&ux)?;
    let (a, b) = (lift(&ux, &amb, false)?, lift(&uy, &amb, true)?);
    let rxy = d.r_fn.eval(x / y)?;
    let lhs = a.left_apply(&rxy, &[AUX, AUX_PRIME])?.dot(&b)?;
    let rhs = b.dot(&a)?.right_apply(&rxy, &[AUX, AUX_PRIME])?;
    equality_residual(&lhs, &rhs)
}

/// `R_0′0(x/y) 𝒰_0(x) R_00′(xy) 𝒰_0′(y) = 𝒰_0′(y) R_0′0(xy) 𝒰_0(x) R_00′(x/y)`.
pub fn check_global_rre<T: Real>(
    d: &RMatrixDatum<T>,
    u: impl Fn(Complex<T>) -> Result<TensorOperator<T>>,
    x: Complex<T>,
    y: Complex<T>,
) -> Result<Residual> {
    let (ux, uy) = (u(x)?, u(y)?);
    let amb = doubled_space(&ux)?;
    let (a, b) = (lift(&ux, &amb, false)?, lift(&uy, &amb, true)?);
    let (ratio, prod) = (d.r_fn.eval(x / y)?, d.r_fn.eval(x * y)?);
    let lhs = a
        .left_apply(&ratio, &[AUX_PRIME, AUX])?
        .right_apply(&prod, &[AUX, AUX_PRIME])?
        .dot(&b)?;
    let rhs = b
        .right_apply(&prod, &[AUX_PRIME, AUX])?
        .dot(&a)?
        .right_apply(&ratio, &[AUX, AUX_PRIME])?;
    equality_residual(&lhs, &rhs)
}

/// `R_0′0(x/y)^{-t} 𝒰⁺_0(x)^{t_0} R̃_00′(xy)^t 𝒰⁺_0′(y)^{t_0′}
///  = 𝒰⁺_0′(y)^{t_0′} R̃_0′0(xy)^t 𝒰⁺_0(x)^{t_0} R_00′(x/y)^{-t}`.
pub fn check_global_dre<T: Real>(
    d: &RMatrixDatum<T>,
    u: impl Fn(Complex<T>) -> Result<TensorOperator<T>>,
    x: Complex<T>,
    y: Complex<T>,
) -> Result<Residual> {
    let (ux, uy) = (u(x)?, u(y)?);
    let amb = doubled_space(&ux)?;
    let a = partial_transpose(&lift(&ux, &amb, false)?, AUX)?;
    let b = partial_transpose(&lift(&uy, &amb, true)?, AUX_PRIME)?;
    let ratio = d.r_fn.eval_inverse(x / y)?.transpose();
    let rt = d.rtilde.eval(x * y)?.transpose();
    let lhs = a
        .left_apply(&ratio, &[AUX_PRIME, AUX])?
        .right_apply(&rt, &[AUX, AUX_PRIME])?
        .dot(&b)?;
    let rhs = b
        .right_apply(&rt, &[AUX_PRIME, AUX])?
        .dot(&a)?
        .right_apply(&ratio, &[AUX, AUX_PRIME])?;
    equality_residual(&lhs, &rhs)
}

/// Compares the fitted scalars `𝒯̃ = λ 𝒯` at `(x, z)` and at
/// `(c x, z / c)`, which share every product `x z_i`.
pub fn modified_scalar_product_dependence<T: Real>(
    chain: &Chain<T>,
    kprime: &MatrixFunction<T>,
    kminus: &MatrixFunction<T>,
    x: Complex<T>,
    c: Complex<T>,
) -> Result<Residual> {
    let fit = |ch: &Chain<T>, x| -> Result<Complex<f64>> {
        let r = proportionality(
            &ch.transfer_boundary_modified(kprime, kminus, x)?,
            &ch.transfer_boundary(kprime, kminus, x)?,
        )?;
        Ok(r.scalar.expect("proportionality reports a scalar"))
    };
    let other = chain.with_z(chain.z().iter().map(|&z| z / c).collect())?;
    let (a, b) = (fit(chain, x)?, fit(&other, c * x)?);
    Ok(Residual::new((a - b).norm(), a.norm().max(b.norm())).with_scalar(a))
}

/// `[X(x), X(y)]` for an operator-valued function.
pub fn commutator_at<T: Real>(
    f: impl Fn(Complex<T>) -> Result<TensorOperator<T>>,
    x: Complex<T>,
    y: Complex<T>,
) -> Result<Residual> {
    commutator_residual(&f(x)?, &f(y)?)
}
