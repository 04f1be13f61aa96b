//! Truncated even-degree form algebra, Â/Todd/Chern series and their delocalized versions.
//!
//! A form is a polynomial in commuting degree-2 generators, truncated above total
//! degree `cap` (half the real dimension). On a component of a model there is one
//! generator `ω = dA/area`, so `∫ω = 1` over the covering component.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{frac, int, rat, Rat};
use crate::scalar::Scalar;
use crate::sector::{ComponentGeometry, SectorComponent};

#[derive(Clone, Debug, PartialEq)]
pub struct TruncForm<S> {
    ngen: usize,
    cap: u32,
    terms: BTreeMap<Vec<u32>, S>,
}

impl<S: Scalar> TruncForm<S> {
    pub fn zero(ngen: usize, cap: u32) -> Self {
        TruncForm { ngen, cap, terms: BTreeMap::new() }
    }

    pub fn constant(ngen: usize, cap: u32, c: S) -> Self {
        let mut f = Self::zero(ngen, cap);
        f.insert(vec![0; ngen], c);
        f
    }

    pub fn one(ngen: usize, cap: u32) -> Self {
        Self::constant(ngen, cap, S::one())
    }

    /// `c·x_i`, already zero when `cap = 0`.
    pub fn generator(ngen: usize, cap: u32, i: usize, c: S) -> Self {
        assert!(i < ngen, "generator index out of range");
        let mut f = Self::zero(ngen, cap);
        let mut e = vec![0; ngen];
        e[i] = 1;
        f.insert(e, c);
        f
    }

    pub fn ngen(&self) -> usize {
        self.ngen
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    fn insert(&mut self, exps: Vec<u32>, c: S) {
        if exps.iter().sum::<u32>() > self.cap {
            return;
        }
        let v = match self.terms.remove(&exps) {
            Some(old) => old + c,
            None => c,
        };
        if !v.is_zero() {
            self.terms.insert(exps, v);
        }
    }

    fn same_shape(&self, other: &Self) {
        assert!(self.ngen == other.ngen && self.cap == other.cap, "forms bound to different components");
    }

    pub fn coefficient(&self, exps: &[u32]) -> S {
        self.terms.get(exps).cloned().unwrap_or_else(S::zero)
    }

    pub fn constant_term(&self) -> S {
        self.coefficient(&vec![0; self.ngen])
    }

    /// Coefficients of total degree `d`.
    pub fn homogeneous(&self, d: u32) -> Vec<(Vec<u32>, S)> {
        self.terms.iter().filter(|(e, _)| e.iter().sum::<u32>() == d).map(|(e, c)| (e.clone(), c.clone())).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        self.same_shape(other);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.insert(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-S::one()))
    }

    pub fn scale(&self, c: &S) -> Self {
        let mut out = Self::zero(self.ngen, self.cap);
        for (e, v) in &self.terms {
            out.insert(e.clone(), v.clone() * c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.same_shape(other);
        let mut out = Self::zero(self.ngen, self.cap);
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                let e: Vec<u32> = a.iter().zip(b).map(|(p, q)| p + q).collect();
                out.insert(e, x.clone() * y.clone());
            }
        }
        out
    }

    /// `Σ_k a_k u^k` for a form `u` with zero constant term.
    pub fn apply_series(&self, coeffs: &[BigRational]) -> Self {
        assert!(self.constant_term().is_zero(), "series applied to a form with nonzero constant term");
        let mut out = Self::zero(self.ngen, self.cap);
        let mut power = Self::one(self.ngen, self.cap);
        for (k, a) in coeffs.iter().enumerate() {
            if k as u32 > self.cap || power.is_zero() {
                break;
            }
            out = out.add(&power.scale(&S::from_big(a)));
            power = power.mul(self);
        }
        out
    }

    /// `e^u` for nilpotent `u`.
    pub fn exp(&self) -> Self {
        self.apply_series(&exp_series(self.cap as usize))
    }

    /// Inverse of `f₀ + u` with `f₀` invertible.
    pub fn inv(&self) -> Option<Self> {
        let c0 = self.constant_term();
        let c0inv = c0.inv()?;
        let u = self.sub(&Self::constant(self.ngen, self.cap, c0)).scale(&c0inv);
        let geometric: Vec<BigRational> = (0..=self.cap).map(|k| BigRational::from_integer(BigInt::from(if k % 2 == 0 { 1 } else { -1 }))).collect();
        Some(u.apply_series(&geometric).scale(&c0inv))
    }
}

fn exp_series(order: usize) -> Vec<BigRational> {
    let mut out = vec![BigRational::one()];
    for k in 1..=order {
        let prev = out[k - 1].clone();
        out.push(prev / BigRational::from_integer(BigInt::from(k)));
    }
    out
}

/// Reciprocal of a power series with invertible constant term.
fn series_reciprocal(a: &[BigRational]) -> Vec<BigRational> {
    let mut b = vec![BigRational::one() / a[0].clone()];
    for n in 1..a.len() {
        let s = (1..=n).fold(BigRational::zero(), |acc, k| acc + a[k].clone() * b[n - k].clone());
        b.push(-s / a[0].clone());
    }
    b
}

fn factorial(n: usize) -> BigRational {
    BigRational::from_integer((1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k)))
}

/// Coefficients of `(x/2)/sinh(x/2)` up to `x^order`.
pub fn a_hat_series(order: usize) -> Vec<BigRational> {
    // sinh(x/2)/(x/2) = Σ x^{2k} / (4^k (2k+1)!)
    let a: Vec<BigRational> = (0..=order)
        .map(|n| {
            if n % 2 == 1 {
                BigRational::zero()
            } else {
                BigRational::one() / (factorial(n + 1) * BigRational::from_integer(BigInt::from(2).pow(n as u32)))
            }
        })
        .collect();
    series_reciprocal(&a)
}

/// Coefficients of `x/(1 − e^{−x})` up to `x^order`.
pub fn todd_series(order: usize) -> Vec<BigRational> {
    // (1 − e^{−x})/x = Σ (−1)^n x^n/(n+1)!
    let a: Vec<BigRational> = (0..=order)
        .map(|n| {
            let s = BigRational::one() / factorial(n + 1);
            if n % 2 == 0 {
                s
            } else {
                -s
            }
        })
        .collect();
    series_reciprocal(&a)
}

pub fn a_hat_of_roots<S: Scalar>(roots: &[TruncForm<S>]) -> TruncForm<S> {
    let (ngen, cap) = (roots[0].ngen, roots[0].cap);
    let s = a_hat_series(cap as usize);
    roots.iter().fold(TruncForm::one(ngen, cap), |acc, x| acc.mul(&x.apply_series(&s)))
}

pub fn todd_of_roots<S: Scalar>(roots: &[TruncForm<S>]) -> TruncForm<S> {
    let (ngen, cap) = (roots[0].ngen, roots[0].cap);
    let s = todd_series(cap as usize);
    roots.iter().fold(TruncForm::one(ngen, cap), |acc, x| acc.mul(&x.apply_series(&s)))
}

/// Curvature and fiber data of one sector component, in units of `ω = dA/area`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComponentCurvature {
    /// real dimension, 0 or 2
    pub dimension: u32,
    /// `∫ c₁(T)` over the covering component
    pub tangent_total: Rat,
    /// `∫ c₁(L)` over the covering component
    pub bundle_total: Rat,
    pub area: f64,
    /// turn φ of Φ = dg⁻¹ on the normal line
    pub normal_turn: Option<Rat>,
    /// turn θ of dg on the tangent line at an isolated point (0 on full components)
    pub tangent_turn: Rat,
    /// turn β of g on the fiber of `L`
    pub fiber_turn: Rat,
    pub weight: Rat,
}

impl ComponentCurvature {
    pub fn from_component(c: &SectorComponent) -> Self {
        match &c.geometry {
            ComponentGeometry::Isolated { point, .. } => ComponentCurvature {
                dimension: 0,
                tangent_total: int(0),
                bundle_total: int(0),
                area: 0.0,
                normal_turn: c.normal_turn,
                tangent_turn: point.tangent_turn,
                fiber_turn: point.fiber_turn,
                weight: c.weight(),
            },
            ComponentGeometry::Full { dimension, euler, twist, area } => ComponentCurvature {
                dimension: *dimension,
                tangent_total: int(*euler),
                bundle_total: int(*twist),
                area: *area,
                normal_turn: None,
                tangent_turn: int(0),
                fiber_turn: int(0),
                weight: c.weight(),
            },
        }
    }

    pub fn cap(&self) -> u32 {
        self.dimension / 2
    }

    /// Gaussian curvature scalar `2π·χ/area` (zero for flat models).
    pub fn tangent_curvature_scalar(&self) -> f64 {
        if self.dimension == 0 {
            0.0
        } else {
            2.0 * std::f64::consts::PI * crate::rational::to_f64(&self.tangent_total) / self.area
        }
    }

    pub fn tangent_root<S: Scalar>(&self) -> TruncForm<S> {
        TruncForm::generator(1, self.cap(), 0, S::from_rat(self.tangent_total))
    }

    pub fn bundle_root<S: Scalar>(&self) -> TruncForm<S> {
        TruncForm::generator(1, self.cap(), 0, S::from_rat(self.bundle_total))
    }

    /// Normal curvature root; zero on every cataloged component.
    pub fn normal_root<S: Scalar>(&self) -> TruncForm<S> {
        TruncForm::zero(1, self.cap())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Convention {
    AHat,
    Todd,
}

pub fn a_hat_form<S: Scalar>(curv: &ComponentCurvature) -> TruncForm<S> {
    a_hat_of_roots(&[curv.tangent_root()])
}

pub fn todd_form<S: Scalar>(curv: &ComponentCurvature) -> TruncForm<S> {
    todd_of_roots(&[curv.tangent_root()])
}

/// `ch` of a sum of line bundles with the given first Chern forms.
pub fn chern_char<S: Scalar>(line_roots: &[TruncForm<S>]) -> TruncForm<S> {
    let (ngen, cap) = (line_roots[0].ngen, line_roots[0].cap);
    line_roots.iter().fold(TruncForm::zero(ngen, cap), |acc, x| acc.add(&x.exp()))
}

/// `√det(1 − Φ⁻¹e^{x})` on one normal line: `−i(μe^{x/2} − μ̄e^{−x/2})`, `μ = e^{iπφ}`.
fn a_hat_divisor<S: Scalar>(phi: Rat, x: &TruncForm<S>) -> TruncForm<S> {
    let mu = S::root_of_unity(phi / int(2));
    let half = x.scale(&S::from_rat(rat(1, 2)));
    let plus = half.exp().scale(&mu);
    let minus = half.scale(&-S::one()).exp().scale(&mu.conj());
    plus.sub(&minus).scale(&-S::i())
}

/// `det(1 − Φ⁻¹e^{x})` read on `T^{1,0}`: `1 − e^{−2πiφ}e^{−x}`.
fn todd_divisor<S: Scalar>(phi: Rat, x: &TruncForm<S>) -> TruncForm<S> {
    let one = TruncForm::one(x.ngen, x.cap);
    one.sub(&x.scale(&-S::one()).exp().scale(&S::root_of_unity(-phi)))
}

/// Reciprocal divisor for normal turn `phi` and normal root `x`.
pub fn deloc_factor_series<S: Scalar>(phi: Rat, x: &TruncForm<S>, convention: Convention) -> Result<TruncForm<S>> {
    if frac(phi).is_zero() {
        return Err(Error::SingularDivisor("Φ acts trivially on a nonzero normal bundle".into()));
    }
    let d = match convention {
        Convention::AHat => a_hat_divisor(phi, x),
        Convention::Todd => todd_divisor(phi, x),
    };
    d.inv().ok_or_else(|| Error::SingularDivisor("normal divisor is not invertible".into()))
}

pub fn deloc_factor<S: Scalar>(curv: &ComponentCurvature, convention: Convention) -> Result<TruncForm<S>> {
    match curv.normal_turn {
        None => Ok(TruncForm::one(1, curv.cap())),
        Some(phi) => deloc_factor_series(phi, &curv.normal_root(), convention),
    }
}

/// Supertraced `Σ_θ e^{2πiθ}ch(E_θ)` on `Λ^{0,*}⊗L`: `E₊` has turn β, `E₋ = Λ^{0,1}⊗L` has turn β − θ.
pub fn deloc_chern<S: Scalar>(curv: &ComponentCurvature) -> TruncForm<S> {
    let xl = curv.bundle_root::<S>();
    let even = xl.exp().scale(&S::root_of_unity(curv.fiber_turn));
    let odd = xl.add(&curv.tangent_root()).exp().scale(&S::root_of_unity(curv.fiber_turn - curv.tangent_turn));
    even.sub(&odd)
}

/// Spin^c twisting `e^{x_T/2}·e^{2πiβ}e^{x_L}·Π_N (1 − e^{2πiφ}e^{x_N})/B(x_N)`.
pub fn spinc_numerator<S: Scalar>(curv: &ComponentCurvature) -> Result<TruncForm<S>> {
    let xt = curv.tangent_root::<S>();
    let base = xt
        .scale(&S::from_rat(rat(1, 2)))
        .exp()
        .mul(&curv.bundle_root::<S>().exp())
        .scale(&S::root_of_unity(curv.fiber_turn));
    match curv.normal_turn {
        None => Ok(base),
        Some(phi) => {
            let xn = curv.normal_root::<S>();
            let num = TruncForm::one(xn.ngen, xn.cap).sub(&xn.exp().scale(&S::root_of_unity(phi)));
            let inv_b = deloc_factor_series(phi, &xn, Convention::AHat)?;
            Ok(base.mul(&num).mul(&inv_b))
        }
    }
}

/// Full localized integrand on a component.
pub fn integrand<S: Scalar>(curv: &ComponentCurvature, convention: Convention) -> Result<TruncForm<S>> {
    match convention {
        Convention::Todd => {
            let ch = curv.bundle_root::<S>().exp().scale(&S::root_of_unity(curv.fiber_turn));
            Ok(todd_form(curv).mul(&ch).mul(&deloc_factor(curv, Convention::Todd)?))
        }
        Convention::AHat => Ok(a_hat_form(curv).mul(&spinc_numerator(curv)?).mul(&deloc_factor(curv, Convention::AHat)?)),
    }
}

/// Top-degree coefficient (times `∫ω = 1`) or the degree-0 value, times the orbifold weight.
pub fn orbifold_integrate<S: Scalar>(form: &TruncForm<S>, weight: Rat) -> S {
    let top: S = form.homogeneous(form.cap).into_iter().fold(S::zero(), |acc, (_, c)| acc + c);
    top * S::from_rat(weight)
}
