//! Exact arithmetic in cyclotomic fields ℚ(ζ_n).
//!
//! Every value the index engine produces in exact mode is a ℚ-linear combination of roots
//! of unity, so it lives in some ℚ(ζ_n). An element stores its conductor `n` and its
//! coordinates in the power basis `1, ζ, …, ζ^{φ(n)-1}`, reduced modulo the cyclotomic
//! polynomial Φ_n. Binary operations lift both operands to ℚ(ζ_lcm) first.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use once_cell::sync::Lazy;

use crate::rational::{big_to_f64, lcm_u32, Rat};

static PHI_CACHE: Lazy<Mutex<HashMap<u32, Arc<Vec<i64>>>>> = Lazy::new(|| Mutex::new(HashMap::new()));

/// Coefficients of Φ_n, lowest degree first (monic).
pub fn cyclotomic_polynomial(n: u32) -> Arc<Vec<i64>> {
    assert!(n >= 1, "conductor must be positive");
    if let Some(p) = PHI_CACHE.lock().unwrap().get(&n) {
        return p.clone();
    }
    // x^n - 1 divided by Φ_d for every proper divisor d
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in 1..n {
        if n.is_multiple_of(d) {
            let div = cyclotomic_polynomial(d);
            num = div_monic_exact(&num, &div);
        }
    }
    let arc = Arc::new(num);
    PHI_CACHE.lock().unwrap().insert(n, arc.clone());
    arc
}

fn div_monic_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dn = den.len() - 1;
    let qn = rem.len() - 1 - dn;
    let mut q = vec![0i64; qn + 1];
    for k in (0..=qn).rev() {
        let c = rem[k + dn];
        q[k] = c;
        if c != 0 {
            for (j, &dj) in den.iter().enumerate() {
                rem[k + j] -= c * dj;
            }
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    q
}

pub fn euler_phi(n: u32) -> usize {
    cyclotomic_polynomial(n).len() - 1
}

/// An element of ℚ(ζ_n).
#[derive(Clone)]
pub struct Cyclotomic {
    n: u32,
    coeffs: Vec<BigRational>,
}

fn reduce(mut poly: Vec<BigRational>, n: u32) -> Vec<BigRational> {
    let phi = cyclotomic_polynomial(n);
    let d = phi.len() - 1;
    if poly.len() > d {
        for k in (d..poly.len()).rev() {
            let c = std::mem::take(&mut poly[k]);
            if c.is_zero() {
                continue;
            }
            // x^k = x^{k-d} * x^d and x^d ≡ -(Φ_n - x^d)
            for (j, &pj) in phi.iter().enumerate().take(d) {
                if pj != 0 {
                    poly[k - d + j] -= &c * BigRational::from_integer(BigInt::from(pj));
                }
            }
        }
        poly.truncate(d);
    }
    poly.resize(d, BigRational::zero());
    poly
}

impl Cyclotomic {
    pub fn zero() -> Self {
        Cyclotomic { n: 1, coeffs: vec![BigRational::zero()] }
    }

    pub fn one() -> Self {
        Self::from_big(BigRational::one())
    }

    pub fn from_big(r: BigRational) -> Self {
        Cyclotomic { n: 1, coeffs: vec![r] }
    }

    pub fn from_rat(r: Rat) -> Self {
        Self::from_big(crate::rational::to_big(&r))
    }

    pub fn from_int(v: i64) -> Self {
        Self::from_big(BigRational::from_integer(BigInt::from(v)))
    }

    /// e^{2πi·turn}.
    pub fn root_of_unity(turn: Rat) -> Self {
        let t = crate::rational::frac(turn);
        let q = *t.denom() as u32;
        let p = *t.numer() as usize;
        let mut poly = vec![BigRational::zero(); p + 1];
        poly[p] = BigRational::one();
        Cyclotomic { n: q, coeffs: reduce(poly, q) }
    }

    pub fn i() -> Self {
        Self::root_of_unity(Rat::new(1, 4))
    }

    pub fn conductor(&self) -> u32 {
        self.n
    }

    pub fn coefficients(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Re-express in ℚ(ζ_m); `m` must be a multiple of the current conductor.
    pub fn lift(&self, m: u32) -> Self {
        assert!(m.is_multiple_of(self.n), "cannot lift ℚ(ζ_{}) into ℚ(ζ_{m})", self.n);
        if m == self.n {
            return self.clone();
        }
        let step = (m / self.n) as usize;
        let mut poly = vec![BigRational::zero(); step * (self.coeffs.len() - 1) + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            poly[k * step] = c.clone();
        }
        Cyclotomic { n: m, coeffs: reduce(poly, m) }
    }

    fn aligned(&self, other: &Self) -> (Self, Self) {
        let m = lcm_u32(self.n, other.n);
        (self.lift(m), other.lift(m))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Complex conjugation (the Galois automorphism ζ ↦ ζ^{-1}).
    pub fn conj(&self) -> Self {
        let n = self.n as usize;
        let mut poly = vec![BigRational::zero(); n.max(1)];
        for (k, c) in self.coeffs.iter().enumerate() {
            poly[(n - k % n) % n] += c;
        }
        Cyclotomic { n: self.n, coeffs: reduce(poly, self.n) }
    }

    pub fn is_real(&self) -> bool {
        *self == self.conj()
    }

    /// The value as a rational number, when it is one.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.coeffs.iter().skip(1).all(|c| c.is_zero()) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    /// The value as `a + b·i` with rational `a, b`, when it lies in ℚ(i).
    pub fn as_gaussian(&self) -> Option<(BigRational, BigRational)> {
        if let Some(r) = self.as_rational() {
            return Some((r, BigRational::zero()));
        }
        let m = lcm_u32(self.n, 4);
        let v = self.lift(m);
        let iv = Self::i().lift(m);
        let j = (1..iv.coeffs.len()).find(|&j| !iv.coeffs[j].is_zero())?;
        let b = &v.coeffs[j] / &iv.coeffs[j];
        let a = &v.coeffs[0] - &b * &iv.coeffs[0];
        let candidate = Self::from_big(a.clone()) + Self::from_big(b.clone()) * Self::i();
        (candidate == *self).then_some((a, b))
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let phi: Vec<BigRational> = cyclotomic_polynomial(self.n)
            .iter()
            .map(|&c| BigRational::from_integer(BigInt::from(c)))
            .collect();
        // extended Euclid in ℚ[x]: s·a + t·Φ = g with g a nonzero constant
        let mut r0 = trim(phi);
        let mut r1 = trim(self.coeffs.clone());
        let mut s0: Vec<BigRational> = vec![BigRational::zero()];
        let mut s1: Vec<BigRational> = vec![BigRational::one()];
        while r1.len() > 1 || !r1[0].is_zero() {
            let (q, r) = poly_divmod(&r0, &r1);
            let s2 = trim(poly_sub(&s0, &poly_mul(&q, &s1)));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s2;
        }
        // r0 is the gcd; Φ_n irreducible means it is constant
        debug_assert_eq!(r0.len(), 1);
        let g = r0[0].clone();
        let s: Vec<BigRational> = s0.into_iter().map(|c| c / &g).collect();
        Some(Cyclotomic { n: self.n, coeffs: reduce(s, self.n) })
    }

    pub fn to_c64(&self) -> Complex64 {
        let n = self.n as f64;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| {
                let a = std::f64::consts::TAU * k as f64 / n;
                Complex64::new(a.cos(), a.sin()) * big_to_f64(c)
            })
            .sum()
    }

    /// Exact textual form: `"p/q"`, `"a+bi"` or the power-basis expansion.
    pub fn exact_string(&self) -> String {
        let fmt_b = |r: &BigRational| {
            if r.denom().is_one() {
                r.numer().to_string()
            } else {
                format!("{}/{}", r.numer(), r.denom())
            }
        };
        if let Some(r) = self.as_rational() {
            return fmt_b(&r);
        }
        if let Some((a, b)) = self.as_gaussian() {
            let sign = if b.is_negative() { "-" } else { "+" };
            return format!("{}{}{}i", fmt_b(&a), sign, fmt_b(&b.abs()));
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| format!("({})z{}^{}", fmt_b(c), self.n, k))
            .collect();
        terms.join(" + ")
    }
}

fn trim(mut p: Vec<BigRational>) -> Vec<BigRational> {
    while p.len() > 1 && p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    if p.is_empty() {
        p.push(BigRational::zero());
    }
    p
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

fn poly_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|k| {
            let x = a.get(k).cloned().unwrap_or_else(BigRational::zero);
            let y = b.get(k).cloned().unwrap_or_else(BigRational::zero);
            x - y
        })
        .collect()
}

fn poly_divmod(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let b = trim(b.to_vec());
    let mut r = trim(a.to_vec());
    if r.len() < b.len() {
        return (vec![BigRational::zero()], r);
    }
    let lead = b.last().unwrap().clone();
    let mut q = vec![BigRational::zero(); r.len() - b.len() + 1];
    while r.len() >= b.len() && !(r.len() == 1 && r[0].is_zero()) {
        let shift = r.len() - b.len();
        let c = r.last().unwrap() / &lead;
        for (j, bj) in b.iter().enumerate() {
            r[shift + j] -= &c * bj;
        }
        q[shift] = c;
        r.pop();
        r = trim(r);
        if shift == 0 {
            break;
        }
    }
    (trim(q), r)
}

impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = self.aligned(other);
        a.coeffs == b.coeffs
    }
}

impl Eq for Cyclotomic {}

impl fmt::Debug for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.exact_string())
    }
}

impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.exact_string())
    }
}

impl Add for Cyclotomic {
    type Output = Cyclotomic;
    fn add(self, rhs: Self) -> Self {
        let (mut a, b) = self.aligned(&rhs);
        for (x, y) in a.coeffs.iter_mut().zip(b.coeffs) {
            *x += y;
        }
        a
    }
}

impl Sub for Cyclotomic {
    type Output = Cyclotomic;
    fn sub(self, rhs: Self) -> Self {
        let (mut a, b) = self.aligned(&rhs);
        for (x, y) in a.coeffs.iter_mut().zip(b.coeffs) {
            *x -= y;
        }
        a
    }
}

impl Neg for Cyclotomic {
    type Output = Cyclotomic;
    fn neg(mut self) -> Self {
        for c in self.coeffs.iter_mut() {
            *c = -c.clone();
        }
        self
    }
}

impl Mul for Cyclotomic {
    type Output = Cyclotomic;
    fn mul(self, rhs: Self) -> Self {
        if self.n == 1 {
            let s = &self.coeffs[0];
            return Cyclotomic { n: rhs.n, coeffs: rhs.coeffs.iter().map(|c| c * s).collect() };
        }
        if rhs.n == 1 {
            let s = &rhs.coeffs[0];
            return Cyclotomic { n: self.n, coeffs: self.coeffs.iter().map(|c| c * s).collect() };
        }
        let (a, b) = self.aligned(&rhs);
        let n = a.n;
        Cyclotomic { n, coeffs: reduce(poly_mul(&a.coeffs, &b.coeffs), n) }
    }
}
