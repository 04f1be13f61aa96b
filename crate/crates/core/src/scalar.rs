//! Coefficient fields for the characteristic-class engine: exact cyclotomic numbers or `Complex64`.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_rational::BigRational;

use crate::cyclotomic::Cyclotomic;
use crate::rational::{big_to_f64, to_f64, Rat};

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + 'static
{
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_big(r: &BigRational) -> Self;
    fn from_rat(r: Rat) -> Self;
    /// Nearest representable value of a real number; exact fields refuse.
    fn from_f64(x: f64) -> Option<Self>;
    /// e^{2πi·turn}.
    fn root_of_unity(turn: Rat) -> Self;
    fn inv(&self) -> Option<Self>;
    fn is_zero(&self) -> bool;
    fn conj(&self) -> Self;
    fn to_c64(&self) -> Complex64;

    fn i() -> Self {
        Self::root_of_unity(Rat::new(1, 4))
    }

    fn from_int(n: i64) -> Self {
        Self::from_rat(Rat::from_integer(n))
    }

    /// Exact closed form, for exact fields.
    fn exact_string(&self) -> Option<String> {
        None
    }
}

impl Scalar for Cyclotomic {
    const EXACT: bool = true;

    fn zero() -> Self {
        Cyclotomic::zero()
    }
    fn one() -> Self {
        Cyclotomic::one()
    }
    fn from_big(r: &BigRational) -> Self {
        Cyclotomic::from_big(r.clone())
    }
    fn from_rat(r: Rat) -> Self {
        Cyclotomic::from_rat(r)
    }
    fn from_f64(_: f64) -> Option<Self> {
        None
    }
    fn root_of_unity(turn: Rat) -> Self {
        Cyclotomic::root_of_unity(turn)
    }
    fn inv(&self) -> Option<Self> {
        Cyclotomic::inv(self)
    }
    fn is_zero(&self) -> bool {
        Cyclotomic::is_zero(self)
    }
    fn conj(&self) -> Self {
        Cyclotomic::conj(self)
    }
    fn to_c64(&self) -> Complex64 {
        Cyclotomic::to_c64(self)
    }
    fn exact_string(&self) -> Option<String> {
        Some(Cyclotomic::exact_string(self))
    }
}

impl Scalar for Complex64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_big(r: &BigRational) -> Self {
        Complex64::new(big_to_f64(r), 0.0)
    }
    fn from_rat(r: Rat) -> Self {
        Complex64::new(to_f64(&r), 0.0)
    }
    fn from_f64(x: f64) -> Option<Self> {
        Some(Complex64::new(x, 0.0))
    }
    fn root_of_unity(turn: Rat) -> Self {
        // exact quadrant values keep e.g. i^2 = -1 free of rounding
        let t = crate::rational::frac(turn);
        match (*t.numer(), *t.denom()) {
            (0, _) => Complex64::new(1.0, 0.0),
            (1, 4) => Complex64::new(0.0, 1.0),
            (1, 2) => Complex64::new(-1.0, 0.0),
            (3, 4) => Complex64::new(0.0, -1.0),
            _ => Complex64::from_polar(1.0, std::f64::consts::TAU * to_f64(&t)),
        }
    }
    fn inv(&self) -> Option<Self> {
        (self.norm_sqr() > 0.0).then(|| self.inv())
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn to_c64(&self) -> Complex64 {
        *self
    }
}
