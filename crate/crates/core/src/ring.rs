//! The ring `Z[t, 1/t, 1/(1-t)]` of integer rational functions whose only
//! poles are at `t = 0` and `t = 1`, viewed as functions on `(0, 1)`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::IntPoly;
use crate::rational::{in_open_unit, Rational};

/// Caps guarding runaway growth in iterative searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_degree: usize,
    pub max_pole_order: u32,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_degree: 512,
            max_pole_order: 64,
        }
    }
}

impl Limits {
    pub fn check(&self, x: &RingElement) -> Result<()> {
        if x.num.degree().unwrap_or(0) > self.max_degree {
            return Err(Error::Limit(format!(
                "numerator degree {} exceeds {}",
                x.num.degree().unwrap_or(0),
                self.max_degree
            )));
        }
        if x.t_pow > self.max_pole_order || x.omt_pow > self.max_pole_order {
            return Err(Error::Limit(format!(
                "pole orders ({}, {}) exceed {}",
                x.t_pow, x.omt_pow, self.max_pole_order
            )));
        }
        Ok(())
    }
}

/// `num(t) / (t^t_pow * (1-t)^omt_pow)` in canonical form: no factor `t`
/// (resp. `1-t`) is shared between numerator and denominator, and zero is
/// `0 / 1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RingElement {
    num: IntPoly,
    t_pow: u32,
    omt_pow: u32,
}

impl RingElement {
    /// Canonical form of `num / (t^a (1-t)^b)`.
    pub fn canon(mut num: IntPoly, mut a: u32, mut b: u32) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        while a > 0 && num.at_zero().is_zero() {
            num = num.div_t();
            a -= 1;
        }
        while b > 0 && num.at_one().is_zero() {
            num = num.div_one_minus_t();
            b -= 1;
        }
        RingElement {
            num,
            t_pow: a,
            omt_pow: b,
        }
    }

    pub fn from_poly(p: IntPoly) -> Self {
        Self::canon(p, 0, 0)
    }

    pub fn from_int(c: i64) -> Self {
        Self::from_poly(IntPoly::constant(BigInt::from(c)))
    }

    pub fn zero() -> Self {
        RingElement {
            num: IntPoly::zero(),
            t_pow: 0,
            omt_pow: 0,
        }
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn t() -> Self {
        Self::from_poly(IntPoly::t())
    }

    /// `t / (1 - t)`, the multiplier defining [`alpha`](Self::alpha).
    pub fn alpha_multiplier() -> Self {
        Self::canon(IntPoly::t(), 0, 1)
    }

    /// `(2t - 1) / (t (1 - t))`.
    pub fn riesz_weight() -> Self {
        Self::canon(IntPoly::from_i64(&[-1, 2]), 1, 1)
    }

    pub fn numerator(&self) -> &IntPoly {
        &self.num
    }

    pub fn t_pow(&self) -> u32 {
        self.t_pow
    }

    pub fn omt_pow(&self) -> u32 {
        self.omt_pow
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Is this a constant integer (no poles, degree 0)?
    pub fn as_constant(&self) -> Option<&BigInt> {
        if self.t_pow == 0 && self.omt_pow == 0 && self.num.is_constant() {
            Some(self.num.coeffs().first().unwrap_or(&ZERO))
        } else {
            None
        }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::canon(self.num.scale(c), self.t_pow, self.omt_pow)
    }

    /// Numerator over the common denominator `t^a (1-t)^b` with `a >= t_pow`, `b >= omt_pow`.
    pub(crate) fn lift(&self, a: u32, b: u32) -> IntPoly {
        self.num
            .shift((a - self.t_pow) as usize)
            .mul_one_minus_t_pow((b - self.omt_pow) as usize)
    }

    /// `self * (t / (1 - t))^k`.
    pub fn alpha(&self, k: i64) -> Self {
        if k == 0 || self.is_zero() {
            return self.clone();
        }
        let m = k.unsigned_abs() as usize;
        if k > 0 {
            Self::canon(self.num.shift(m), self.t_pow, self.omt_pow + m as u32)
        } else {
            Self::canon(
                self.num.mul_one_minus_t_pow(m),
                self.t_pow + m as u32,
                self.omt_pow,
            )
        }
    }

    pub fn eval(&self, t0: &Rational) -> Result<Rational> {
        if !in_open_unit(t0) {
            return Err(Error::Domain(format!(
                "evaluation point {} is outside (0, 1)",
                crate::rational::format_rational(t0)
            )));
        }
        Ok(self.eval_unchecked(t0))
    }

    pub(crate) fn eval_unchecked(&self, t0: &Rational) -> Rational {
        let one = Rational::one();
        let den = num_traits::pow(t0.clone(), self.t_pow as usize)
            * num_traits::pow(&one - t0, self.omt_pow as usize);
        self.num.eval(t0) / den
    }

    pub fn eval_f64(&self, t: f64) -> f64 {
        self.num.eval_f64(t) / (t.powi(self.t_pow as i32) * (1.0 - t).powi(self.omt_pow as i32))
    }

    /// Sign at a point of `(0, 1)`; the denominator is positive there.
    pub fn sign_at(&self, t0: &Rational) -> i32 {
        self.num.sign_at(t0)
    }
}

static ZERO: BigInt = BigInt::ZERO;

impl fmt::Debug for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RingElement({self})")
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let den = match (self.t_pow, self.omt_pow) {
            (0, 0) => return write!(f, "{}", self.num),
            (a, 0) => pow_str("t", a),
            (0, b) => pow_str("(1 - t)", b),
            (a, b) => format!("({}*{})", pow_str("t", a), pow_str("(1 - t)", b)),
        };
        if self.num.coeffs().iter().filter(|c| !c.is_zero()).count() > 1 {
            write!(f, "({}) / {den}", self.num)
        } else {
            write!(f, "{} / {den}", self.num)
        }
    }
}

fn pow_str(base: &str, e: u32) -> String {
    if e == 1 {
        base.to_string()
    } else {
        format!("{base}^{e}")
    }
}

impl Add for &RingElement {
    type Output = RingElement;
    fn add(self, rhs: &RingElement) -> RingElement {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let a = self.t_pow.max(rhs.t_pow);
        let b = self.omt_pow.max(rhs.omt_pow);
        RingElement::canon(&self.lift(a, b) + &rhs.lift(a, b), a, b)
    }
}

impl Sub for &RingElement {
    type Output = RingElement;
    fn sub(self, rhs: &RingElement) -> RingElement {
        self + &(-rhs)
    }
}

impl Neg for &RingElement {
    type Output = RingElement;
    fn neg(self) -> RingElement {
        RingElement {
            num: -&self.num,
            t_pow: self.t_pow,
            omt_pow: self.omt_pow,
        }
    }
}

impl Mul for &RingElement {
    type Output = RingElement;
    fn mul(self, rhs: &RingElement) -> RingElement {
        RingElement::canon(
            &self.num * &rhs.num,
            self.t_pow + rhs.t_pow,
            self.omt_pow + rhs.omt_pow,
        )
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for RingElement {
            type Output = RingElement;
            fn $m(self, rhs: RingElement) -> RingElement {
                (&self).$m(&rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for RingElement {
    type Output = RingElement;
    fn neg(self) -> RingElement {
        -&self
    }
}

impl std::iter::Sum for RingElement {
    fn sum<I: Iterator<Item = RingElement>>(iter: I) -> Self {
        iter.fold(RingElement::zero(), |acc, x| &acc + &x)
    }
}

impl From<IntPoly> for RingElement {
    fn from(p: IntPoly) -> Self {
        Self::from_poly(p)
    }
}
