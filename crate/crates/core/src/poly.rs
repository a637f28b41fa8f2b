//! Dense univariate polynomials with arbitrary-precision integer coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

/// Coefficients in ascending degree; never has a trailing zero, so the zero
/// polynomial is the empty vector.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: BigInt) -> Self {
        Self::new(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    /// The polynomial `t`.
    pub fn t() -> Self {
        Self::from_i64(&[0, 1])
    }

    /// The polynomial `1 - t`.
    pub fn one_minus_t() -> Self {
        Self::from_i64(&[1, -1])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    /// Multiplies by `t^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![BigInt::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        IntPoly { coeffs }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Multiplies by `(1 - t)^k`.
    pub fn mul_one_minus_t_pow(&self, k: usize) -> Self {
        let mut out = self.clone();
        for _ in 0..k {
            out = &out - &out.shift(1);
        }
        out
    }

    /// Value at `t = 0`.
    pub fn at_zero(&self) -> BigInt {
        self.coeff(0)
    }

    /// Value at `t = 1`.
    pub fn at_one(&self) -> BigInt {
        self.coeffs.iter().sum()
    }

    /// Divides by `t`; the caller guarantees `t` divides `self`.
    pub fn div_t(&self) -> Self {
        debug_assert!(self.at_zero().is_zero());
        if self.is_zero() {
            return Self::zero();
        }
        IntPoly {
            coeffs: self.coeffs[1..].to_vec(),
        }
    }

    /// Divides by `1 - t`; the caller guarantees `1 - t` divides `self`.
    pub fn div_one_minus_t(&self) -> Self {
        debug_assert!(self.at_one().is_zero());
        let n = self.coeffs.len();
        if n <= 1 {
            return Self::zero();
        }
        // synthetic division by (t - 1), then negate
        let mut q = vec![BigInt::zero(); n - 1];
        let mut carry = BigInt::zero();
        for i in (1..n).rev() {
            carry += &self.coeffs[i];
            q[i - 1] = -carry.clone();
        }
        Self::new(q)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    pub fn eval_int(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// `den^deg * p(num/den)`: an integer with the sign of `p(num/den)` when `den > 0`.
    pub fn eval_homogeneous(&self, q: &Rational) -> BigInt {
        let (num, den) = (q.numer(), q.denom());
        let mut acc = BigInt::zero();
        let mut den_pow = BigInt::one();
        for c in self.coeffs.iter().rev() {
            acc = acc * num + c * &den_pow;
            den_pow *= den;
        }
        acc
    }

    pub fn eval(&self, q: &Rational) -> Rational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * q + BigRational::from_integer(c.clone());
        }
        acc
    }

    /// Sign of `p(q)` in {-1, 0, 1}.
    pub fn sign_at(&self, q: &Rational) -> i32 {
        sign(&self.eval_homogeneous(q))
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + crate::rational::to_f64(&BigRational::from_integer(c.clone()));
        }
        acc
    }

    pub fn content(&self) -> BigInt {
        self.coeffs
            .iter()
            .fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Divides out the positive content; the sign of the leading coefficient is kept.
    pub fn primitive_part(&self) -> Self {
        let c = self.content();
        if c.is_zero() || c.is_one() {
            return self.clone();
        }
        IntPoly {
            coeffs: self.coeffs.iter().map(|x| x / &c).collect(),
        }
    }

    /// Pseudo-remainder scaled to be a positive multiple of the true remainder.
    pub fn positive_pseudo_rem(&self, divisor: &IntPoly) -> IntPoly {
        let dd = divisor.degree().expect("division by zero polynomial");
        let lc = divisor.leading().unwrap().clone();
        let mut r = self.clone();
        let mut steps = 0u32;
        while let Some(dr) = r.degree() {
            if dr < dd {
                break;
            }
            let lr = r.leading().unwrap().clone();
            // r <- lc * r - lr * t^(dr-dd) * divisor
            r = &r.scale(&lc) - &divisor.shift(dr - dd).scale(&lr);
            steps += 1;
        }
        if lc.is_negative() && steps % 2 == 1 {
            -&r
        } else {
            r
        }
    }

    /// Primitive gcd with positive leading coefficient.
    pub fn gcd(&self, other: &IntPoly) -> IntPoly {
        let mut a = self.primitive_part();
        let mut b = other.primitive_part();
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.positive_pseudo_rem(&b).primitive_part();
            a = b;
            b = r;
        }
        if a.leading().is_some_and(Signed::is_negative) {
            a = -&a;
        }
        a
    }

    /// Exact division; `None` when `divisor` does not divide `self` over Z.
    pub fn div_exact(&self, divisor: &IntPoly) -> Option<IntPoly> {
        let dd = divisor.degree()?;
        let lc = divisor.leading().unwrap();
        let mut r = self.clone();
        let Some(dr) = r.degree() else {
            return Some(IntPoly::zero());
        };
        if dr < dd {
            return None;
        }
        let mut q = vec![BigInt::zero(); dr - dd + 1];
        while let Some(dr) = r.degree() {
            if dr < dd {
                return None;
            }
            let (c, rem) = r.leading().unwrap().div_rem(lc);
            if !rem.is_zero() {
                return None;
            }
            r = &r - &divisor.shift(dr - dd).scale(&c);
            q[dr - dd] = c;
        }
        Some(IntPoly::new(q))
    }

    /// `self / gcd(self, self')`, primitive, same sign of leading coefficient as `self`.
    pub fn square_free_part(&self) -> IntPoly {
        if self.degree().unwrap_or(0) == 0 {
            return self.primitive_part();
        }
        let g = self.gcd(&self.derivative());
        let p = self.primitive_part();
        if g.degree() == Some(0) {
            return p;
        }
        p.div_exact(&g)
            .expect("gcd with derivative divides the polynomial")
            .primitive_part()
    }

    /// Bound `B` with every real root in `(-B, B)` (Cauchy).
    pub fn root_bound(&self) -> BigRational {
        let lc = self.leading().expect("nonzero polynomial").abs();
        let m = self.coeffs[..self.coeffs.len() - 1]
            .iter()
            .map(|c| c.abs())
            .max()
            .unwrap_or_default();
        BigRational::new(m, lc) + BigRational::one()
    }
}

pub(crate) fn sign(x: &BigInt) -> i32 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

impl fmt::Debug for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntPoly({self})")
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let show_mag = i == 0 || !mag.is_one();
            if show_mag {
                write!(f, "{mag}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "{}t", if show_mag { "*" } else { "" })?,
                _ => write!(f, "{}t^{i}", if show_mag { "*" } else { "" })?,
            }
        }
        Ok(())
    }
}

impl Add for &IntPoly {
    type Output = IntPoly;
    fn add(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPoly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &IntPoly {
    type Output = IntPoly;
    fn sub(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPoly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Neg for &IntPoly {
    type Output = IntPoly;
    fn neg(self) -> IntPoly {
        IntPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &IntPoly {
    type Output = IntPoly;
    fn mul(self, rhs: &IntPoly) -> IntPoly {
        if self.is_zero() || rhs.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64(c)
    }

    #[test]
    fn trims_trailing_zeros() {
        assert_eq!(p(&[1, 2, 0, 0]).degree(), Some(1));
        assert!(p(&[0, 0]).is_zero());
    }

    #[test]
    fn divide_by_one_minus_t() {
        // t - t^2 = t (1 - t)
        assert_eq!(p(&[0, 1, -1]).div_one_minus_t(), p(&[0, 1]));
        let q = p(&[3, -1, 4, 2]);
        let prod = q.mul_one_minus_t_pow(3);
        let mut back = prod;
        for _ in 0..3 {
            back = back.div_one_minus_t();
        }
        assert_eq!(back, q);
    }

    #[test]
    fn gcd_and_square_free() {
        // (t - 1)^2 (2t + 1)
        let f = &p(&[-1, 1]).pow(2) * &p(&[1, 2]);
        let g = f.gcd(&f.derivative());
        assert_eq!(g, p(&[-1, 1]));
        assert_eq!(f.square_free_part(), &p(&[-1, 1]) * &p(&[1, 2]));
        assert_eq!(f.div_exact(&p(&[1, 2])), Some(p(&[-1, 1]).pow(2)));
        assert_eq!(f.div_exact(&p(&[1, 3])), None);
    }

    #[test]
    fn homogeneous_eval_sign() {
        let f = p(&[-1, 2]);
        assert_eq!(f.sign_at(&rat(1, 2)), 0);
        assert_eq!(f.sign_at(&rat(1, 3)), -1);
        assert_eq!(f.eval(&rat(3, 4)), rat(1, 2));
    }

    #[test]
    fn display() {
        assert_eq!(p(&[-1, 2]).to_string(), "2*t - 1");
        assert_eq!(p(&[0, -1, 0, 1]).to_string(), "t^3 - t");
    }
}
