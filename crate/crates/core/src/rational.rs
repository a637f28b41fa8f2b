//! Exact rationals and their textual form `"num/den"`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn half() -> Rational {
    rat(1, 2)
}

/// Is `0 < t < 1`?
pub fn in_open_unit(t: &Rational) -> bool {
    t.is_positive() && t < &Rational::one()
}

pub fn to_f64(q: &Rational) -> f64 {
    match (q.numer().to_f64(), q.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // huge numerator or denominator: shift both down before dividing
            let nb = q.numer().bits() as i64;
            let db = q.denom().bits() as i64;
            let shift = (nb.max(db) - 900).max(0) as usize;
            let n = (q.numer() >> shift).to_f64().unwrap_or(0.0);
            let d = (q.denom() >> shift).to_f64().unwrap_or(f64::INFINITY);
            if d == 0.0 {
                if q.is_negative() {
                    f64::NEG_INFINITY
                } else {
                    f64::INFINITY
                }
            } else {
                n / d
            }
        }
    }
}

/// Renders `n` for integers and `n/d` otherwise.
pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// A parsed rational together with whether the input text was already reduced.
#[derive(Debug, Clone)]
pub struct ParsedRational {
    pub value: Rational,
    pub was_reduced: bool,
}

pub fn parse_rational(text: &str) -> Result<ParsedRational, Error> {
    let s = text.trim();
    let bad = || Error::Parse {
        offset: 0,
        message: format!("invalid rational literal {text:?}"),
    };
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(Error::Parse {
            offset: 0,
            message: format!("zero denominator in {text:?}"),
        });
    }
    let value = BigRational::new(n.clone(), d.clone());
    let was_reduced = d.is_positive() && value.numer() == &n && value.denom() == &d;
    Ok(ParsedRational { value, was_reduced })
}

/// Exact binary value of a finite double.
pub fn from_f64(x: f64) -> Option<Rational> {
    BigRational::from_float(x)
}

/// Nearest rational with denominator `10^digits`.
pub fn round_decimal(q: &Rational, digits: u32) -> Rational {
    let scale = BigInt::from(10u32).pow(digits);
    let scaled = q * BigRational::from_integer(scale.clone());
    BigRational::new(scaled.round().to_integer(), scale)
}

pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}
