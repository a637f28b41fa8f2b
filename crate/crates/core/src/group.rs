//! The group `G` of finitely supported `Z`-indexed sequences in the ring, its
//! positive cones and the automorphism `gamma_star(x)_n = alpha(x_{n+1})`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::param_set::{KmsSpec, ParamSet};
use crate::positivity::{is_positive_on, sup_on, PositivityCertificate};
use crate::rational::{rat, Rational};
use crate::ring::RingElement;

/// Largest admissible `|n|` for a stored index.
pub const MAX_INDEX: i64 = 1_000_000;

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct GroupElement {
    entries: BTreeMap<i64, RingElement>,
}

impl GroupElement {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Builds an element, summing repeated indices and dropping zeros.
    pub fn from_entries(entries: impl IntoIterator<Item = (i64, RingElement)>) -> Result<Self> {
        let mut out = Self::zero();
        for (n, x) in entries {
            if n.abs() > MAX_INDEX {
                return Err(Error::Limit(format!("index {n} outside [-{MAX_INDEX}, {MAX_INDEX}]")));
            }
            out.add_at(n, &x);
        }
        Ok(out)
    }

    pub fn check_limits(&self) -> Result<()> {
        match self.entries.keys().find(|n| n.abs() > MAX_INDEX) {
            Some(n) => Err(Error::Limit(format!("index {n} outside [-{MAX_INDEX}, {MAX_INDEX}]"))),
            None => Ok(()),
        }
    }

    fn add_at(&mut self, n: i64, x: &RingElement) {
        if x.is_zero() {
            return;
        }
        let sum = match self.entries.get(&n) {
            Some(cur) => cur + x,
            None => x.clone(),
        };
        if sum.is_zero() {
            self.entries.remove(&n);
        } else {
            self.entries.insert(n, sum);
        }
    }

    pub fn entries(&self) -> &BTreeMap<i64, RingElement> {
        &self.entries
    }

    pub fn get(&self, n: i64) -> RingElement {
        self.entries.get(&n).cloned().unwrap_or_else(RingElement::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = i64> + '_ {
        self.entries.keys().copied()
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        GroupElement {
            entries: self.entries.iter().map(|(&n, x)| (n, x.scale(c))).collect(),
        }
    }

    /// `gamma_star^k`; negative `k` applies the inverse.
    pub fn gamma_star(&self, k: i64) -> Self {
        GroupElement {
            entries: self
                .entries
                .iter()
                .map(|(&n, x)| (n - k, x.alpha(k)))
                .collect(),
        }
    }

    /// `(id - gamma_star)(self)`.
    pub fn coboundary(&self) -> Self {
        self - &self.gamma_star(1)
    }

    /// `sum_n alpha^n(x_n)`.
    pub fn sum_alpha(&self) -> RingElement {
        self.entries.iter().map(|(&n, x)| x.alpha(n)).sum()
    }

    /// `sum_n x_n`.
    pub fn sum_plain(&self) -> RingElement {
        self.entries.values().cloned().sum()
    }
}

/// `[[a]]`: `a` at index 0.
pub fn embed_single(a: &RingElement) -> GroupElement {
    let mut g = GroupElement::zero();
    g.add_at(0, a);
    g
}

/// `[[-b, a, b]]`: `-b` at index -1, `a` at 0, `b` at 1.
pub fn embed_triple(a: &RingElement, b: &RingElement) -> GroupElement {
    let mut g = GroupElement::zero();
    g.add_at(-1, &-b);
    g.add_at(0, a);
    g.add_at(1, b);
    g
}

impl Add for &GroupElement {
    type Output = GroupElement;
    fn add(self, rhs: &GroupElement) -> GroupElement {
        let mut out = self.clone();
        for (&n, x) in &rhs.entries {
            out.add_at(n, x);
        }
        out
    }
}

impl Sub for &GroupElement {
    type Output = GroupElement;
    fn sub(self, rhs: &GroupElement) -> GroupElement {
        let mut out = self.clone();
        for (&n, x) in &rhs.entries {
            out.add_at(n, &-x);
        }
        out
    }
}

impl Neg for &GroupElement {
    type Output = GroupElement;
    fn neg(self) -> GroupElement {
        GroupElement {
            entries: self.entries.iter().map(|(&n, x)| (n, -x)).collect(),
        }
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupElement({self})")
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "{{}}");
        }
        write!(f, "{{")?;
        for (i, (n, x)) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{n} -> {x}")?;
        }
        write!(f, "}}")
    }
}

/// Result of testing `x` against `G+`: one certificate per clause.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GPlusMembership {
    pub member: bool,
    /// Positivity of `sum_alpha` on `F`; absent for `x = 0`.
    pub alpha_certificate: Option<PositivityCertificate>,
    /// Positivity of `sum_plain` on `F1`; absent for `x = 0`, or when the
    /// first clause already failed.
    pub plain_certificate: Option<PositivityCertificate>,
}

pub fn in_g_plus(x: &GroupElement, spec: &KmsSpec) -> GPlusMembership {
    if x.is_zero() {
        return GPlusMembership {
            member: true,
            alpha_certificate: None,
            plain_certificate: None,
        };
    }
    let a = is_positive_on(&x.sum_alpha(), spec.f());
    if !a.is_positive() {
        return GPlusMembership {
            member: false,
            alpha_certificate: Some(a),
            plain_certificate: None,
        };
    }
    let p = is_positive_on(&x.sum_plain(), spec.f1());
    GPlusMembership {
        member: p.is_positive(),
        alpha_certificate: Some(a),
        plain_certificate: Some(p),
    }
}

/// Membership in `{0} ∪ {x : sum_alpha(x) > 0 on F}`.
pub fn in_g_plusplus(x: &GroupElement, f: &ParamSet) -> (bool, Option<PositivityCertificate>) {
    if x.is_zero() {
        return (true, None);
    }
    let c = is_positive_on(&x.sum_alpha(), f);
    (c.is_positive(), Some(c))
}

/// Some `k >= 1` with `k x - y` in `G+`, for `x` in `G+ \ {0}`. Not minimal.
pub fn order_unit_multiple(x: &GroupElement, y: &GroupElement, spec: &KmsSpec) -> Result<BigInt> {
    if x.is_zero() || !in_g_plus(x, spec).member {
        return Err(Error::NotOrderUnit(format!("{x} is not a nonzero element of G+")));
    }
    let mut k = ratio_bound(&x.sum_alpha(), &y.sum_alpha(), spec.f())?;
    if !spec.f1().is_empty() {
        k = k.max(ratio_bound(&x.sum_plain(), &y.sum_plain(), spec.f1())?);
    }
    for _ in 0..64 {
        if in_g_plus(&(&x.scale(&k) - y), spec).member {
            return Ok(k);
        }
        k *= 2;
    }
    Err(Error::Internal(format!(
        "no verified order-unit multiple for {x} against {y}"
    )))
}

/// `k` with `k * g > h` on `s`, given `g > 0` on `s`.
fn ratio_bound(g: &RingElement, h: &RingElement, s: &ParamSet) -> Result<BigInt> {
    // inf g >= -sup(-g); refine until the bound is strictly positive
    let neg_g = -g;
    let mut tol = Rational::one();
    let inf_g = loop {
        let (_, hi) = sup_on(&neg_g, s, &tol)?;
        if hi.is_negative() {
            break -hi;
        }
        tol /= rat(16, 1);
        if tol < rat(1, 1 << 40) {
            return Err(Error::Internal(format!("no positive lower bound for {g}")));
        }
    };
    let (_, sup_h) = sup_on(h, s, &Rational::one())?;
    if !sup_h.is_positive() {
        return Ok(BigInt::one());
    }
    let ratio = sup_h / inf_g;
    Ok(ratio.numer().div_floor(ratio.denom()) + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::param_set::{interval_of, validate_spec};
    use crate::poly::IntPoly;
    use crate::rational::half;

    fn p(c: &[i64]) -> RingElement {
        RingElement::from_poly(IntPoly::from_i64(c))
    }

    fn g(entries: &[(i64, RingElement)]) -> GroupElement {
        GroupElement::from_entries(entries.iter().cloned()).unwrap()
    }

    fn half_spec() -> KmsSpec {
        let h = ParamSet::point(half()).unwrap();
        validate_spec(h.clone(), h).unwrap()
    }

    #[test]
    fn embeddings() {
        assert_eq!(embed_single(&RingElement::one()), g(&[(0, RingElement::one())]));
        assert!(embed_single(&RingElement::zero()).is_zero());
        assert_eq!(
            embed_triple(&RingElement::one(), &RingElement::zero()),
            embed_single(&RingElement::one())
        );
        assert_eq!(
            embed_triple(&RingElement::zero(), &RingElement::one()),
            g(&[(-1, p(&[-1])), (1, p(&[1]))])
        );
        let t = RingElement::t();
        assert_eq!(embed_triple(&t, &t), g(&[(-1, -&t), (0, t.clone()), (1, t.clone())]));
    }

    #[test]
    fn gamma_star_examples() {
        let a = p(&[3, -1, 2]);
        assert_eq!(embed_single(&a).gamma_star(1), g(&[(-1, a.alpha(1))]));

        let x = g(&[(0, RingElement::one()), (1, RingElement::t())]);
        let expected = g(&[
            (-1, RingElement::alpha_multiplier()),
            (0, RingElement::canon(IntPoly::from_i64(&[0, 0, 1]), 0, 1)),
        ]);
        assert_eq!(x.gamma_star(1), expected);
        assert_eq!(x.gamma_star(1).gamma_star(-1), x);
    }

    #[test]
    fn sums() {
        let a = p(&[1, 1]);
        assert_eq!(embed_single(&a).sum_alpha(), a);
        assert!(embed_single(&a).coboundary().sum_alpha().is_zero());

        let t = RingElement::t();
        let x = g(&[(-1, -&t), (1, t.clone())]);
        let omt = p(&[1, -1]);
        let expected = &(-&omt) + &RingElement::canon(IntPoly::from_i64(&[0, 0, 1]), 0, 1);
        assert_eq!(x.sum_alpha(), expected);

        assert_eq!(embed_single(&a).sum_plain(), a);
        assert_eq!(embed_triple(&a, &t).sum_plain(), a);
        assert!(g(&[(2, p(&[1])), (5, p(&[-1]))]).sum_plain().is_zero());
    }

    #[test]
    fn cone_examples() {
        let spec = half_spec();
        assert!(in_g_plus(&embed_single(&RingElement::one()), &spec).member);
        assert!(!in_g_plus(&embed_single(&p(&[-1, 2])), &spec).member);
        let x = embed_triple(&RingElement::zero(), &RingElement::t());
        assert!(!in_g_plus(&x, &spec).member);

        let f = spec.f();
        assert!(in_g_plusplus(&embed_single(&RingElement::one()), f).0);
        let neg = g(&[(-1, -&RingElement::alpha_multiplier())]);
        assert_eq!(neg.sum_alpha(), p(&[-1]));
        assert!(!in_g_plusplus(&neg, f).0);
    }

    #[test]
    fn order_units() {
        let spec = half_spec();
        let one = embed_single(&RingElement::one());
        let k = order_unit_multiple(&one, &embed_single(&p(&[3])), &spec).unwrap();
        assert_eq!(k, BigInt::from(4));
        let k = order_unit_multiple(&one, &GroupElement::zero(), &spec).unwrap();
        assert_eq!(k, BigInt::one());

        let s = interval_of((1, 4), (1, 3));
        let spec = validate_spec(s.clone(), s).unwrap();
        let k = order_unit_multiple(&embed_single(&RingElement::t()), &one, &spec).unwrap();
        assert!(k >= BigInt::from(5));

        assert!(matches!(
            order_unit_multiple(&GroupElement::zero(), &one, &spec),
            Err(Error::NotOrderUnit(_))
        ));
    }

    #[test]
    fn index_limits() {
        assert!(GroupElement::from_entries([(MAX_INDEX + 1, RingElement::one())]).is_err());
        let x = embed_single(&RingElement::one()).gamma_star(MAX_INDEX + 5);
        assert!(x.check_limits().is_err());
    }
}
