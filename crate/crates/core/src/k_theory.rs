//! The cokernel `G / (id - gamma_star) G` and its identification with `G0`
//! through `S(q(x)) = sum_n alpha^n(x_n)`.

use num_bigint::BigInt;
use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::group::{embed_single, in_g_plus, in_g_plusplus, GPlusMembership, GroupElement};
use crate::param_set::KmsSpec;
use crate::poly::IntPoly;
use crate::positivity::sup_on;
use crate::rational::{format_rational, half};
use crate::ring::RingElement;
use crate::sandwich::{solve_sandwich, SandwichConstraint, SandwichProblem, SearchCaps};

/// A coset of the image of `id - gamma_star`, kept as a representative and
/// its invariant `S`.
#[derive(Debug, Clone)]
pub struct QuotientClass {
    representative: GroupElement,
    s_value: RingElement,
}

impl QuotientClass {
    pub fn of(representative: GroupElement) -> Self {
        let s_value = representative.sum_alpha();
        QuotientClass {
            representative,
            s_value,
        }
    }

    pub fn representative(&self) -> &GroupElement {
        &self.representative
    }

    pub fn s_value(&self) -> &RingElement {
        &self.s_value
    }
}

// S is injective on the quotient, so classes compare by their invariant
impl PartialEq for QuotientClass {
    fn eq(&self, other: &Self) -> bool {
        self.s_value == other.s_value
    }
}

impl Eq for QuotientClass {}

pub fn in_image(x: &GroupElement) -> bool {
    x.sum_alpha().is_zero()
}

/// The unique `y` with `(id - gamma_star)(y) = x`.
pub fn solve_coboundary(x: &GroupElement) -> Result<GroupElement> {
    let s = x.sum_alpha();
    if !s.is_zero() {
        return Err(Error::Precondition(format!(
            "x is not a coboundary: sum_alpha(x) = {s}"
        )));
    }
    let (Some(&lo), Some(&hi)) = (x.entries().keys().next(), x.entries().keys().next_back())
    else {
        return Ok(GroupElement::zero());
    };
    // y_n = x_n + alpha(y_{n+1}), from the top index down
    let mut entries = Vec::new();
    let mut carry = RingElement::zero();
    for n in (lo..=hi).rev() {
        carry = &x.get(n) + &carry.alpha(1);
        if n > lo {
            entries.push((n, carry.clone()));
        }
    }
    if !carry.is_zero() {
        return Err(Error::Internal(format!(
            "coboundary recursion left residue {carry} at index {lo}"
        )));
    }
    let y = GroupElement::from_entries(entries)?;
    if &y.coboundary() != x {
        return Err(Error::Internal(format!("(id - gamma_star)({y}) differs from x")));
    }
    Ok(y)
}

pub fn s_of(x: &GroupElement) -> RingElement {
    x.sum_alpha()
}

pub fn s_inverse(a: &RingElement) -> QuotientClass {
    QuotientClass::of(embed_single(a))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PositiveRepresentative {
    pub y: GroupElement,
    pub b: IntPoly,
    pub certificate: GPlusMembership,
}

// artificial upper bound `lower + 2^m` for the one-sided sandwich, with retries
const EXTRA_BITS: u64 = 2;
const RETRIES: u64 = 3;

/// A member of `G+` in the coset of `x`, for `x` in `G++ \ {0}`.
pub fn positive_representative(
    x: &GroupElement,
    spec: &KmsSpec,
    caps: SearchCaps,
) -> Result<PositiveRepresentative> {
    if x.is_zero() {
        return Err(Error::Precondition("x = 0".into()));
    }
    let (inside, cert) = in_g_plusplus(x, spec.f());
    if !inside {
        let detail = cert.map(|c| c.to_string()).unwrap_or_default();
        return Err(Error::Precondition(format!("x is not in G++: {detail}")));
    }
    let m = in_g_plus(x, spec);
    if m.member {
        return Ok(PositiveRepresentative {
            y: x.clone(),
            b: IntPoly::zero(),
            certificate: m,
        });
    }

    let plain = x.sum_plain();
    if spec.f1().contains_half() {
        let v = plain.eval(&half())?;
        if !v.is_positive() {
            return Err(Error::HalfPointInfeasible(format!(
                "sum of entries at 1/2 is {}",
                format_rational(&v)
            )));
        }
    }

    // need (1 - 2t)/(t(1 - t)) b > -sum x_n on F1
    let lower = -&plain;
    let weight = -RingElement::riesz_weight();
    let mut bits = magnitude_bits(&plain, spec)? + EXTRA_BITS;
    let mut last = None;
    for _ in 0..RETRIES {
        let upper = &lower + &RingElement::from_poly(IntPoly::constant(BigInt::one() << bits));
        let problem = SandwichProblem {
            constraints: vec![SandwichConstraint::weighted(lower.clone(), weight.clone(), upper)],
            set: spec.f1().clone(),
            max_degree: caps.max_degree,
            max_iterations: caps.max_iterations,
        };
        match solve_sandwich(&problem) {
            Ok(sol) => return finish(x, sol.candidate, spec),
            Err(e @ (Error::SearchExhausted(_) | Error::Infeasible(_))) => last = Some(e),
            Err(e) => return Err(e),
        }
        bits += 4;
    }
    Err(last.expect("at least one attempt"))
}

fn finish(x: &GroupElement, b: IntPoly, spec: &KmsSpec) -> Result<PositiveRepresentative> {
    let br = RingElement::from_poly(b.clone());
    let shift = GroupElement::from_entries([(1, br.alpha(-1)), (-1, -&br.alpha(1))])?;
    let y = x + &shift;
    if y.sum_alpha() != x.sum_alpha() {
        return Err(Error::Internal("representative left the coset".into()));
    }
    let certificate = in_g_plus(&y, spec);
    if !certificate.member {
        return Err(Error::Internal(format!("representative {y} is not in G+")));
    }
    Ok(PositiveRepresentative { y, b, certificate })
}

/// Bits of an upper bound on `|f|` over `F1`.
fn magnitude_bits(f: &RingElement, spec: &KmsSpec) -> Result<u64> {
    let tol = crate::rational::int(1);
    let (_, hi) = sup_on(f, spec.f1(), &tol)?;
    let (_, neg_hi) = sup_on(&-f, spec.f1(), &tol)?;
    let m = hi.abs().max(neg_hi.abs()).ceil().to_integer();
    Ok(m.bits().max(1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::param_set::{interval_of, validate_spec, ParamSet};

    fn p(c: &[i64]) -> RingElement {
        RingElement::from_poly(IntPoly::from_i64(c))
    }

    #[test]
    fn coboundary_of_embedded() {
        let a = p(&[1, -3, 2]);
        let x = embed_single(&a).coboundary();
        assert!(in_image(&x));
        assert_eq!(solve_coboundary(&x).unwrap(), embed_single(&a));
        assert_eq!(solve_coboundary(&GroupElement::zero()).unwrap(), GroupElement::zero());
    }

    #[test]
    fn non_coboundary_rejected() {
        let x = embed_single(&RingElement::one());
        assert!(!in_image(&x));
        assert!(matches!(solve_coboundary(&x), Err(Error::Precondition(_))));
    }

    #[test]
    fn s_inverse_of_multiplier() {
        let a = RingElement::alpha_multiplier();
        let q = s_inverse(&a);
        assert_eq!(q.representative().get(0), a);
        assert_eq!(q.s_value(), &a);
    }

    #[test]
    fn representative_for_disjoint_sets() {
        // a = 4t - 1 is positive on F but negative on all of F1
        let f = interval_of((1, 3), (2, 5));
        let f1 = interval_of((1, 8), (1, 5));
        let spec = validate_spec(f, f1).unwrap();
        let x = embed_single(&p(&[-1, 4]));
        let r = positive_representative(&x, &spec, SearchCaps::default()).unwrap();
        assert!(!r.b.is_zero());
        assert_eq!(r.y.sum_alpha(), x.sum_alpha());
        assert!(r.certificate.member);
    }

    #[test]
    fn already_positive() {
        let s = ParamSet::point(half()).unwrap();
        let spec = validate_spec(s.clone(), s).unwrap();
        let x = embed_single(&RingElement::one());
        let r = positive_representative(&x, &spec, SearchCaps::default()).unwrap();
        assert!(r.b.is_zero());
        assert_eq!(r.y, x);
    }

    #[test]
    fn zero_rejected() {
        let s = ParamSet::point(half()).unwrap();
        let spec = validate_spec(s.clone(), s).unwrap();
        let r = positive_representative(&GroupElement::zero(), &spec, SearchCaps::default());
        assert!(matches!(r, Err(Error::Precondition(_))));
    }
}
