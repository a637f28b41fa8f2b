//! Exact decision of strict positivity of ring elements on parameter sets.
//!
//! The denominator `t^a (1-t)^b` is positive on `(0, 1)`, so everything reduces
//! to the integer numerator: exact signs at points and interval endpoints,
//! and a Sturm root count on each open interval.

use std::cell::OnceCell;
use std::fmt;

use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::poly::IntPoly;
use crate::param_set::{Component, ParamSet};
use crate::rational::{format_rational, Rational};
use crate::ring::RingElement;
use crate::sturm::SturmChain;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Positive,
    NotPositive,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// A point of the set where the element is `<= 0`, with its exact value.
    Point { t: Rational, value: Rational },
    /// An interval inside the set on which the square-free part of the
    /// numerator changes sign, so the element vanishes somewhere in `(lo, hi]`
    /// without becoming negative nearby.
    Interval {
        lo: Rational,
        hi: Rational,
        sign_lo: i32,
        sign_hi: i32,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEntry {
    pub lo: Rational,
    pub hi: Rational,
    /// Distinct roots in the open interval `(lo, hi)`; `None` for point
    /// components or when an endpoint already failed.
    pub root_count: Option<usize>,
    pub sign_lo: i32,
    pub sign_hi: i32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PositivityCertificate {
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub method_trace: Vec<TraceEntry>,
}

impl PositivityCertificate {
    pub fn is_positive(&self) -> bool {
        self.verdict == Verdict::Positive
    }
}

/// Decides `f(t) > 0` for every `t` in `s`.
pub fn is_positive_on(f: &RingElement, s: &ParamSet) -> PositivityCertificate {
    let num = f.numerator();
    let mut trace = Vec::new();
    let not_positive = |witness, trace| PositivityCertificate {
        verdict: Verdict::NotPositive,
        witness: Some(witness),
        method_trace: trace,
    };
    let point_witness = |t: &Rational| Witness::Point {
        t: t.clone(),
        value: f.eval_unchecked(t),
    };
    let chain: OnceCell<SturmChain> = OnceCell::new();

    for comp in s.components() {
        match comp {
            Component::Point(p) => {
                let sp = num.sign_at(p);
                trace.push(TraceEntry {
                    lo: p.clone(),
                    hi: p.clone(),
                    root_count: None,
                    sign_lo: sp,
                    sign_hi: sp,
                });
                if sp <= 0 {
                    return not_positive(point_witness(p), trace);
                }
            }
            Component::Interval(lo, hi) => {
                let sl = num.sign_at(lo);
                let sh = num.sign_at(hi);
                let failed_end = if sl <= 0 {
                    Some(lo)
                } else if sh <= 0 {
                    Some(hi)
                } else {
                    None
                };
                if let Some(end) = failed_end {
                    trace.push(TraceEntry {
                        lo: lo.clone(),
                        hi: hi.clone(),
                        root_count: None,
                        sign_lo: sl,
                        sign_hi: sh,
                    });
                    return not_positive(point_witness(end), trace);
                }
                let chain = chain.get_or_init(|| SturmChain::new(num));
                let roots = chain.count_open(lo, hi);
                trace.push(TraceEntry {
                    lo: lo.clone(),
                    hi: hi.clone(),
                    root_count: Some(roots),
                    sign_lo: sl,
                    sign_hi: sh,
                });
                if roots > 0 {
                    let w = interior_witness(f, chain, lo, hi);
                    return not_positive(w, trace);
                }
            }
        }
    }
    PositivityCertificate {
        verdict: Verdict::Positive,
        witness: None,
        method_trace: trace,
    }
}

/// Refines the first isolated root in `(lo, hi)` until a rational point with
/// `f <= 0` turns up; a root of even multiplicity is reported as an interval.
fn interior_witness(f: &RingElement, chain: &SturmChain, lo: &Rational, hi: &Rational) -> Witness {
    let num = f.numerator();
    let g = chain.base();
    let width = (hi - lo) / Rational::from_integer(1024.into());
    let isolated = chain.isolate(lo, hi, &width);
    let (mut a, mut b) = isolated
        .into_iter()
        .next()
        .expect("a positive Sturm count yields an isolating interval");
    let point = |t: &Rational| Witness::Point {
        t: t.clone(),
        value: f.eval_unchecked(t),
    };
    if num.sign_at(&b) <= 0 {
        return point(&b);
    }
    let two = Rational::from_integer(2.into());
    for _ in 0..96 {
        let simple = simplest_in(&a, &b);
        if num.sign_at(&simple) <= 0 {
            return point(&simple);
        }
        let m = (&a + &b) / &two;
        if num.sign_at(&m) <= 0 {
            return point(&m);
        }
        // keep exactly one root of g inside (a, b]
        if chain.count_half_open(&a, &m) > 0 {
            b = m;
        } else {
            a = m;
        }
    }
    Witness::Interval {
        sign_lo: g.sign_at(&a),
        sign_hi: g.sign_at(&b),
        lo: a,
        hi: b,
    }
}

/// The rational of smallest denominator in `[a, b]`, for `0 <= a <= b`.
fn simplest_in(a: &Rational, b: &Rational) -> Rational {
    let fl = a.floor();
    if &fl == a {
        return a.clone();
    }
    if &(&fl + Rational::one()) <= b {
        return fl + Rational::one();
    }
    // a and b share the integer part: recurse on reciprocals of the fractional parts
    let inner = simplest_in(&(Rational::one() / (b - &fl)), &(Rational::one() / (a - &fl)));
    fl + Rational::one() / inner
}

/// Membership in the cone `{f : f > 0 on F} ∪ {0}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConeMembership {
    pub member: bool,
    /// Absent only for the zero element.
    pub certificate: Option<PositivityCertificate>,
}

pub fn in_cone_gf(f: &RingElement, set: &ParamSet) -> ConeMembership {
    if f.is_zero() {
        return ConeMembership {
            member: true,
            certificate: None,
        };
    }
    let cert = is_positive_on(f, set);
    ConeMembership {
        member: cert.is_positive(),
        certificate: Some(cert),
    }
}

/// Rational bounds `lo <= sup_{t in s} f(t) <= hi` with `hi - lo <= tol`.
pub fn sup_on(f: &RingElement, s: &ParamSet, tol: &Rational) -> Result<(Rational, Rational)> {
    if !tol.is_positive() {
        return Err(Error::Domain("tolerance must be positive".into()));
    }
    if s.is_empty() {
        return Err(Error::Domain("supremum over an empty set".into()));
    }
    if let Some(c) = f.as_constant() {
        let c = Rational::from_integer(c.clone());
        return Ok((c.clone(), c));
    }

    let mut lo = s
        .components()
        .iter()
        .flat_map(|c| [c.left(), c.right()])
        .map(|t| f.eval_unchecked(t))
        .max()
        .expect("non-empty set");
    let mut hi = magnitude_bound(f, s);
    let two = Rational::from_integer(2.into());
    while &hi - &lo > *tol {
        let mid = (&lo + &hi) / &two;
        // mid - f > 0  <=>  num(mid) - den(mid) * f > 0
        let gap = &RingElement::from_poly(IntPoly::constant(mid.numer().clone()))
            - &f.scale(mid.denom());
        let cert = is_positive_on(&gap, s);
        if cert.is_positive() {
            hi = mid;
        } else {
            lo = match cert.witness {
                Some(Witness::Point { t, .. }) => f.eval_unchecked(&t).max(mid),
                _ => mid,
            };
        }
    }
    Ok((lo, hi))
}

/// `sum |c_i| / (min t)^a (min (1-t))^b` over the set; dominates `|f|`.
fn magnitude_bound(f: &RingElement, s: &ParamSet) -> Rational {
    let l1: num_bigint::BigInt = f.numerator().coeffs().iter().map(|c| c.abs()).sum();
    let tmin = s.min().expect("non-empty").clone();
    let omt_min = Rational::one() - s.max().expect("non-empty");
    let den = num_traits::pow(tmin, f.t_pow() as usize) * num_traits::pow(omt_min, f.omt_pow() as usize);
    Rational::from_integer(l1) / den
}

impl fmt::Display for PositivityCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "verdict: {}",
            match self.verdict {
                Verdict::Positive => "POSITIVE",
                Verdict::NotPositive => "NOT_POSITIVE",
            }
        )?;
        match &self.witness {
            Some(Witness::Point { t, value }) => writeln!(
                f,
                "witness: point t = {} value = {}",
                format_rational(t),
                format_rational(value)
            )?,
            Some(Witness::Interval { lo, hi, sign_lo, sign_hi }) => writeln!(
                f,
                "witness: zero in ({}, {}] square-free signs {sign_lo}/{sign_hi}",
                format_rational(lo),
                format_rational(hi)
            )?,
            None => {}
        }
        for e in &self.method_trace {
            if e.lo == e.hi {
                writeln!(f, "  point {}: sign {}", format_rational(&e.lo), e.sign_lo)?;
            } else {
                let roots = e
                    .root_count
                    .map_or_else(|| "-".to_string(), |n| n.to_string());
                writeln!(
                    f,
                    "  interval [{}, {}]: endpoint signs {}/{}, sturm roots {roots}",
                    format_rational(&e.lo),
                    format_rational(&e.hi),
                    e.sign_lo,
                    e.sign_hi
                )?;
            }
        }
        Ok(())
    }
}
