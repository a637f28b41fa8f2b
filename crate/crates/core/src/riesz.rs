//! Riesz interpolation in `(G, G+)`.
//!
//! Given `x1, x2 <= y1, y2` the interpolant is `z = [[-b, a, b]]` where `a`
//! squeezes the plain sums on `F1` and `b` corrects the twisted sums on `F`
//! through the weight `(2t - 1) / (t (1 - t))`.

use crate::error::{Error, Result};
use crate::group::{embed_triple, in_g_plus, GPlusMembership, GroupElement};
use crate::param_set::{KmsSpec, ParamSet};
use crate::poly::IntPoly;
use crate::ring::RingElement;
use crate::sandwich::{solve_sandwich, SandwichConstraint, SandwichProblem, SearchCaps};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interpolation {
    pub z: GroupElement,
    pub a: IntPoly,
    pub b: IntPoly,
    /// True when some `x^i` equals some `y^j` and `z` is that element.
    pub degenerate: bool,
    /// Memberships of `y^j - z` in `G+`, indexed by `j`.
    pub upper: [GPlusMembership; 2],
    /// Memberships of `z - x^i` in `G+`, indexed by `i`.
    pub lower: [GPlusMembership; 2],
}

pub fn interpolate(
    xs: [&GroupElement; 2],
    ys: [&GroupElement; 2],
    spec: &KmsSpec,
    caps: SearchCaps,
) -> Result<Interpolation> {
    for (i, x) in xs.iter().enumerate() {
        for (j, y) in ys.iter().enumerate() {
            let m = in_g_plus(&(*y - *x), spec);
            if !m.member {
                let cert = m
                    .alpha_certificate
                    .iter()
                    .chain(m.plain_certificate.iter())
                    .filter(|c| !c.is_positive())
                    .map(|c| c.to_string())
                    .next()
                    .unwrap_or_default();
                return Err(Error::Precondition(format!(
                    "y{} - x{} is not in G+: {cert}",
                    j + 1,
                    i + 1
                )));
            }
        }
    }

    let common = xs.iter().find(|x| ys.iter().any(|y| y == *x));
    let (z, a, b, degenerate) = match common {
        Some(x) => ((*x).clone(), IntPoly::zero(), IntPoly::zero(), true),
        None => {
            let a = choose_a(xs, ys, spec, caps)?;
            let b = choose_b(xs, ys, &a, spec, caps)?;
            let z = embed_triple(&RingElement::from_poly(a.clone()), &RingElement::from_poly(b.clone()));
            (z, a, b, false)
        }
    };

    let upper = ys.map(|y| in_g_plus(&(y - &z), spec));
    let lower = xs.map(|x| in_g_plus(&(&z - x), spec));
    if upper.iter().chain(lower.iter()).any(|m| !m.member) {
        return Err(Error::Internal(format!(
            "interpolant {z} failed verification"
        )));
    }
    Ok(Interpolation {
        z,
        a,
        b,
        degenerate,
        upper,
        lower,
    })
}

fn problem(constraints: Vec<SandwichConstraint>, set: ParamSet, caps: SearchCaps) -> SandwichProblem {
    SandwichProblem {
        constraints,
        set,
        max_degree: caps.max_degree,
        max_iterations: caps.max_iterations,
    }
}

/// `sum x^i_n < a < sum y^j_n` on `F1`, or the twisted sums at one point of
/// `F` when `F1` is empty.
fn choose_a(
    xs: [&GroupElement; 2],
    ys: [&GroupElement; 2],
    spec: &KmsSpec,
    caps: SearchCaps,
) -> Result<IntPoly> {
    let (set, sum): (ParamSet, fn(&GroupElement) -> RingElement) = if spec.f1().is_empty() {
        let t = spec.f().sample_point().expect("F is non-empty");
        (ParamSet::point(t)?, GroupElement::sum_alpha)
    } else {
        (spec.f1().clone(), GroupElement::sum_plain)
    };
    let mut constraints = Vec::with_capacity(4);
    for x in xs {
        for y in ys {
            let c = SandwichConstraint::new(sum(x), sum(y));
            if !constraints.contains(&c) {
                constraints.push(c);
            }
        }
    }
    Ok(solve_sandwich(&problem(constraints, set, caps))?.candidate)
}

/// `sum alpha^n(x^i_n) - a < w b < sum alpha^n(y^j_n) - a` on `F`.
fn choose_b(
    xs: [&GroupElement; 2],
    ys: [&GroupElement; 2],
    a: &IntPoly,
    spec: &KmsSpec,
    caps: SearchCaps,
) -> Result<IntPoly> {
    let a = RingElement::from_poly(a.clone());
    let w = RingElement::riesz_weight();
    let mut constraints = Vec::with_capacity(4);
    for x in xs {
        for y in ys {
            let c = SandwichConstraint::weighted(
                &x.sum_alpha() - &a,
                w.clone(),
                &y.sum_alpha() - &a,
            );
            if !constraints.contains(&c) {
                constraints.push(c);
            }
        }
    }
    Ok(solve_sandwich(&problem(constraints, spec.f().clone(), caps))?.candidate)
}
