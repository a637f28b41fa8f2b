//! Seeded random instances for the verification harness and the tests.

use num_bigint::BigInt;
use rand::Rng;

use crate::group::{in_g_plus, GroupElement};
use crate::param_set::{validate_spec, BetaSet, KmsSpec, ParamSet};
use crate::poly::IntPoly;
use crate::rational::{half, rat, Rational};
use crate::ring::RingElement;

pub fn poly<R: Rng>(rng: &mut R, max_degree: usize, height: i64) -> IntPoly {
    let d = rng.gen_range(0..=max_degree);
    IntPoly::new(
        (0..=d)
            .map(|_| BigInt::from(rng.gen_range(-height..=height)))
            .collect(),
    )
}

pub fn ring<R: Rng>(rng: &mut R, max_degree: usize, height: i64, max_pole: u32) -> RingElement {
    let a = rng.gen_range(0..=max_pole);
    let b = rng.gen_range(0..=max_pole);
    RingElement::canon(poly(rng, max_degree, height), a, b)
}

/// An element supported in a window of at most `width` consecutive indices.
pub fn group<R: Rng>(
    rng: &mut R,
    width: usize,
    max_degree: usize,
    height: i64,
    max_pole: u32,
) -> GroupElement {
    let w = rng.gen_range(1..=width.max(1)) as i64;
    let start = rng.gen_range(-4..=4) - w / 2;
    GroupElement::from_entries(
        (start..start + w).map(|n| (n, ring(rng, max_degree, height, max_pole))),
    )
    .expect("small indices")
}

/// A ring element positive on all of `(0, 1)`: a nonzero non-negative
/// combination of `t^i (1-t)^j` over a random pole denominator.
pub fn universally_positive<R: Rng>(rng: &mut R, max_degree: usize, height: i64) -> RingElement {
    let d = rng.gen_range(0..=max_degree);
    let omt = IntPoly::one_minus_t();
    let mut num = IntPoly::zero();
    while num.is_zero() {
        for i in 0..=d {
            let c = rng.gen_range(0..=height);
            if c > 0 {
                let term = omt.pow((d - i) as u32).shift(i).scale(&BigInt::from(c));
                num = &num + &term;
            }
        }
    }
    RingElement::canon(num, rng.gen_range(0..=2), rng.gen_range(0..=2))
}

/// A nonzero element of `G+` for every spec, built from universally positive
/// entries.
pub fn positive_group<R: Rng>(rng: &mut R, width: usize) -> GroupElement {
    let w = rng.gen_range(1..=width.max(1)) as i64;
    let start = rng.gen_range(-2..=2);
    GroupElement::from_entries((start..start + w).map(|n| (n, universally_positive(rng, 3, 4))))
        .expect("small indices")
}

/// A rational in `(0, 1)` with denominator at most `max_den`.
pub fn unit_rational<R: Rng>(rng: &mut R, max_den: i64) -> Rational {
    let d = rng.gen_range(2..=max_den.max(2));
    rat(rng.gen_range(1..d), d)
}

/// Up to `max_components` random points and intervals with small denominators.
pub fn param_set<R: Rng>(rng: &mut R, max_components: usize, max_den: i64) -> ParamSet {
    let k = rng.gen_range(1..=max_components.max(1));
    let mut points = Vec::new();
    let mut intervals = Vec::new();
    for _ in 0..k {
        let a = unit_rational(rng, max_den);
        if rng.gen_bool(0.3) {
            points.push(a);
        } else {
            let mut b = unit_rational(rng, max_den);
            while b == a {
                b = unit_rational(rng, max_den);
            }
            intervals.push(if a < b { (a, b) } else { (b, a) });
        }
    }
    ParamSet::normalize(points, intervals).expect("points inside (0, 1)")
}

/// A valid spec: `F` and `F1` random, with `1/2` put into both or removed
/// from both by adjoining it.
pub fn spec<R: Rng>(rng: &mut R) -> KmsSpec {
    loop {
        let f = param_set(rng, 3, 12);
        let f1 = if rng.gen_bool(0.1) {
            ParamSet::empty()
        } else {
            param_set(rng, 3, 12)
        };
        let h = ParamSet::point(half()).expect("1/2");
        let (f, f1) = match (f.contains_half(), f1.contains_half()) {
            (true, false) => (f, f1.union(&h)),
            (false, true) => (f.union(&h), f1),
            _ => (f, f1),
        };
        if let Ok(s) = validate_spec(f, f1) {
            return s;
        }
    }
}

/// The fixed specs used by the interpolation and cone replays.
pub fn benchmark_specs() -> Vec<(&'static str, KmsSpec)> {
    let h = || ParamSet::point(half()).expect("1/2");
    let iv = |a: (i64, i64), b: (i64, i64)| {
        ParamSet::interval(rat(a.0, a.1), rat(b.0, b.1)).expect("interval")
    };
    let pt = |a: i64, b: i64| ParamSet::point(rat(a, b)).expect("point");
    let two = iv((1, 5), (1, 3)).union(&iv((3, 5), (4, 5)));
    [
        ("half", h(), h()),
        ("middle", iv((1, 4), (3, 4)), iv((1, 4), (3, 4))),
        ("disjoint", iv((1, 3), (2, 5)), iv((1, 8), (1, 5))),
        ("two-intervals", two.clone(), two),
        ("mixed", h().union(&iv((1, 10), (1, 5))), h().union(&pt(2, 3))),
        ("empty-f1", iv((1, 10), (1, 4)), ParamSet::empty()),
    ]
    .into_iter()
    .map(|(name, f, f1)| (name, validate_spec(f, f1).expect("valid spec")))
    .collect()
}

/// Four elements `x1, x2 <= y1, y2`: `x^i = m - p_i` and `y^j = m + q_j`.
pub fn riesz_quadruple<R: Rng>(rng: &mut R) -> [GroupElement; 4] {
    let m = group(rng, 3, 2, 3, 1);
    let mut parts: Vec<GroupElement> = (0..4).map(|_| positive_group(rng, 2)).collect();
    // occasionally reuse a summand so some differences coincide
    if rng.gen_bool(0.2) {
        parts[1] = parts[0].clone();
    }
    [
        &m - &parts[0],
        &m - &parts[1],
        &m + &parts[2],
        &m + &parts[3],
    ]
}

/// An element of `G++` outside `G+` for `spec`, obtained by adding a
/// coboundary to a universally positive element; `None` when no attempt
/// leaves `G+` (for instance when `F1` is empty).
pub fn cone_instance<R: Rng>(rng: &mut R, spec: &KmsSpec, attempts: usize) -> Option<GroupElement> {
    if spec.f1().is_empty() {
        return None;
    }
    for _ in 0..attempts {
        let p = positive_group(rng, 2);
        let scale = BigInt::from(rng.gen_range(2..=40));
        let z = group(rng, 2, 2, 3, 1).scale(&scale);
        let x = &p + &z.coboundary();
        if !x.is_zero() && !in_g_plus(&x, spec).member {
            return Some(x);
        }
    }
    None
}

/// A compact set of inverse temperatures with at most `max_components`
/// components and endpoints in `[-bound, bound]`.
pub fn beta_set<R: Rng>(rng: &mut R, max_components: usize, bound: f64) -> BetaSet {
    let k = rng.gen_range(1..=max_components.max(1));
    let mut out = BetaSet::default();
    for _ in 0..k {
        let a = rng.gen_range(-bound..=bound);
        if rng.gen_bool(0.4) {
            out.points.push(a);
        } else {
            let b = rng.gen_range(-bound..=bound);
            out.intervals.push((a.min(b), a.max(b)));
        }
    }
    out
}
