//! Integer polynomials squeezed strictly between given bounds on a parameter set.
//!
//! The search solves a slack-maximizing linear program on a rational grid,
//! rounds the real coefficients to integers and then verifies every candidate
//! exactly with the positivity oracle. Only the exact verification carries
//! correctness; grid density, degree and rounding are heuristics.
//!
//! Candidates are written as `sum_i c_i t^i (1-t)^(d-i)` with integer `c_i`.
//! Those products form a Z-basis of the integer polynomials of degree `<= d`,
//! and rounding `c_i` moves the value at `t` by at most
//! `rho_d(t) / 2 = sum_i t^i (1-t)^(d-i) / 2`, which decays geometrically in
//! `d` away from `0` and `1`. The linear program therefore maximizes the
//! slack measured in units of `|weight| * rho_d`; a slack of at least `1/2`
//! means plain rounding stays inside the bounds on the grid.

use microlp::{ComparisonOp, OptimizationDirection, Problem};
use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::param_set::{Component, ParamSet};
use crate::poly::IntPoly;
use crate::positivity::{is_positive_on, PositivityCertificate, Witness};
use crate::rational::{binomial, format_rational, from_f64, half, to_f64, Rational};
use crate::ring::RingElement;

/// One requirement `lower < weight * a < upper` on the whole set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SandwichConstraint {
    pub lower: RingElement,
    pub weight: RingElement,
    pub upper: RingElement,
}

impl SandwichConstraint {
    pub fn new(lower: RingElement, upper: RingElement) -> Self {
        SandwichConstraint {
            lower,
            weight: RingElement::one(),
            upper,
        }
    }

    pub fn weighted(lower: RingElement, weight: RingElement, upper: RingElement) -> Self {
        SandwichConstraint {
            lower,
            weight,
            upper,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SandwichProblem {
    pub constraints: Vec<SandwichConstraint>,
    pub set: ParamSet,
    pub max_degree: usize,
    pub max_iterations: usize,
}

/// Degree and iteration caps shared by the searches built on the sandwich.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchCaps {
    pub max_degree: usize,
    pub max_iterations: usize,
}

pub const MAX_DEGREE_ENV: &str = "DGLAB_MAX_DEGREE";

impl Default for SearchCaps {
    fn default() -> Self {
        SearchCaps {
            max_degree: 32,
            max_iterations: 64,
        }
    }
}

impl SearchCaps {
    /// Defaults, with the degree cap taken from `DGLAB_MAX_DEGREE` when set.
    pub fn from_env() -> Self {
        let mut caps = Self::default();
        if let Some(d) = std::env::var(MAX_DEGREE_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
        {
            caps.max_degree = d;
        }
        caps
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SandwichSolution {
    pub candidate: IntPoly,
    /// Certificates for `weight * a - lower > 0` and `upper - weight * a > 0`, per constraint.
    pub certificates: Vec<(PositivityCertificate, PositivityCertificate)>,
    pub degree: usize,
    pub iterations: usize,
}

const INITIAL_DENSITY: usize = 64;
const GRID_DOUBLINGS: usize = 2;
const DEGREE_STEPS: [usize; 20] = [
    0, 1, 2, 3, 4, 6, 8, 10, 12, 16, 20, 24, 28, 32, 40, 48, 64, 96, 128, 256,
];
// LP box for Chebyshev coefficients, relative to the size of the bounds, and the slack cap
const COEFF_BOX: f64 = 1e6;
const SLACK_CAP: f64 = 4.0;
const REGULARIZATION: f64 = 1e-7;

pub fn solve_sandwich(p: &SandwichProblem) -> Result<SandwichSolution> {
    check_feasible(p)?;
    if p.set.is_empty() {
        return Ok(SandwichSolution {
            candidate: IntPoly::zero(),
            certificates: Vec::new(),
            degree: 0,
            iterations: 0,
        });
    }

    let mut degrees: Vec<usize> = DEGREE_STEPS
        .iter()
        .copied()
        .filter(|&d| d <= p.max_degree)
        .collect();
    if !degrees.contains(&p.max_degree) {
        degrees.push(p.max_degree);
    }

    let mut iterations = 0;
    for &d in &degrees {
        for level in 0..=GRID_DOUBLINGS {
            iterations += 1;
            if iterations > p.max_iterations {
                return Err(exhausted(p, iterations - 1, d));
            }
            let grid = Grid::build(p, INITIAL_DENSITY << level);
            if grid.rows.is_empty() {
                // every weight vanishes on the set and the exact check already passed
                let zero = IntPoly::zero();
                if let Some(certificates) = verify(p, &zero) {
                    return Ok(SandwichSolution {
                        candidate: zero,
                        certificates,
                        degree: 0,
                        iterations,
                    });
                }
            }
            let Some((real, slack)) = solve_lp(&grid, &p.set, d, None) else {
                break;
            };
            if slack <= 0.0 {
                // a finer grid only adds constraints
                break;
            }
            let fine = Grid::build(p, INITIAL_DENSITY << (level + 2));
            let product = real.product_coefficients();
            let screened = rounding_neighborhood(&product)
                .into_iter()
                .filter(|(_, offsets)| grid.admits(&real, offsets) && fine.admits(&real, offsets))
                .map(|(cand, _)| expand(&cand));
            for poly in screened {
                if let Some(certificates) = verify(p, &poly) {
                    return Ok(SandwichSolution {
                        candidate: poly,
                        certificates,
                        degree: d,
                        iterations,
                    });
                }
            }
            if let Some(poly) = fix_and_resolve(p, &grid, d, real) {
                if let Some(certificates) = verify(p, &poly) {
                    return Ok(SandwichSolution {
                        candidate: poly,
                        certificates,
                        degree: d,
                        iterations,
                    });
                }
            }
        }
    }
    Err(exhausted(p, iterations, p.max_degree))
}

fn exhausted(p: &SandwichProblem, iterations: usize, degree: usize) -> Error {
    Error::SearchExhausted(format!(
        "no verified candidate after {iterations} iterations (degree reached {degree}, cap {}, iteration cap {})",
        p.max_degree, p.max_iterations
    ))
}

/// Strict gap on the set for every constraint, and `lower < 0 < upper`
/// wherever a weight vanishes at a rational point of the set.
fn check_feasible(p: &SandwichProblem) -> Result<()> {
    for (i, c) in p.constraints.iter().enumerate() {
        let gap = &c.upper - &c.lower;
        let cert = is_positive_on(&gap, &p.set);
        if !cert.is_positive() {
            let at = match &cert.witness {
                Some(Witness::Point { t, .. }) => format!(" at t = {}", format_rational(t)),
                Some(Witness::Interval { lo, hi, .. }) => {
                    format!(" in ({}, {}]", format_rational(lo), format_rational(hi))
                }
                None => String::new(),
            };
            return Err(Error::Infeasible(format!(
                "constraint {i}: upper - lower is not positive{at}"
            )));
        }
        let mut vanishing: Vec<Rational> = p
            .set
            .points()
            .iter()
            .filter(|t| c.weight.sign_at(t) == 0)
            .cloned()
            .collect();
        if p.set.contains_half() && c.weight.sign_at(&half()) == 0 {
            vanishing.push(half());
        }
        for t in vanishing {
            if c.lower.sign_at(&t) >= 0 || c.upper.sign_at(&t) <= 0 {
                return Err(Error::Infeasible(format!(
                    "constraint {i}: weight vanishes at t = {} but lower < 0 < upper fails there",
                    format_rational(&t)
                )));
            }
        }
    }
    Ok(())
}

/// Grid rows `(t, weight(t), lower(t), upper(t))` for every constraint; rows
/// of vanishing weight are dropped since their condition was checked exactly.
struct Grid {
    rows: Vec<(f64, f64, f64, f64)>,
    /// Exact abscissa of every row.
    ts: Vec<Rational>,
}

impl Grid {
    fn build(p: &SandwichProblem, density: usize) -> Grid {
        let mut ts: Vec<Rational> = Vec::new();
        for comp in p.set.components() {
            match comp {
                Component::Point(t) => ts.push(t.clone()),
                Component::Interval(lo, hi) => {
                    let step = (hi - lo) / Rational::from_integer(BigInt::from(density));
                    for k in 0..=density {
                        ts.push(lo + &step * Rational::from_integer(BigInt::from(k)));
                    }
                }
            }
        }
        let mut rows = Vec::with_capacity(ts.len() * p.constraints.len());
        let mut exact = Vec::with_capacity(rows.capacity());
        for t in &ts {
            let tf = to_f64(t);
            for c in &p.constraints {
                let w = c.weight.eval_unchecked(t);
                if w.is_zero() {
                    continue;
                }
                rows.push((
                    tf,
                    to_f64(&w),
                    to_f64(&c.lower.eval_unchecked(t)),
                    to_f64(&c.upper.eval_unchecked(t)),
                ));
                exact.push(t.clone());
            }
        }
        Grid { rows, ts: exact }
    }

    /// Rows for the remaining part `r` in `a = fixed + m * r`.
    fn residual(&self, fixed: &[Rational], m: &[f64]) -> Grid {
        let rows = self
            .rows
            .iter()
            .zip(fixed)
            .zip(m)
            .map(|((&(t, w, lo, hi), f), &m)| {
                let wf = w * to_f64(f);
                (t, w * m, lo - wf, hi - wf)
            })
            .collect();
        Grid {
            rows,
            ts: self.ts.clone(),
        }
    }

    /// Float screen of `weight * (real + sum_i delta_i t^i (1-t)^(d-i))`.
    fn admits(&self, real: &Chebyshev, deltas: &[f64]) -> bool {
        let d = deltas.len() - 1;
        self.rows.iter().all(|&(t, w, lo, hi)| {
            let shift: f64 = product_basis(d, t).iter().zip(deltas).map(|(b, e)| b * e).sum();
            let v = w * (real.eval(t) + shift);
            lo < v && v < hi
        })
    }
}

/// Values of `t^i (1-t)^(d-i)` for `i = 0..=d`.
fn product_basis(d: usize, t: f64) -> Vec<f64> {
    let s = 1.0 - t;
    let mut out = vec![0.0; d + 1];
    let mut tp = 1.0;
    for (i, v) in out.iter_mut().enumerate() {
        *v = tp * s.powi((d - i) as i32);
        tp *= t;
    }
    out
}

/// A real polynomial in the Chebyshev basis of the hull `[lo, hi]` of the set.
#[derive(Debug, Clone)]
struct Chebyshev {
    lo: Rational,
    hi: Rational,
    coeffs: Vec<f64>,
}

impl Chebyshev {
    fn hull(set: &ParamSet) -> (Rational, Rational) {
        let lo = set.min().expect("non-empty set").clone();
        let hi = set.max().expect("non-empty set").clone();
        if hi > lo {
            return (lo, hi);
        }
        // single point: any small window keeps the map affine
        let pad = Rational::new(1.into(), 64.into());
        (&lo - &pad, &hi + &pad)
    }

    fn basis(lo: f64, hi: f64, d: usize, t: f64) -> Vec<f64> {
        let x = (2.0 * t - lo - hi) / (hi - lo);
        let mut out = Vec::with_capacity(d + 1);
        out.push(1.0);
        if d >= 1 {
            out.push(x);
        }
        for k in 2..=d {
            out.push(2.0 * x * out[k - 1] - out[k - 2]);
        }
        out
    }

    fn eval(&self, t: f64) -> f64 {
        let d = self.coeffs.len() - 1;
        Self::basis(to_f64(&self.lo), to_f64(&self.hi), d, t)
            .iter()
            .zip(&self.coeffs)
            .map(|(b, c)| b * c)
            .sum()
    }

    /// Exact coefficients `c_i` with `self = sum_i c_i t^i (1-t)^(d-i)`.
    fn product_coefficients(&self) -> Vec<Rational> {
        let d = self.coeffs.len() - 1;
        // x(t) = scale * t + offset maps the hull onto [-1, 1]
        let width = &self.hi - &self.lo;
        let two = Rational::from_integer(2.into());
        let scale = &two / &width;
        let offset = -(&self.lo + &self.hi) / &width;
        let x = vec![offset, scale];

        let mut monomial = vec![Rational::zero(); d + 1];
        let mut prev: Vec<Rational> = vec![Rational::one()];
        let mut cur: Vec<Rational> = x.clone();
        for (k, g) in self.coeffs.iter().enumerate() {
            let g = from_f64(*g).expect("finite coefficient");
            let tk = match k {
                0 => &prev,
                1 => &cur,
                _ => {
                    // T_k = 2 x T_{k-1} - T_{k-2}
                    let mut next = vec![Rational::zero(); k + 1];
                    for (i, c) in cur.iter().enumerate() {
                        for (j, xj) in x.iter().enumerate() {
                            next[i + j] += &two * c * xj;
                        }
                    }
                    for (i, c) in prev.iter().enumerate() {
                        next[i] -= c;
                    }
                    prev = std::mem::replace(&mut cur, next);
                    &cur
                }
            };
            if !g.is_zero() {
                for (i, c) in tk.iter().enumerate() {
                    monomial[i] += &g * c;
                }
            }
        }
        // t^k = sum_j binom(d-k, j) t^(k+j) (1-t)^(d-k-j)
        let mut out = vec![Rational::zero(); d + 1];
        for (k, a) in monomial.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for j in 0..=(d - k) {
                out[k + j] += a * Rational::from_integer(binomial(d - k, j));
            }
        }
        out
    }
}

/// Maximizes the slack `s` with
/// `lower + s |w| rho_d <= w * P <= upper - s |w| rho_d` on the grid, for a
/// real polynomial `P` of degree `d` in the Chebyshev basis of the hull.
/// `units` replaces `rho_d` row by row when given.
fn solve_lp(
    grid: &Grid,
    set: &ParamSet,
    d: usize,
    units: Option<&[f64]>,
) -> Option<(Chebyshev, f64)> {
    let (lo, hi) = Chebyshev::hull(set);
    let (lof, hif) = (to_f64(&lo), to_f64(&hi));
    let bound = grid
        .rows
        .iter()
        .map(|&(_, w, l, u)| l.abs().max(u.abs()) / w.abs())
        .fold(1.0, f64::max);
    let mut lp = Problem::new(OptimizationDirection::Maximize);
    let box_ = COEFF_BOX * bound;
    // each coefficient is split into positive and negative parts so that a
    // tiny l1 penalty picks small coefficients among equally good slacks
    let penalty = -REGULARIZATION / bound;
    let vars: Vec<_> = (0..=d)
        .map(|_| (lp.add_var(penalty, (0.0, box_)), lp.add_var(penalty, (0.0, box_))))
        .collect();
    let slack = lp.add_var(1.0, (-f64::INFINITY, SLACK_CAP));

    for (row, &(t, w, l, u)) in grid.rows.iter().enumerate() {
        let basis = Chebyshev::basis(lof, hif, d, t);
        let rho: f64 = match units {
            Some(units) => units[row],
            None => product_basis(d, t).iter().sum(),
        };
        // rows are normalized by |w| so every constraint lives on the scale of P
        let sgn = w.signum();
        let (lower, upper) = if sgn > 0.0 { (l / w, u / w) } else { (u / w, l / w) };
        let mut expr: Vec<_> = vars
            .iter()
            .zip(&basis)
            .flat_map(|(&(pos, neg), &b)| [(pos, b), (neg, -b)])
            .collect();
        expr.push((slack, -rho));
        lp.add_constraint(expr.as_slice(), ComparisonOp::Ge, lower);
        let last = expr.len() - 1;
        expr[last].1 = rho;
        lp.add_constraint(expr.as_slice(), ComparisonOp::Le, upper);
    }

    let solution = lp.solve().ok()?.into_solution().ok()?;
    let coeffs = vars
        .iter()
        .map(|&(pos, neg)| solution.var_value(pos) - solution.var_value(neg))
        .collect();
    Some((Chebyshev { lo, hi, coeffs }, solution.var_value(slack)))
}

/// Rounds one coefficient at a time and re-solves for the free ones, so each
/// rounding error is absorbed by the rest. Coefficients are fixed starting
/// from the end of the basis nearest to the set, where the basis functions
/// are largest.
fn fix_and_resolve(p: &SandwichProblem, grid: &Grid, d: usize, start: Chebyshev) -> Option<IntPoly> {
    let from_low = &start.lo + &start.hi < Rational::one();
    // t^i and (1-t)^i for every row
    let powers: Vec<(Vec<Rational>, Vec<Rational>)> = grid
        .ts
        .iter()
        .map(|t| {
            let s = Rational::one() - t;
            let mut tp = vec![Rational::one()];
            let mut sp = vec![Rational::one()];
            for i in 0..d {
                tp.push(&tp[i] * t);
                sp.push(&sp[i] * &s);
            }
            (tp, sp)
        })
        .collect();
    let mut coeffs = vec![BigInt::zero(); d + 1];
    let mut fixed = vec![Rational::zero(); grid.rows.len()];
    let mut real = start;
    for step in 0..=d {
        let e = d - step;
        let product = real.product_coefficients();
        let (local, global) = if from_low { (0, step) } else { (e, d - step) };
        let c = product[local].round().to_integer();
        if !c.is_zero() {
            let cr = Rational::from_integer(c.clone());
            for (f, (tp, sp)) in fixed.iter_mut().zip(&powers) {
                *f += &cr * &tp[global] * &sp[d - global];
            }
        }
        coeffs[global] = c;
        if e == 0 {
            break;
        }
        let k = step + 1;
        let m: Vec<f64> = powers
            .iter()
            .map(|(tp, sp)| to_f64(if from_low { &tp[k] } else { &sp[k] }))
            .collect();
        let sub = grid.residual(&fixed, &m);
        // keep measuring the margin in units of the full rho_d
        let units: Vec<f64> = sub
            .rows
            .iter()
            .zip(&m)
            .map(|(&(t, ..), &m)| product_basis(d, t).iter().sum::<f64>() / m)
            .collect();
        let (next, slack) = solve_lp(&sub, &p.set, e - 1, Some(&units))?;
        if slack <= 0.0 {
            return None;
        }
        real = next;
    }
    Some(expand(&coeffs))
}

/// Integer coefficients near the real ones: nearest rounding first, then
/// single flips of the most ambiguous coefficients. Each candidate carries
/// its offsets `c_int - c_real` for float screening.
fn rounding_neighborhood(real: &[Rational]) -> Vec<(Vec<BigInt>, Vec<f64>)> {
    let base: Vec<BigInt> = real.iter().map(|c| c.round().to_integer()).collect();
    let offsets = |ints: &[BigInt]| -> Vec<f64> {
        ints.iter()
            .zip(real)
            .map(|(i, r)| to_f64(&(Rational::from_integer(i.clone()) - r)))
            .collect()
    };
    let base_off = offsets(&base);
    let mut order: Vec<usize> = (0..real.len()).filter(|&i| base_off[i] != 0.0).collect();
    // most ambiguous first: offset closest to +-1/2
    order.sort_by(|&a, &b| {
        (0.5 - base_off[a].abs())
            .total_cmp(&(0.5 - base_off[b].abs()))
            .then(a.cmp(&b))
    });
    let mut out = vec![(base.clone(), base_off.clone())];
    for i in order {
        let mut alt = base.clone();
        if base_off[i] > 0.0 {
            alt[i] -= 1;
        } else {
            alt[i] += 1;
        }
        let off = offsets(&alt);
        out.push((alt, off));
    }
    out
}

/// Exact monomial form of `sum_i c_i t^i (1-t)^(d-i)`.
fn expand(coeffs: &[BigInt]) -> IntPoly {
    let d = coeffs.len() - 1;
    let omt = IntPoly::one_minus_t();
    let mut acc = IntPoly::zero();
    for (i, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let term = omt.pow((d - i) as u32).shift(i).scale(c);
        acc = &acc + &term;
    }
    acc
}

/// Exact check of every constraint for candidate `a`.
pub fn verify(
    p: &SandwichProblem,
    a: &IntPoly,
) -> Option<Vec<(PositivityCertificate, PositivityCertificate)>> {
    let a = RingElement::from_poly(a.clone());
    let mut out = Vec::with_capacity(p.constraints.len());
    for c in &p.constraints {
        let wa = &c.weight * &a;
        let below = is_positive_on(&(&wa - &c.lower), &p.set);
        if !below.is_positive() {
            return None;
        }
        let above = is_positive_on(&(&c.upper - &wa), &p.set);
        if !above.is_positive() {
            return None;
        }
        out.push((below, above));
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::param_set::interval_of;

    fn p(c: &[i64]) -> RingElement {
        RingElement::from_poly(IntPoly::from_i64(c))
    }

    fn problem(constraints: Vec<SandwichConstraint>, set: ParamSet) -> SandwichProblem {
        SandwichProblem {
            constraints,
            set,
            max_degree: 32,
            max_iterations: 64,
        }
    }

    #[test]
    fn constant_between_zero_and_two() {
        let pr = problem(
            vec![SandwichConstraint::new(p(&[0]), p(&[2]))],
            interval_of((1, 4), (3, 4)),
        );
        let s = solve_sandwich(&pr).unwrap();
        assert_eq!(s.candidate, IntPoly::from_i64(&[1]));
    }

    #[test]
    fn linear_bounds() {
        let pr = problem(
            vec![SandwichConstraint::new(p(&[0, 1]), p(&[2, 1]))],
            interval_of((1, 4), (3, 4)),
        );
        let s = solve_sandwich(&pr).unwrap();
        assert!(verify(&pr, &s.candidate).is_some());
    }

    #[test]
    fn vanishing_weight_at_half() {
        // -1/4 < w * a < 1/4 scaled by 4: -1 < 4 w a < 1
        let w = RingElement::riesz_weight().scale(&BigInt::from(4));
        let pr = problem(
            vec![SandwichConstraint::weighted(p(&[-1]), w, p(&[1]))],
            ParamSet::point(half()).unwrap(),
        );
        let s = solve_sandwich(&pr).unwrap();
        assert!(s.candidate.is_zero() || verify(&pr, &s.candidate).is_some());
    }

    #[test]
    fn infeasible_gap_reported() {
        let pr = problem(
            vec![SandwichConstraint::new(p(&[1]), p(&[0, 2]))],
            interval_of((1, 4), (3, 4)),
        );
        assert!(matches!(solve_sandwich(&pr), Err(Error::Infeasible(_))));
    }

    #[test]
    fn infeasible_at_vanishing_weight() {
        let pr = problem(
            vec![SandwichConstraint::weighted(
                p(&[1]),
                RingElement::riesz_weight(),
                p(&[2]),
            )],
            interval_of((1, 4), (3, 4)),
        );
        assert!(matches!(solve_sandwich(&pr), Err(Error::Infeasible(_))));
    }

    #[test]
    fn narrow_gap_needs_non_constant() {
        // 1/3 +- 1/64 on [1/4, 3/4], scaled by 192: 63 < 192 a < 65
        let pr = problem(
            vec![SandwichConstraint::new(p(&[63]), p(&[65]))]
                .into_iter()
                .map(|c| SandwichConstraint::weighted(c.lower, p(&[192]), c.upper))
                .collect(),
            interval_of((1, 4), (3, 4)),
        );
        let s = solve_sandwich(&pr).unwrap();
        assert!(s.degree > 0);
        assert!(verify(&pr, &s.candidate).is_some());
    }

    #[test]
    fn deterministic() {
        let pr = problem(
            vec![SandwichConstraint::weighted(p(&[5]), p(&[16]), p(&[7]))],
            interval_of((1, 3), (2, 3)),
        );
        let a = solve_sandwich(&pr).unwrap();
        let b = solve_sandwich(&pr).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn caps_exhaust() {
        let mut pr = problem(
            vec![SandwichConstraint::weighted(p(&[63]), p(&[192]), p(&[65]))],
            interval_of((1, 4), (3, 4)),
        );
        pr.max_degree = 0;
        assert!(matches!(solve_sandwich(&pr), Err(Error::SearchExhausted(_))));
    }
}
