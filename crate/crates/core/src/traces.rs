//! Evaluation-type trace functionals on `G`, atomic measures, eigen-functionals
//! of `gamma_star` and the inverse-temperature spectrum.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::param_set::{BetaComponent, KmsSpec, ParamSet};
use crate::rational::{format_rational, in_open_unit, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TraceKind {
    /// `x -> sum_n x_n(t0)`
    Plain,
    /// `x -> sum_n (t0 / (1 - t0))^n x_n(t0)`
    Twisted,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceFunctional {
    kind: TraceKind,
    t0: Rational,
}

impl TraceFunctional {
    pub fn new(kind: TraceKind, t0: Rational) -> Result<Self> {
        if !in_open_unit(&t0) {
            return Err(Error::Domain(format!(
                "t0 = {} is outside (0, 1)",
                format_rational(&t0)
            )));
        }
        Ok(TraceFunctional { kind, t0 })
    }

    pub fn kind(&self) -> TraceKind {
        self.kind
    }

    pub fn t0(&self) -> &Rational {
        &self.t0
    }

    /// `t0 / (1 - t0)`, the factor by which a plain trace scales under `gamma_star`.
    pub fn ratio(&self) -> Rational {
        &self.t0 / (Rational::one() - &self.t0)
    }

    pub fn apply(&self, x: &GroupElement) -> Rational {
        let r = self.ratio();
        x.entries()
            .iter()
            .map(|(&n, v)| {
                let value = v.eval_unchecked(&self.t0);
                match self.kind {
                    TraceKind::Plain => value,
                    TraceKind::Twisted => value * pow_i64(&r, n),
                }
            })
            .sum()
    }

    /// `(apply(gamma_star x), expected)` where the expectation is
    /// `ratio * apply(x)` for plain traces and `apply(x)` for twisted ones.
    pub fn scaling_check(&self, x: &GroupElement) -> (Rational, Rational) {
        let lhs = self.apply(&x.gamma_star(1));
        let base = self.apply(x);
        let rhs = match self.kind {
            TraceKind::Plain => self.ratio() * base,
            TraceKind::Twisted => base,
        };
        (lhs, rhs)
    }
}

impl fmt::Display for TraceFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            TraceKind::Plain => "PLAIN",
            TraceKind::Twisted => "TWISTED",
        };
        write!(f, "{kind} at t0 = {}", format_rational(&self.t0))
    }
}

fn pow_i64(r: &Rational, n: i64) -> Rational {
    let p = num_traits::pow(r.clone(), n.unsigned_abs() as usize);
    if n < 0 {
        p.recip()
    } else {
        p
    }
}

/// A finite positive combination of point masses in `(0, 1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomicMeasure {
    atoms: Vec<(Rational, Rational)>,
}

impl AtomicMeasure {
    pub fn new(atoms: Vec<(Rational, Rational)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::Domain("a measure needs at least one atom".into()));
        }
        for (i, (t, w)) in atoms.iter().enumerate() {
            if !in_open_unit(t) {
                return Err(Error::Domain(format!(
                    "atom {} is outside (0, 1)",
                    format_rational(t)
                )));
            }
            if !w.is_positive() {
                return Err(Error::Domain(format!(
                    "atom {} has non-positive weight {}",
                    format_rational(t),
                    format_rational(w)
                )));
            }
            if atoms[..i].iter().any(|(s, _)| s == t) {
                return Err(Error::Domain(format!(
                    "atom {} appears twice",
                    format_rational(t)
                )));
            }
        }
        Ok(AtomicMeasure { atoms })
    }

    pub fn atoms(&self) -> &[(Rational, Rational)] {
        &self.atoms
    }
}

/// `sum_i w_i * twisted_{t_i}(x)`, with every atom required to lie in `f`.
pub fn measure_trace(m: &AtomicMeasure, f: &ParamSet, x: &GroupElement) -> Result<Rational> {
    let mut total = Rational::zero();
    for (t, w) in &m.atoms {
        if !f.member(t) {
            return Err(Error::AtomOutsideF(format_rational(t)));
        }
        let tf = TraceFunctional::new(TraceKind::Twisted, t.clone())?;
        total += w * tf.apply(x);
    }
    Ok(total)
}

/// Outcome of looking for `phi` with `phi(gamma_star x) = s phi(x)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Eigenfunctional {
    /// The plain trace at `t' = s / (1 + s)`, unique up to a positive scalar.
    Constructed(TraceFunctional),
    /// `t'` is not in `F1`. Nonexistence is the converse half of the
    /// classification of positive eigen-functionals and is not re-proven here.
    Absent { t_prime: Rational },
}

pub fn classify_eigenfunctional(s: &Rational, spec: &KmsSpec) -> Result<Eigenfunctional> {
    if !s.is_positive() || s.is_one() {
        return Err(Error::Precondition(format!(
            "s must be positive and different from 1, got {}",
            format_rational(s)
        )));
    }
    let t_prime = s / (Rational::one() + s);
    if spec.f1().member(&t_prime) {
        Ok(Eigenfunctional::Constructed(TraceFunctional::new(
            TraceKind::Plain,
            t_prime,
        )?))
    } else {
        Ok(Eigenfunctional::Absent { t_prime })
    }
}

/// `{beta : e^-beta / (1 + e^-beta) in F1} ∪ {0}` in both coordinates.
pub fn kms_spectrum(spec: &KmsSpec) -> Vec<BetaComponent> {
    spec.beta_description().to_vec()
}
