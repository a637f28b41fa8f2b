//! Closed subsets of `(0, 1)` built from finitely many rational points and
//! closed intervals, the admissible pairs `(F, F1)`, and the change of
//! coordinates between inverse temperature `beta` and `t = e^-beta / (1 + e^-beta)`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{format_rational, from_f64, half, in_open_unit, rat, to_f64, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ParamSet {
    points: Vec<Rational>,
    intervals: Vec<(Rational, Rational)>,
}

/// One connected piece of a [`ParamSet`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Component<'a> {
    Point(&'a Rational),
    Interval(&'a Rational, &'a Rational),
}

impl ParamSet {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn point(p: Rational) -> Result<Self> {
        Self::normalize(vec![p], vec![])
    }

    pub fn interval(lo: Rational, hi: Rational) -> Result<Self> {
        Self::normalize(vec![], vec![(lo, hi)])
    }

    /// Sorted, merged and deduplicated form of the union of `points` and `intervals`.
    pub fn normalize(points: Vec<Rational>, intervals: Vec<(Rational, Rational)>) -> Result<Self> {
        let check = |q: &Rational| {
            if in_open_unit(q) {
                Ok(())
            } else {
                Err(Error::Domain(format!(
                    "{} is not strictly inside (0, 1)",
                    format_rational(q)
                )))
            }
        };
        let mut pts = Vec::new();
        let mut ivs = Vec::new();
        for p in points {
            check(&p)?;
            pts.push(p);
        }
        for (lo, hi) in intervals {
            check(&lo)?;
            check(&hi)?;
            if lo > hi {
                return Err(Error::Domain(format!(
                    "interval [{}, {}] has lo > hi",
                    format_rational(&lo),
                    format_rational(&hi)
                )));
            }
            if lo == hi {
                pts.push(lo);
            } else {
                ivs.push((lo, hi));
            }
        }

        ivs.sort();
        let mut merged: Vec<(Rational, Rational)> = Vec::with_capacity(ivs.len());
        for (lo, hi) in ivs {
            match merged.last_mut() {
                Some(last) if lo <= last.1 => {
                    if hi > last.1 {
                        last.1 = hi;
                    }
                }
                _ => merged.push((lo, hi)),
            }
        }

        pts.sort();
        pts.dedup();
        pts.retain(|p| !merged.iter().any(|(lo, hi)| lo <= p && p <= hi));

        Ok(ParamSet {
            points: pts,
            intervals: merged,
        })
    }

    pub fn points(&self) -> &[Rational] {
        &self.points
    }

    pub fn intervals(&self) -> &[(Rational, Rational)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty() && self.intervals.is_empty()
    }

    pub fn member(&self, t0: &Rational) -> bool {
        self.points.iter().any(|p| p == t0)
            || self.intervals.iter().any(|(lo, hi)| lo <= t0 && t0 <= hi)
    }

    pub fn contains_half(&self) -> bool {
        self.member(&half())
    }

    /// Components in increasing order.
    pub fn components(&self) -> Vec<Component<'_>> {
        let mut out: Vec<Component<'_>> = self
            .points
            .iter()
            .map(Component::Point)
            .chain(self.intervals.iter().map(|(l, h)| Component::Interval(l, h)))
            .collect();
        out.sort_by(|a, b| a.left().cmp(b.left()));
        out
    }

    /// Smallest element of the set.
    pub fn min(&self) -> Option<&Rational> {
        self.components().first().map(|c| c.left())
    }

    /// Largest element of the set.
    pub fn max(&self) -> Option<&Rational> {
        self.components().last().map(|c| c.right())
    }

    /// A deterministic rational element of the set.
    pub fn sample_point(&self) -> Option<Rational> {
        match self.components().first()? {
            Component::Point(p) => Some((*p).clone()),
            Component::Interval(lo, hi) => Some((*lo + *hi) / Rational::from_integer(2.into())),
        }
    }

    pub fn union(&self, other: &ParamSet) -> ParamSet {
        let mut points = self.points.clone();
        points.extend(other.points.iter().cloned());
        let mut intervals = self.intervals.clone();
        intervals.extend(other.intervals.iter().cloned());
        Self::normalize(points, intervals).expect("union of valid sets is valid")
    }
}

impl<'a> Component<'a> {
    pub fn left(&self) -> &'a Rational {
        match self {
            Component::Point(p) => p,
            Component::Interval(lo, _) => lo,
        }
    }

    pub fn right(&self) -> &'a Rational {
        match self {
            Component::Point(p) => p,
            Component::Interval(_, hi) => hi,
        }
    }
}

/// A point or interval in inverse-temperature coordinates together with the
/// exact `t`-coordinates it came from. Note that `beta` decreases as `t` grows.
#[derive(Debug, Clone, PartialEq)]
pub enum BetaComponent {
    Point { beta: f64, t: Rational },
    Interval { lo: f64, hi: f64, t_lo: Rational, t_hi: Rational },
}

impl BetaComponent {
    pub fn lo(&self) -> f64 {
        match self {
            BetaComponent::Point { beta, .. } => *beta,
            BetaComponent::Interval { lo, .. } => *lo,
        }
    }

    pub fn hi(&self) -> f64 {
        match self {
            BetaComponent::Point { beta, .. } => *beta,
            BetaComponent::Interval { hi, .. } => *hi,
        }
    }
}

/// The set `{beta : beta_to_t(beta) in s}` ∪ `{0}`, sorted by `beta`.
pub fn beta_description(s: &ParamSet) -> Vec<BetaComponent> {
    let mut out: Vec<BetaComponent> = s
        .components()
        .into_iter()
        .map(|c| match c {
            Component::Point(p) => BetaComponent::Point {
                beta: t_to_beta_exact(p),
                t: p.clone(),
            },
            Component::Interval(lo, hi) => BetaComponent::Interval {
                lo: t_to_beta_exact(hi),
                hi: t_to_beta_exact(lo),
                t_lo: lo.clone(),
                t_hi: hi.clone(),
            },
        })
        .collect();
    if !s.contains_half() {
        out.push(BetaComponent::Point {
            beta: 0.0,
            t: half(),
        });
    }
    out.sort_by(|a, b| a.lo().total_cmp(&b.lo()));
    out
}

/// A pair `(F, F1)` satisfying the standing hypotheses: `F` is non-empty and
/// `1/2` lies in both sets or in neither.
#[derive(Debug, Clone, PartialEq)]
pub struct KmsSpec {
    f: ParamSet,
    f1: ParamSet,
    beta_description: Vec<BetaComponent>,
}

impl KmsSpec {
    pub fn f(&self) -> &ParamSet {
        &self.f
    }

    pub fn f1(&self) -> &ParamSet {
        &self.f1
    }

    pub fn beta_description(&self) -> &[BetaComponent] {
        &self.beta_description
    }
}

pub fn validate_spec(f: ParamSet, f1: ParamSet) -> Result<KmsSpec> {
    if f.is_empty() {
        return Err(Error::EmptyF);
    }
    match (f.contains_half(), f1.contains_half()) {
        (true, false) => {
            return Err(Error::HalfPointViolation("1/2 is in F but not in F1".into()))
        }
        (false, true) => {
            return Err(Error::HalfPointViolation("1/2 is in F1 but not in F".into()))
        }
        _ => {}
    }
    let beta_description = beta_description(&f1);
    Ok(KmsSpec {
        f,
        f1,
        beta_description,
    })
}

/// `e^-beta / (1 + e^-beta)`.
pub fn beta_to_t(beta: f64) -> f64 {
    if beta >= 0.0 {
        let e = (-beta).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + beta.exp())
    }
}

/// `ln((1 - t) / t)`.
pub fn t_to_beta(t: f64) -> Result<f64> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::Domain(format!("t = {t} is outside (0, 1)")));
    }
    Ok((-t).ln_1p() - t.ln())
}

pub fn t_to_beta_rational(t: &Rational) -> Result<f64> {
    if !in_open_unit(t) {
        return Err(Error::Domain(format!(
            "t = {} is outside (0, 1)",
            format_rational(t)
        )));
    }
    Ok(t_to_beta_exact(t))
}

fn t_to_beta_exact(t: &Rational) -> f64 {
    // the ratio is formed exactly so that t near 1 loses no precision
    let ratio = (Rational::one() - t) / t;
    to_f64(&ratio).ln()
}

/// A compact set of inverse temperatures: finitely many points and bounded
/// closed intervals.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BetaSet {
    pub points: Vec<f64>,
    pub intervals: Vec<(f64, f64)>,
}

/// Result of rationalizing the logistic image of a [`BetaSet`].
#[derive(Debug, Clone, PartialEq)]
pub struct RationalizedSet {
    pub set: ParamSet,
    /// Significant decimal digits kept when rationalizing.
    pub precision: u32,
    /// Largest `|t_exact - t_rational|` over all rationalized endpoints, as a double.
    pub max_rounding_error: f64,
}

/// `{ beta_to_t(beta) : beta in k } ∪ {1/2}` with endpoints rounded to
/// `precision` significant digits; `1/2` is adjoined exactly.
pub fn f1_for_k(k: &BetaSet, precision: u32) -> Result<RationalizedSet> {
    let mut max_err = 0.0f64;
    let mut conv = |beta: f64| -> Result<Rational> {
        if !beta.is_finite() {
            return Err(Error::Domain(format!("beta = {beta} is not finite")));
        }
        let (t, err) = logistic_rational(beta, precision)?;
        max_err = max_err.max(err);
        Ok(t)
    };
    let mut points = vec![half()];
    let mut intervals = Vec::new();
    for &b in &k.points {
        points.push(conv(b)?);
    }
    for &(lo, hi) in &k.intervals {
        if lo > hi {
            return Err(Error::Domain(format!("beta interval [{lo}, {hi}] has lo > hi")));
        }
        // the logistic map is decreasing
        intervals.push((conv(hi)?, conv(lo)?));
    }
    Ok(RationalizedSet {
        set: ParamSet::normalize(points, intervals)?,
        precision,
        max_rounding_error: max_err,
    })
}

fn logistic_rational(beta: f64, digits: u32) -> Result<(Rational, f64)> {
    if beta == 0.0 {
        return Ok((half(), 0.0));
    }
    // round the tail min(t, 1 - t) relative to its own size
    let small = beta_to_t(beta.abs());
    let exact = from_f64(small).expect("finite");
    let rounded = round_significant(&exact, digits);
    if !rounded.is_positive() {
        return Err(Error::Domain(format!(
            "beta = {beta} rounds to the boundary at {digits} digits"
        )));
    }
    let err = to_f64(&(&exact - &rounded).abs());
    let t = if beta > 0.0 {
        rounded
    } else {
        Rational::one() - rounded
    };
    Ok((t, err))
}

fn round_significant(q: &Rational, digits: u32) -> Rational {
    if q.is_zero() {
        return q.clone();
    }
    let mag = to_f64(q).abs().log10().floor() as i64;
    let exp = digits as i64 - 1 - mag;
    let ten = BigInt::from(10u32);
    if exp >= 0 {
        let scale = ten.pow(exp as u32);
        let scaled = q * Rational::from_integer(scale.clone());
        Rational::new(scaled.round().to_integer(), scale)
    } else {
        let scale = Rational::from_integer(ten.pow((-exp) as u32));
        (q / &scale).round() * scale
    }
}

/// Convenience for tests and examples: `[lo, hi]` from small fractions.
pub fn interval_of(lo: (i64, i64), hi: (i64, i64)) -> ParamSet {
    ParamSet::interval(rat(lo.0, lo.1), rat(hi.0, hi.1)).expect("valid interval")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn normalize_absorbs_and_merges() {
        let s = ParamSet::normalize(vec![rat(1, 2)], vec![(rat(1, 4), rat(1, 2))]).unwrap();
        assert_eq!(s.intervals(), &[(rat(1, 4), rat(1, 2))]);
        assert!(s.points().is_empty());

        let s = ParamSet::normalize(vec![], vec![(rat(1, 4), rat(1, 3)), (rat(1, 3), rat(2, 5))])
            .unwrap();
        assert_eq!(s.intervals(), &[(rat(1, 4), rat(2, 5))]);

        assert!(matches!(ParamSet::normalize(vec![int(1)], vec![]), Err(Error::Domain(_))));
        assert!(matches!(
            ParamSet::normalize(vec![], vec![(rat(1, 2), rat(1, 3))]),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn degenerate_interval_becomes_point() {
        let s = ParamSet::interval(rat(1, 3), rat(1, 3)).unwrap();
        assert_eq!(s.points(), &[rat(1, 3)]);
        assert!(s.intervals().is_empty());
    }

    #[test]
    fn membership() {
        assert!(interval_of((1, 4), (3, 4)).member(&rat(1, 2)));
        let p = ParamSet::point(rat(1, 3)).unwrap();
        assert!(p.member(&rat(1, 3)));
        assert!(!p.member(&rat(1, 2)));
    }

    #[test]
    fn spec_validation() {
        let f = ParamSet::point(half()).unwrap();
        let f1 = ParamSet::normalize(vec![half(), rat(1, 3)], vec![]).unwrap();
        assert!(validate_spec(f, f1).is_ok());

        let f = ParamSet::point(rat(1, 3)).unwrap();
        let f1 = ParamSet::point(half()).unwrap();
        assert!(matches!(validate_spec(f, f1), Err(Error::HalfPointViolation(_))));

        assert_eq!(validate_spec(ParamSet::empty(), ParamSet::empty()), Err(Error::EmptyF));

        // empty F1 is admissible when 1/2 is not in F
        assert!(validate_spec(interval_of((1, 5), (1, 4)), ParamSet::empty()).is_ok());
    }

    #[test]
    fn beta_t_conversions() {
        assert_eq!(beta_to_t(0.0), 0.5);
        assert!((t_to_beta_rational(&rat(1, 3)).unwrap() - std::f64::consts::LN_2).abs() < 1e-15);
        let t1 = beta_to_t(1.0);
        assert!((t1 - 0.268_941_421_369_995_1).abs() < 1e-15);
        assert!((beta_to_t(t_to_beta(t1).unwrap()) - t1).abs() < 1e-12);
        assert!(t_to_beta(1.0).is_err());
        assert!(t_to_beta_rational(&int(0)).is_err());
    }

    #[test]
    fn f1_from_beta_sets() {
        let r = f1_for_k(&BetaSet { points: vec![0.0], intervals: vec![] }, 30).unwrap();
        assert_eq!(r.set, ParamSet::point(half()).unwrap());

        let r = f1_for_k(
            &BetaSet {
                points: vec![std::f64::consts::LN_2],
                intervals: vec![],
            },
            30,
        )
        .unwrap();
        assert_eq!(r.set.points().len(), 2);
        assert!((to_f64(&r.set.points()[0]) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(r.set.points()[1], half());

        let r = f1_for_k(&BetaSet { points: vec![], intervals: vec![(-1.0, 1.0)] }, 30).unwrap();
        assert!(r.set.points().is_empty());
        let (lo, hi) = &r.set.intervals()[0];
        assert!((to_f64(lo) - 0.268_94).abs() < 1e-5);
        assert!((to_f64(hi) - 0.731_06).abs() < 1e-5);
    }

    #[test]
    fn beta_description_includes_zero_once() {
        let d = beta_description(&ParamSet::point(half()).unwrap());
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].lo(), 0.0);
        let d = beta_description(&ParamSet::empty());
        assert_eq!(d.len(), 1);
        let d = beta_description(&ParamSet::point(rat(1, 3)).unwrap());
        assert_eq!(d.len(), 2);
        assert_eq!(d[0].lo(), 0.0);
    }
}
