//! JSON file formats.
//!
//! Integers and rationals travel as decimal strings (`"-3"`, `"1/4"`); plain
//! JSON integers are accepted on input. Parse errors carry the byte offset at
//! which the parser gave up.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::de::{self, DeserializeOwned, Deserializer, Visitor};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::param_set::{validate_spec, BetaSet, KmsSpec, ParamSet};
use crate::poly::IntPoly;
use crate::rational::{format_rational, parse_rational, Rational};
use crate::ring::{Limits, RingElement};
use crate::sandwich::{SandwichConstraint, SandwichProblem, SearchCaps};
use crate::traces::AtomicMeasure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ParseOptions {
    /// Reject non-canonical ring elements and warn about unreduced rationals.
    pub strict: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Parsed<T> {
    pub value: T,
    pub warnings: Vec<String>,
}

#[derive(Default)]
struct Context {
    strict: bool,
    warnings: Vec<String>,
}

thread_local! {
    static CONTEXT: RefCell<Context> = RefCell::new(Context::default());
}

fn strict() -> bool {
    CONTEXT.with(|c| c.borrow().strict)
}

fn warn(message: String) {
    CONTEXT.with(|c| c.borrow_mut().warnings.push(message));
}

/// Types with a JSON file format.
pub trait FileFormat: Sized {
    #[doc(hidden)]
    type Raw: DeserializeOwned;
    #[doc(hidden)]
    fn from_raw(raw: Self::Raw) -> std::result::Result<Self, String>;
    fn to_json(&self) -> Value;
}

pub fn parse<T: FileFormat>(text: &str, opts: ParseOptions) -> Result<Parsed<T>> {
    CONTEXT.with(|c| {
        *c.borrow_mut() = Context {
            strict: opts.strict,
            warnings: Vec::new(),
        }
    });
    let result = serde_json::from_str::<Checked<T>>(text);
    let warnings = CONTEXT.with(|c| std::mem::take(&mut c.borrow_mut().warnings));
    match result {
        Ok(Checked(value)) => Ok(Parsed { value, warnings }),
        Err(e) => Err(Error::Parse {
            offset: byte_offset(text, e.line(), e.column()),
            message: strip_position(&e.to_string()),
        }),
    }
}

pub fn emit<T: FileFormat>(value: &T) -> String {
    value.to_json().to_string()
}

fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    if line == 0 {
        return text.len();
    }
    let start: usize = text
        .split_inclusive('\n')
        .take(line - 1)
        .map(str::len)
        .sum();
    (start + column.saturating_sub(1)).min(text.len())
}

fn strip_position(message: &str) -> String {
    match message.rsplit_once(" at line ") {
        Some((head, _)) => head.to_string(),
        None => message.to_string(),
    }
}

// Deserializes the raw form and converts it, so conversion errors are
// positioned by the JSON reader.
#[doc(hidden)]
pub struct Checked<T>(T);

impl<'de, T: FileFormat> Deserialize<'de> for Checked<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = T::Raw::deserialize(d)?;
        T::from_raw(raw)
            .map(Checked)
            .map_err(de::Error::custom)
    }
}

// ---- scalars ----

struct Int(BigInt);

impl<'de> Deserialize<'de> for Int {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Int;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an integer or a decimal integer string")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Int, E> {
                Ok(Int(v.into()))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Int, E> {
                Ok(Int(v.into()))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Int, E> {
                v.trim()
                    .parse()
                    .map(Int)
                    .map_err(|_| E::custom(format!("invalid integer {v:?}")))
            }
        }
        d.deserialize_any(V)
    }
}

struct Exponent(u32);

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let Int(v) = Int::deserialize(d)?;
        u32::try_from(&v)
            .map(Exponent)
            .map_err(|_| de::Error::custom(format!("exponent {v} is not a non-negative integer")))
    }
}

struct Rat(Rational);

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Rat;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a rational string \"num/den\" or an integer")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Rat, E> {
                Ok(Rat(Rational::from_integer(v.into())))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Rat, E> {
                Ok(Rat(Rational::from_integer(v.into())))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Rat, E> {
                let p = parse_rational(v).map_err(|_| E::custom(format!("invalid rational {v:?}")))?;
                if !p.was_reduced && strict() {
                    warn(format!(
                        "rational {v:?} normalized to \"{}\"",
                        format_rational(&p.value)
                    ));
                }
                Ok(Rat(p.value))
            }
        }
        d.deserialize_any(V)
    }
}

fn rational_json(q: &Rational) -> Value {
    Value::String(format_rational(q))
}

// ---- ring elements ----

#[doc(hidden)]
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawRing {
    num: Vec<Int>,
    #[serde(default = "zero_exponent")]
    t_pow: Exponent,
    #[serde(default = "zero_exponent")]
    omt_pow: Exponent,
}

fn zero_exponent() -> Exponent {
    Exponent(0)
}

#[derive(Serialize)]
struct RingOut {
    num: Vec<String>,
    t_pow: String,
    omt_pow: String,
}

impl FileFormat for RingElement {
    type Raw = RawRing;

    fn from_raw(raw: RawRing) -> std::result::Result<Self, String> {
        let coeffs: Vec<BigInt> = raw.num.into_iter().map(|Int(c)| c).collect();
        let trailing_zero = coeffs.len() > 1 && coeffs.last().is_some_and(Zero::is_zero);
        let (a, b) = (raw.t_pow.0, raw.omt_pow.0);
        let poly = IntPoly::new(coeffs);
        let x = RingElement::canon(poly.clone(), a, b);
        if strict() {
            let canonical = if poly.is_zero() {
                a == 0 && b == 0
            } else {
                !trailing_zero && x.numerator() == &poly && x.t_pow() == a && x.omt_pow() == b
            };
            if !canonical {
                return Err(format!("non-canonical ring element; canonical form is {x}"));
            }
        }
        Limits::default().check(&x).map_err(|e| e.to_string())?;
        Ok(x)
    }

    fn to_json(&self) -> Value {
        let num = if self.is_zero() {
            vec!["0".to_string()]
        } else {
            self.numerator().coeffs().iter().map(|c| c.to_string()).collect()
        };
        serde_json::to_value(RingOut {
            num,
            t_pow: self.t_pow().to_string(),
            omt_pow: self.omt_pow().to_string(),
        })
        .expect("plain strings")
    }
}

// ---- parameter sets ----

#[doc(hidden)]
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSet {
    #[serde(default)]
    points: Vec<Rat>,
    #[serde(default)]
    intervals: Vec<(Rat, Rat)>,
}

impl FileFormat for ParamSet {
    type Raw = RawSet;

    fn from_raw(raw: RawSet) -> std::result::Result<Self, String> {
        ParamSet::normalize(
            raw.points.into_iter().map(|Rat(p)| p).collect(),
            raw.intervals.into_iter().map(|(Rat(a), Rat(b))| (a, b)).collect(),
        )
        .map_err(|e| e.to_string())
    }

    fn to_json(&self) -> Value {
        json!({
            "points": self.points().iter().map(rational_json).collect::<Vec<_>>(),
            "intervals": self
                .intervals()
                .iter()
                .map(|(a, b)| json!([rational_json(a), rational_json(b)]))
                .collect::<Vec<_>>(),
        })
    }
}

// ---- group elements ----

#[doc(hidden)]
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawGroup {
    entries: BTreeMap<String, Checked<RingElement>>,
}

impl FileFormat for GroupElement {
    type Raw = RawGroup;

    fn from_raw(raw: RawGroup) -> std::result::Result<Self, String> {
        let mut entries = Vec::with_capacity(raw.entries.len());
        for (k, Checked(v)) in raw.entries {
            let n: i64 = k
                .trim()
                .parse()
                .map_err(|_| format!("entry index {k:?} is not an integer"))?;
            entries.push((n, v));
        }
        GroupElement::from_entries(entries).map_err(|e| e.to_string())
    }

    fn to_json(&self) -> Value {
        let entries: serde_json::Map<String, Value> = self
            .entries()
            .iter()
            .map(|(n, v)| (n.to_string(), v.to_json()))
            .collect();
        json!({ "entries": entries })
    }
}

// ---- specs ----

#[doc(hidden)]
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSpec {
    #[serde(alias = "F")]
    f: Checked<ParamSet>,
    #[serde(alias = "F1", default)]
    f1: Option<Checked<ParamSet>>,
}

/// The two sets of a spec file before the half-point check, so callers can
/// report a violation as such rather than as a parse error.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecSets {
    pub f: ParamSet,
    pub f1: ParamSet,
}

impl SpecSets {
    pub fn validate(self) -> Result<KmsSpec> {
        validate_spec(self.f, self.f1)
    }
}

impl FileFormat for SpecSets {
    type Raw = RawSpec;

    fn from_raw(raw: RawSpec) -> std::result::Result<Self, String> {
        Ok(SpecSets {
            f: raw.f.0,
            f1: raw.f1.map(|c| c.0).unwrap_or_else(ParamSet::empty),
        })
    }

    fn to_json(&self) -> Value {
        json!({ "f": self.f.to_json(), "f1": self.f1.to_json() })
    }
}

impl FileFormat for KmsSpec {
    type Raw = RawSpec;

    fn from_raw(raw: RawSpec) -> std::result::Result<Self, String> {
        SpecSets::from_raw(raw)?.validate().map_err(|e| e.to_string())
    }

    fn to_json(&self) -> Value {
        json!({ "f": self.f().to_json(), "f1": self.f1().to_json() })
    }
}

// ---- sandwich problems ----

#[doc(hidden)]
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConstraint {
    lower: Checked<RingElement>,
    #[serde(default)]
    weight: Option<Checked<RingElement>>,
    upper: Checked<RingElement>,
}

#[doc(hidden)]
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawProblem {
    constraints: Vec<RawConstraint>,
    set: Checked<ParamSet>,
    #[serde(default)]
    max_degree: Option<usize>,
    #[serde(default)]
    max_iterations: Option<usize>,
}

impl FileFormat for SandwichProblem {
    type Raw = RawProblem;

    fn from_raw(raw: RawProblem) -> std::result::Result<Self, String> {
        let caps = SearchCaps::default();
        Ok(SandwichProblem {
            constraints: raw
                .constraints
                .into_iter()
                .map(|c| SandwichConstraint {
                    lower: c.lower.0,
                    weight: c.weight.map(|w| w.0).unwrap_or_else(RingElement::one),
                    upper: c.upper.0,
                })
                .collect(),
            set: raw.set.0,
            max_degree: raw.max_degree.unwrap_or(caps.max_degree),
            max_iterations: raw.max_iterations.unwrap_or(caps.max_iterations),
        })
    }

    fn to_json(&self) -> Value {
        let constraints: Vec<Value> = self
            .constraints
            .iter()
            .map(|c| {
                json!({
                    "lower": c.lower.to_json(),
                    "weight": c.weight.to_json(),
                    "upper": c.upper.to_json(),
                })
            })
            .collect();
        json!({
            "constraints": constraints,
            "set": self.set.to_json(),
            "max_degree": self.max_degree,
            "max_iterations": self.max_iterations,
        })
    }
}

// ---- measures ----

#[doc(hidden)]
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawMeasure {
    atoms: Vec<(Rat, Rat)>,
}

impl FileFormat for AtomicMeasure {
    type Raw = RawMeasure;

    fn from_raw(raw: RawMeasure) -> std::result::Result<Self, String> {
        AtomicMeasure::new(raw.atoms.into_iter().map(|(Rat(t), Rat(w))| (t, w)).collect())
            .map_err(|e| e.to_string())
    }

    fn to_json(&self) -> Value {
        let atoms: Vec<Value> = self
            .atoms()
            .iter()
            .map(|(t, w)| json!([rational_json(t), rational_json(w)]))
            .collect();
        json!({ "atoms": atoms })
    }
}

// ---- inverse-temperature sets ----

#[doc(hidden)]
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawBetaSet {
    #[serde(default)]
    points: Vec<f64>,
    #[serde(default)]
    intervals: Vec<(f64, f64)>,
}

impl FileFormat for BetaSet {
    type Raw = RawBetaSet;

    fn from_raw(raw: RawBetaSet) -> std::result::Result<Self, String> {
        if let Some(&(lo, hi)) = raw.intervals.iter().find(|(lo, hi)| lo > hi) {
            return Err(format!("beta interval [{lo}, {hi}] has lo > hi"));
        }
        Ok(BetaSet {
            points: raw.points,
            intervals: raw.intervals,
        })
    }

    fn to_json(&self) -> Value {
        json!({ "points": self.points, "intervals": self.intervals })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::half;

    fn lax<T: FileFormat>(text: &str) -> Result<T> {
        parse::<T>(text, ParseOptions::default()).map(|p| p.value)
    }

    #[test]
    fn ring_round_trip() {
        let text = r#"{"num":["-1","2"],"t_pow":"1","omt_pow":"1"}"#;
        let x: RingElement = lax(text).unwrap();
        assert_eq!(x, RingElement::riesz_weight());
        assert_eq!(emit(&x), text);
    }

    #[test]
    fn negative_exponent_rejected() {
        let text = r#"{"num":["1"],"t_pow":-1,"omt_pow":0}"#;
        match lax::<RingElement>(text) {
            Err(Error::Parse { offset, .. }) => assert!(offset > 0 && offset <= text.len()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn strict_rejects_non_canonical() {
        let text = r#"{"num":["0","1"],"t_pow":"1","omt_pow":"0"}"#;
        assert_eq!(lax::<RingElement>(text).unwrap(), RingElement::one());
        let strict = parse::<RingElement>(text, ParseOptions { strict: true });
        assert!(matches!(strict, Err(Error::Parse { .. })));
    }

    #[test]
    fn unreduced_rational_warns_in_strict_mode() {
        let text = r#"{"points":["2/4"]}"#;
        let p = parse::<ParamSet>(text, ParseOptions { strict: true }).unwrap();
        assert_eq!(p.value.points(), &[half()]);
        assert_eq!(p.warnings.len(), 1);
        assert_eq!(emit(&p.value), r#"{"points":["1/2"],"intervals":[]}"#);
        let p = parse::<ParamSet>(text, ParseOptions::default()).unwrap();
        assert!(p.warnings.is_empty());
    }

    #[test]
    fn syntax_error_offset() {
        let text = "{\"points\": [\"1/2\",]}";
        match lax::<ParamSet>(text) {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 18),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn group_and_spec() {
        let g: GroupElement =
            lax(r#"{"entries":{"-1":{"num":["2"]},"0":{"num":["0"]}}}"#).unwrap();
        assert_eq!(g.support().collect::<Vec<_>>(), vec![-1]);
        assert_eq!(lax::<GroupElement>(&emit(&g)).unwrap(), g);
        let spec: KmsSpec = lax(r#"{"F":{"points":["1/2"]},"F1":{"points":["1/2"]}}"#).unwrap();
        assert_eq!(lax::<KmsSpec>(&emit(&spec)).unwrap(), spec);
        assert!(lax::<KmsSpec>(r#"{"f":{"points":["1/2"]}}"#).is_err());
    }
}
