//! Randomized replay of the constructive results, with a seeded report.
//!
//! Every suite derives one seed per instance from the run seed and the suite
//! name, so a failure is reproduced by rerunning that instance alone.
//! Instances run in parallel; results are collected in instance order.

use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Instant;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::gen;
use crate::group::{embed_single, in_g_plus};
use crate::k_theory::{positive_representative, s_of, solve_coboundary};
use crate::param_set::{f1_for_k, validate_spec, BetaComponent, BetaSet, ParamSet};
use crate::positivity::{is_positive_on, Witness};
use crate::rational::{format_rational, half, rat, Rational};
use crate::riesz::interpolate;
use crate::ring::RingElement;
use crate::sandwich::SearchCaps;
use crate::traces::{
    classify_eigenfunctional, kms_spectrum, measure_trace, AtomicMeasure, Eigenfunctional,
    TraceFunctional, TraceKind,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Small,
    Medium,
    Large,
}

impl Scale {
    fn multiplier(self) -> usize {
        match self {
            Scale::Small => 1,
            Scale::Medium => 3,
            Scale::Large => 10,
        }
    }
}

impl FromStr for Scale {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "small" => Ok(Scale::Small),
            "medium" => Ok(Scale::Medium),
            "large" => Ok(Scale::Large),
            other => Err(format!("unknown scale {other:?} (small, medium, large)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub instance: usize,
    pub seed: u64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub instances: usize,
    pub failures: Vec<Failure>,
    pub examples: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub scale: Scale,
    pub suites: Vec<SuiteReport>,
    pub wall_time_secs: f64,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(|s| s.failures.is_empty())
    }

    /// Plain-text rendering; the wall time line is optional so that reports
    /// can be compared byte for byte.
    pub fn to_text(&self, with_timing: bool) -> String {
        let mut out = String::new();
        let scale = match self.scale {
            Scale::Small => "small",
            Scale::Medium => "medium",
            Scale::Large => "large",
        };
        writeln!(out, "verify seed={} scale={scale}", self.seed).unwrap();
        for s in &self.suites {
            let status = if s.failures.is_empty() { "ok" } else { "FAILED" };
            writeln!(
                out,
                "{:<22} {status:<6} instances={} failures={}",
                s.name,
                s.instances,
                s.failures.len()
            )
            .unwrap();
            for e in &s.examples {
                writeln!(out, "  example: {e}").unwrap();
            }
            for f in &s.failures {
                writeln!(out, "  failure #{} seed={}: {}", f.instance, f.seed, f.message).unwrap();
            }
        }
        if with_timing {
            writeln!(out, "wall time: {:.2}s", self.wall_time_secs).unwrap();
        }
        out
    }
}

type Check = fn(&mut ChaCha8Rng, usize) -> Result<String, String>;

const SUITES: [(&str, usize, Check); 9] = [
    ("cokernel_replay", 200, cokernel_replay),
    ("cone_replay", 20, cone_replay),
    ("hypothesis_gate", 300, hypothesis_gate),
    ("positivity_soundness", 200, positivity_soundness),
    ("riesz_replay", 24, riesz_replay),
    ("ring_laws", 300, ring_laws),
    ("s_map", 200, s_map),
    ("spectrum_round_trip", 50, spectrum_round_trip),
    ("trace_scaling", 300, trace_scaling),
];

pub fn suite_names() -> impl Iterator<Item = &'static str> {
    SUITES.iter().map(|s| s.0)
}

pub fn run_verify(seed: u64, scale: Scale) -> VerifyReport {
    run_verify_suites(seed, scale, &[])
}

/// Like [`run_verify`] restricted to the named suites; an empty list runs all.
/// Unknown names are ignored.
pub fn run_verify_suites(seed: u64, scale: Scale, only: &[&str]) -> VerifyReport {
    let start = Instant::now();
    let mut suites: Vec<SuiteReport> = SUITES
        .iter()
        .filter(|s| only.is_empty() || only.contains(&s.0))
        .map(|&(name, base, check)| run_suite(seed, name, base * scale.multiplier(), check))
        .collect();
    suites.sort_by(|a, b| a.name.cmp(&b.name));
    VerifyReport {
        seed,
        scale,
        suites,
        wall_time_secs: start.elapsed().as_secs_f64(),
    }
}

/// Runs instance `instance` of suite `name` with its recorded seed.
pub fn replay(name: &str, instance: usize, seed: u64) -> Option<Result<String, String>> {
    let (_, _, check) = SUITES.iter().find(|s| s.0 == name)?;
    Some(check(&mut ChaCha8Rng::seed_from_u64(seed), instance))
}

fn run_suite(seed: u64, name: &str, count: usize, check: Check) -> SuiteReport {
    let mut master = ChaCha8Rng::seed_from_u64(seed ^ name_hash(name));
    let seeds: Vec<u64> = (0..count).map(|_| master.gen()).collect();
    let results: Vec<Result<String, String>> = seeds
        .par_iter()
        .enumerate()
        .map(|(i, &s)| check(&mut ChaCha8Rng::seed_from_u64(s), i))
        .collect();
    let mut failures = Vec::new();
    let mut examples = Vec::new();
    for (i, (r, &s)) in results.into_iter().zip(&seeds).enumerate() {
        match r {
            Ok(e) if examples.is_empty() => examples.push(e),
            Ok(_) => {}
            Err(message) => failures.push(Failure {
                instance: i,
                seed: s,
                message,
            }),
        }
    }
    SuiteReport {
        name: name.to_string(),
        instances: count,
        failures,
        examples,
    }
}

// FNV-1a, stable across platforms and releases
fn name_hash(name: &str) -> u64 {
    name.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

fn ensure(cond: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(message())
    }
}

fn ring_laws(rng: &mut ChaCha8Rng, _: usize) -> Result<String, String> {
    let a = gen::ring(rng, 5, 9, 3);
    let b = gen::ring(rng, 5, 9, 3);
    let c = gen::ring(rng, 5, 9, 3);
    let k = rng.gen_range(-4..=4);
    let t0 = gen::unit_rational(rng, 50);
    ensure(&(&a + &b) + &c == &a + &(&b + &c), || format!("+ not associative: {a}, {b}, {c}"))?;
    ensure(&(&a * &b) * &c == &a * &(&b * &c), || format!("* not associative: {a}, {b}, {c}"))?;
    ensure(&a * &(&b + &c) == &(&a * &b) + &(&a * &c), || {
        format!("not distributive: {a}, {b}, {c}")
    })?;
    ensure(&a * &b == &b * &a, || format!("* not commutative: {a}, {b}"))?;
    ensure((&a + &b).alpha(k) == &a.alpha(k) + &b.alpha(k), || {
        format!("alpha^{k} not additive on {a}, {b}")
    })?;
    ensure(a.alpha(k).alpha(-k) == a, || format!("alpha^{k} not invertible on {a}"))?;
    ensure(a.alpha(1) == &a * &RingElement::alpha_multiplier(), || {
        format!("alpha is not multiplication by t/(1-t) on {a}")
    })?;
    let ev = |x: &RingElement| x.eval(&t0).map_err(|e| e.to_string());
    ensure(ev(&(&a * &b))? == ev(&a)? * ev(&b)?, || {
        format!("evaluation at {} not multiplicative", format_rational(&t0))
    })?;
    ensure(ev(&(&a + &b))? == ev(&a)? + ev(&b)?, || {
        format!("evaluation at {} not additive", format_rational(&t0))
    })?;
    Ok(format!("a = {a}, alpha^{k}(a) = {}", a.alpha(k)))
}

fn positivity_soundness(rng: &mut ChaCha8Rng, _: usize) -> Result<String, String> {
    let mut f = gen::ring(rng, 6, 6, 2);
    if rng.gen_bool(0.25) {
        // a double root somewhere in (0, 1)
        let r = gen::unit_rational(rng, 9);
        let lin = RingElement::from_poly(crate::poly::IntPoly::new(vec![
            -r.numer().clone(),
            r.denom().clone(),
        ]));
        f = &f * &(&lin * &lin);
    }
    let set = gen::param_set(rng, 3, 16);
    let cert = is_positive_on(&f, &set);
    if cert.is_positive() {
        for t in grid(&set, 64) {
            ensure(f.sign_at(&t) > 0, || {
                format!("{f} claimed positive on {set:?} but vanishes or is negative at {}", format_rational(&t))
            })?;
        }
        return Ok(format!("{f} > 0 on the set"));
    }
    match cert.witness {
        Some(Witness::Point { t, value }) => {
            ensure(set.member(&t), || format!("witness {} outside the set", format_rational(&t)))?;
            ensure(f.eval(&t).ok() == Some(value.clone()) && !value.is_positive(), || {
                format!("bad point witness for {f} at {}", format_rational(&t))
            })?;
            Ok(format!("{f} <= 0 at t = {}", format_rational(&t)))
        }
        Some(Witness::Interval { lo, hi, .. }) => {
            let g = f.numerator().square_free_part();
            ensure(set.member(&lo) && set.member(&hi), || "interval witness outside the set".into())?;
            ensure(g.sign_at(&lo) * g.sign_at(&hi) < 0, || {
                format!("interval witness for {f} shows no sign change")
            })?;
            Ok(format!(
                "{f} vanishes in ({}, {}]",
                format_rational(&lo),
                format_rational(&hi)
            ))
        }
        None => Err(format!("negative verdict for {f} without witness")),
    }
}

/// `per_interval + 1` equally spaced rationals on each interval, plus the points.
pub fn grid(set: &ParamSet, per_interval: usize) -> Vec<Rational> {
    let mut out: Vec<Rational> = set.points().to_vec();
    for (lo, hi) in set.intervals() {
        let step = (hi - lo) / Rational::from_integer(per_interval.into());
        for k in 0..=per_interval {
            out.push(lo + &step * Rational::from_integer(k.into()));
        }
    }
    out
}

fn hypothesis_gate(rng: &mut ChaCha8Rng, _: usize) -> Result<String, String> {
    let raw = |rng: &mut ChaCha8Rng| -> (Vec<Rational>, Vec<(Rational, Rational)>) {
        let mut points = Vec::new();
        let mut intervals = Vec::new();
        for _ in 0..rng.gen_range(0..=3) {
            let a = gen::unit_rational(rng, 8);
            let b = gen::unit_rational(rng, 8);
            if a == b || rng.gen_bool(0.3) {
                points.push(a);
            } else {
                intervals.push(if a < b { (a, b) } else { (b, a) });
            }
        }
        (points, intervals)
    };
    let (fp, fi) = raw(rng);
    let (gp, gi) = raw(rng);
    let h = half();
    let has_half = |p: &[Rational], i: &[(Rational, Rational)]| {
        p.contains(&h) || i.iter().any(|(a, b)| a <= &h && &h <= b)
    };
    let expect_ok = !(fp.is_empty() && fi.is_empty()) && has_half(&fp, &fi) == has_half(&gp, &gi);
    let f = ParamSet::normalize(fp, fi).map_err(|e| e.to_string())?;
    let f1 = ParamSet::normalize(gp, gi).map_err(|e| e.to_string())?;
    let got = validate_spec(f, f1);
    ensure(got.is_ok() == expect_ok, || {
        format!("validate_spec returned {got:?}, expected ok = {expect_ok}")
    })?;
    Ok(format!("accepted = {expect_ok}"))
}

fn cokernel_replay(rng: &mut ChaCha8Rng, _: usize) -> Result<String, String> {
    let y = gen::group(rng, 8, 3, 10, 1);
    let x = y.coboundary();
    ensure(x.sum_alpha().is_zero(), || format!("sum_alpha of coboundary of {y} is nonzero"))?;
    let back = solve_coboundary(&x).map_err(|e| e.to_string())?;
    ensure(back == y, || format!("solve_coboundary returned {back}, expected {y}"))?;
    Ok(format!("y = {y}"))
}

fn s_map(rng: &mut ChaCha8Rng, _: usize) -> Result<String, String> {
    let x = gen::group(rng, 5, 3, 10, 1);
    let s = s_of(&x);
    let mut shifted = x.clone();
    for _ in 0..10 {
        shifted = &shifted + &gen::group(rng, 5, 3, 10, 1).coboundary();
    }
    ensure(s_of(&shifted) == s, || format!("S changed on the coset of {x}"))?;
    let a = gen::ring(rng, 5, 10, 3);
    ensure(s_of(&embed_single(&a)) == a, || format!("S([[a]]) != a for a = {a}"))?;
    Ok(format!("S = {s}"))
}

fn trace_scaling(rng: &mut ChaCha8Rng, _: usize) -> Result<String, String> {
    let x = gen::group(rng, 5, 3, 10, 1);
    let t0 = gen::unit_rational(rng, 30);
    for kind in [TraceKind::Plain, TraceKind::Twisted] {
        let tf = TraceFunctional::new(kind, t0.clone()).map_err(|e| e.to_string())?;
        let (lhs, rhs) = tf.scaling_check(&x);
        ensure(lhs == rhs, || format!("{tf}: {} != {}", format_rational(&lhs), format_rational(&rhs)))?;
        let direct = match kind {
            TraceKind::Plain => tf.ratio() * tf.apply(&x),
            TraceKind::Twisted => tf.apply(&x),
        };
        ensure(tf.apply(&x.gamma_star(1)) == direct, || format!("{tf}: wrong scaling"))?;
    }
    // measures vanish on coboundaries and are linear
    let set = gen::param_set(rng, 2, 12);
    let atoms: Vec<(Rational, Rational)> = {
        let mut pts = grid(&set, 3);
        pts.dedup();
        pts.into_iter()
            .take(3)
            .map(|t| (t, rat(rng.gen_range(1..=5), rng.gen_range(1..=5))))
            .collect()
    };
    let m = AtomicMeasure::new(atoms).map_err(|e| e.to_string())?;
    let y = gen::group(rng, 4, 2, 5, 1);
    let on_cob = measure_trace(&m, &set, &y.coboundary()).map_err(|e| e.to_string())?;
    ensure(on_cob.is_zero(), || "measure trace nonzero on a coboundary".into())?;
    let mx = measure_trace(&m, &set, &x).map_err(|e| e.to_string())?;
    let my = measure_trace(&m, &set, &y).map_err(|e| e.to_string())?;
    let mxy = measure_trace(&m, &set, &(&x + &y)).map_err(|e| e.to_string())?;
    ensure(mxy == mx + my, || "measure trace not additive".into())?;
    // an eigen-functional found by the classification scales by s exactly
    let spec = gen::spec(rng);
    let s = rat(rng.gen_range(1..=9), rng.gen_range(1..=9));
    if !s.is_one() {
        if let Eigenfunctional::Constructed(tf) =
            classify_eigenfunctional(&s, &spec).map_err(|e| e.to_string())?
        {
            ensure(tf.apply(&x.gamma_star(1)) == &s * tf.apply(&x), || {
                format!("eigen-functional for s = {} does not scale by s", format_rational(&s))
            })?;
        }
    }
    Ok(format!("t0 = {}, x = {x}", format_rational(&t0)))
}

/// `k ∪ {0}` as sorted, merged components `(lo, hi)`.
pub fn beta_union_zero(k: &BetaSet) -> Vec<(f64, f64)> {
    let mut parts: Vec<(f64, f64)> = k.points.iter().map(|&b| (b, b)).collect();
    parts.extend(k.intervals.iter().copied());
    parts.push((0.0, 0.0));
    parts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (lo, hi) in parts {
        match out.last_mut() {
            Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
            _ => out.push((lo, hi)),
        }
    }
    out
}

/// Largest endpoint error between a spectrum and `k ∪ {0}`, or `None` when
/// the component structure differs.
pub fn spectrum_error(spectrum: &[BetaComponent], k: &BetaSet) -> Option<f64> {
    let expected = beta_union_zero(k);
    if expected.len() != spectrum.len() {
        return None;
    }
    Some(
        expected
            .iter()
            .zip(spectrum)
            .map(|(&(lo, hi), c)| (lo - c.lo()).abs().max((hi - c.hi()).abs()))
            .fold(0.0, f64::max),
    )
}

fn spectrum_round_trip(rng: &mut ChaCha8Rng, _: usize) -> Result<String, String> {
    let k = gen::beta_set(rng, 4, 20.0);
    let f1 = f1_for_k(&k, 30).map_err(|e| e.to_string())?;
    let h = ParamSet::point(half()).expect("1/2");
    let spec = validate_spec(h.clone(), f1.set).map_err(|e| e.to_string())?;
    let spectrum = kms_spectrum(&spec);
    let err = spectrum_error(&spectrum, &k)
        .ok_or_else(|| format!("component structure differs for {k:?}"))?;
    ensure(err < 1e-9, || format!("endpoint error {err:e} for {k:?}"))?;
    let only_half = kms_spectrum(&validate_spec(h.clone(), h).map_err(|e| e.to_string())?);
    ensure(
        only_half.len() == 1 && only_half[0].lo() == 0.0 && only_half[0].hi() == 0.0,
        || "F1 = {1/2} does not give {0}".into(),
    )?;
    Ok(format!("{} components, max error {err:.1e}", spectrum.len()))
}

fn riesz_replay(rng: &mut ChaCha8Rng, instance: usize) -> Result<String, String> {
    let specs = gen::benchmark_specs();
    let (name, spec) = &specs[instance % specs.len()];
    let [x1, x2, y1, y2] = gen::riesz_quadruple(rng);
    let r = interpolate([&x1, &x2], [&y1, &y2], spec, SearchCaps::default())
        .map_err(|e| format!("{name}: {e}"))?;
    for x in [&x1, &x2] {
        ensure(in_g_plus(&(&r.z - x), spec).member, || format!("{name}: z - x not in G+"))?;
    }
    for y in [&y1, &y2] {
        ensure(in_g_plus(&(y - &r.z), spec).member, || format!("{name}: y - z not in G+"))?;
    }
    ensure(r.degenerate || r.z.support().all(|n| (-1..=1).contains(&n)), || {
        format!("{name}: support of z outside -1..=1")
    })?;
    Ok(format!("{name}: z = {}", r.z))
}

fn cone_replay(rng: &mut ChaCha8Rng, instance: usize) -> Result<String, String> {
    let specs: Vec<_> = gen::benchmark_specs()
        .into_iter()
        .filter(|(_, s)| !s.f1().is_empty() && s.f1() != &ParamSet::point(half()).expect("1/2"))
        .collect();
    let (name, spec) = &specs[instance % specs.len()];
    let x = gen::cone_instance(rng, spec, 200)
        .ok_or_else(|| format!("{name}: no instance of G++ outside G+ generated"))?;
    let r = positive_representative(&x, spec, SearchCaps::default())
        .map_err(|e| format!("{name}: {e}"))?;
    ensure(r.y.sum_alpha() == x.sum_alpha(), || format!("{name}: coset changed"))?;
    ensure(in_g_plus(&r.y, spec).member, || format!("{name}: representative not in G+"))?;
    Ok(format!("{name}: b = {}", r.b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scale_parsing() {
        assert_eq!("large".parse::<Scale>().unwrap(), Scale::Large);
        assert!("huge".parse::<Scale>().is_err());
    }

    #[test]
    fn union_with_zero_merges() {
        let k = BetaSet {
            points: vec![0.5],
            intervals: vec![(-1.0, 1.0), (3.0, 4.0)],
        };
        assert_eq!(beta_union_zero(&k), vec![(-1.0, 1.0), (3.0, 4.0)]);
    }

    #[test]
    fn replay_unknown_suite() {
        assert!(replay("nope", 0, 1).is_none());
        assert!(replay("ring_laws", 0, 1).unwrap().is_ok());
    }

    #[test]
    fn hash_is_stable() {
        assert_eq!(name_hash(""), 0xcbf2_9ce4_8422_2325);
        assert_ne!(name_hash("a"), name_hash("b"));
    }
}
