//! Acceptance criteria, one line per criterion.
//!
//! Runs as a plain binary (no libtest harness) so the PASS/FAIL lines are
//! always printed; the process exits non-zero if any criterion fails.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dglab_core::gen;
use dglab_core::group::in_g_plus;
use dglab_core::k_theory::{positive_representative, s_of, solve_coboundary};
use dglab_core::param_set::{f1_for_k, validate_spec, BetaSet, ParamSet};
use dglab_core::poly::IntPoly;
use dglab_core::positivity::{is_positive_on, Witness};
use dglab_core::rational::{half, rat, to_f64, Rational};
use dglab_core::riesz::interpolate;
use dglab_core::sandwich::SearchCaps;
use dglab_core::sturm::SturmChain;
use dglab_core::traces::{kms_spectrum, TraceFunctional, TraceKind};
use dglab_core::verify::{run_verify, Scale};
use dglab_core::{embed_single, RingElement};

type Outcome = Result<String, String>;

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("ring exactness", ring_exactness),
        ("positivity oracle soundness", positivity_soundness),
        ("cokernel replay", cokernel_replay),
        ("S-map", s_map),
        ("Riesz interpolation replay", riesz_replay),
        ("cone replay", cone_replay),
        ("trace scaling", trace_scaling),
        ("spectrum round trip", spectrum_round_trip),
        ("hypothesis gate", hypothesis_gate),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.1}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

fn rng(label: &str) -> ChaCha8Rng {
    let seed = label.bytes().fold(7u64, |h, b| h.wrapping_mul(31).wrapping_add(b as u64));
    ChaCha8Rng::seed_from_u64(seed)
}

fn check(cond: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(message())
    }
}

// ---- 1 ----

fn ring_exactness() -> Outcome {
    let mut r = rng("ring");
    let start = Instant::now();
    let n = 1000;
    for case in 0..n {
        let a = gen::ring(&mut r, 6, 20, 3);
        let b = gen::ring(&mut r, 6, 20, 3);
        let c = gen::ring(&mut r, 6, 20, 3);
        let k: i64 = r.gen_range(-5..=5);
        let t0 = gen::unit_rational(&mut r, 97);
        let ev = |x: &RingElement| x.eval(&t0).expect("t0 in (0, 1)");
        check(&(&a * &b) * &c == &a * &(&b * &c), || format!("case {case}: * associativity"))?;
        check(&(&a + &b) + &c == &a + &(&b + &c), || format!("case {case}: + associativity"))?;
        check(&a * &(&b + &c) == &(&a * &b) + &(&a * &c), || format!("case {case}: distributivity"))?;
        check((&a * &b).alpha(k) == &a.alpha(k) * &b, || format!("case {case}: alpha^{k} not linear over G0"))?;
        check(a.alpha(k).alpha(-k) == a, || format!("case {case}: alpha^{k} not invertible"))?;
        // alpha^k(a)(t0) = (t0 / (1 - t0))^k a(t0)
        let r0 = &t0 / (Rational::one() - &t0);
        let scale = if k >= 0 {
            num_traits::pow(r0, k as usize)
        } else {
            num_traits::pow(r0.recip(), (-k) as usize)
        };
        check(ev(&a.alpha(k)) == scale * ev(&a), || format!("case {case}: alpha at t0"))?;
        check(ev(&(&a * &b)) == ev(&a) * ev(&b), || format!("case {case}: eval not multiplicative"))?;
        check(ev(&(&a - &b)) == ev(&a) - ev(&b), || format!("case {case}: eval not additive"))?;
    }
    let took = start.elapsed();
    check(took < Duration::from_secs(10), || format!("took {took:?}"))?;
    Ok(format!("{n} cases, exact, {:.2}s", took.as_secs_f64()))
}

// ---- 2 ----

/// Sign of `p(t)`, with a floating-point filter and an exact fallback.
fn sign_at(p: &IntPoly, t: &Rational) -> i32 {
    let d = p.coeffs().len();
    let coeffs: Vec<f64> = p.coeffs().iter().map(|c| c.to_string().parse::<f64>().unwrap()).collect();
    let x = to_f64(t);
    let value = coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c);
    let l1: f64 = coeffs.iter().map(|c| c.abs()).sum();
    let bound = 4.0 * ((d + 2) * (d + 2)) as f64 * f64::EPSILON * l1;
    if value.is_finite() && l1.is_finite() && value.abs() > bound {
        if value > 0.0 {
            1
        } else {
            -1
        }
    } else {
        p.sign_at(t)
    }
}

fn sample_grid(set: &ParamSet, total: usize) -> Vec<Rational> {
    let mut out = set.points().to_vec();
    let ivs = set.intervals();
    if !ivs.is_empty() {
        let per = (total.saturating_sub(out.len()) / ivs.len()).max(2);
        for (lo, hi) in ivs {
            let step = (hi - lo) / Rational::from_integer(BigInt::from(per - 1));
            out.extend((0..per).map(|k| lo + &step * Rational::from_integer(BigInt::from(k))));
        }
    }
    out
}

type QPoly = Vec<Rational>;

fn q_trim(mut p: QPoly) -> QPoly {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn q_eval(p: &QPoly, x: &Rational) -> Rational {
    p.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
}

fn q_mul(a: &QPoly, b: &QPoly) -> QPoly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn q_rem(a: &QPoly, b: &QPoly) -> QPoly {
    let mut r = a.clone();
    let lb = b.last().expect("nonzero divisor").clone();
    while r.len() >= b.len() && !r.is_empty() {
        let f = r.last().unwrap() / &lb;
        let shift = r.len() - b.len();
        for (i, c) in b.iter().enumerate() {
            r[shift + i] -= &f * c;
        }
        r = q_trim(r);
    }
    r
}

fn q_div(a: &QPoly, b: &QPoly) -> QPoly {
    let mut r = a.clone();
    let lb = b.last().unwrap().clone();
    let mut q = vec![Rational::zero(); a.len().saturating_sub(b.len()) + 1];
    while r.len() >= b.len() && !r.is_empty() {
        let f = r.last().unwrap() / &lb;
        let shift = r.len() - b.len();
        for (i, c) in b.iter().enumerate() {
            r[shift + i] -= &f * c;
        }
        q[shift] = f;
        r = q_trim(r);
    }
    q_trim(q)
}

fn q_square_free(p: &QPoly) -> QPoly {
    let dp: QPoly = q_trim(
        p.iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * Rational::from_integer(BigInt::from(i)))
            .collect(),
    );
    if dp.is_empty() {
        return p.clone();
    }
    let (mut a, mut b) = (p.clone(), dp);
    while !b.is_empty() {
        let r = q_rem(&a, &b);
        a = b;
        b = r;
    }
    q_div(p, &a)
}

fn variations(p: &QPoly) -> usize {
    let signs: Vec<bool> = p.iter().filter(|c| !c.is_zero()).map(|c| c.is_positive()).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Distinct real roots of the square-free `p` in the open interval `(a, b)`,
/// by Descartes' rule of signs after the map `x = (a + b y) / (1 + y)`, with
/// bisection until each piece has zero or one sign variation.
fn descartes_count(p: &QPoly, a: &Rational, b: &Rational) -> usize {
    let d = p.len() - 1;
    let mut q: QPoly = vec![];
    for (i, c) in p.iter().enumerate() {
        let mut term = vec![c.clone()];
        for _ in 0..i {
            term = q_mul(&term, &vec![a.clone(), b.clone()]);
        }
        for _ in i..d {
            term = q_mul(&term, &vec![Rational::one(), Rational::one()]);
        }
        if q.len() < term.len() {
            q.resize(term.len(), Rational::zero());
        }
        for (k, t) in term.into_iter().enumerate() {
            q[k] += t;
        }
    }
    match variations(&q) {
        0 => 0,
        1 => 1,
        _ => {
            let m = (a + b) / Rational::from_integer(2.into());
            let at_mid = usize::from(q_eval(p, &m).is_zero());
            descartes_count(p, a, &m) + at_mid + descartes_count(p, &m, b)
        }
    }
}

fn positivity_soundness() -> Outcome {
    let mut r = rng("positivity");
    let (mut positive, mut negative, mut sturm_checks) = (0, 0, 0);
    for case in 0..1000 {
        let mut f = if r.gen_bool(0.3) {
            gen::universally_positive(&mut r, 6, 5)
        } else {
            gen::ring(&mut r, 6, 8, 2)
        };
        if r.gen_bool(0.2) {
            let root = gen::unit_rational(&mut r, 9);
            let lin = RingElement::from_poly(IntPoly::new(vec![
                -root.numer().clone(),
                root.denom().clone(),
            ]));
            f = &f * &(&lin * &lin);
        }
        let set = gen::param_set(&mut r, 3, 16);
        let num = f.numerator();
        let cert = is_positive_on(&f, &set);
        if cert.is_positive() {
            positive += 1;
            for t in sample_grid(&set, 10_000) {
                check(sign_at(num, &t) > 0, || format!("case {case}: POSITIVE contradicted at {t}"))?;
            }
        } else {
            negative += 1;
            match &cert.witness {
                Some(Witness::Point { t, value }) => {
                    check(set.member(t) && &f.eval(t).unwrap() == value && !value.is_positive(), || {
                        format!("case {case}: bad point witness")
                    })?
                }
                Some(Witness::Interval { lo, hi, .. }) => {
                    let sf = num.square_free_part();
                    let inside = set.intervals().iter().any(|(a, b)| a <= lo && hi <= b);
                    check(inside && sf.sign_at(lo) * sf.sign_at(hi) < 0, || {
                        format!("case {case}: bad interval witness")
                    })?
                }
                None => return Err(format!("case {case}: NOT_POSITIVE without witness")),
            }
        }
        // Sturm against an independent isolator on every interval component
        if num.degree().unwrap_or(0) <= 8 && !num.is_zero() {
            let qp: QPoly = num.coeffs().iter().map(|c| Rational::from_integer(c.clone())).collect();
            let sf = q_square_free(&qp);
            let chain = SturmChain::new(num);
            let mut ivs: Vec<(Rational, Rational)> = set.intervals().to_vec();
            ivs.push((Rational::zero(), Rational::one()));
            for (lo, hi) in ivs {
                let s = chain.count_open(&lo, &hi);
                let d = if sf.len() > 1 { descartes_count(&sf, &lo, &hi) } else { 0 };
                check(s == d, || format!("case {case}: Sturm {s} vs bisection {d} on ({lo}, {hi}) for {f}"))?;
                sturm_checks += 1;
            }
        }
    }
    check(positive > 100 && negative > 100, || format!("unbalanced: {positive} positive, {negative} negative"))?;
    Ok(format!(
        "1000 pairs ({positive} POSITIVE grid-checked at 10^4 points, {negative} witnesses verified), {sturm_checks} Sturm counts match"
    ))
}

// ---- 3 ----

fn cokernel_replay() -> Outcome {
    let mut r = rng("cokernel");
    for case in 0..1000 {
        let y = gen::group(&mut r, 8, 4, 10, 2);
        let x = y.coboundary();
        check(x.sum_alpha().is_zero(), || format!("case {case}: sum_alpha nonzero"))?;
        let back = solve_coboundary(&x).map_err(|e| format!("case {case}: {e}"))?;
        check(back == y, || format!("case {case}: recovered {back}, expected {y}"))?;
    }
    Ok("1000 cases, width <= 8, height <= 10".into())
}

// ---- 4 ----

fn s_map() -> Outcome {
    let mut r = rng("s-map");
    for case in 0..1000 {
        let x = gen::group(&mut r, 6, 4, 10, 2);
        let s = s_of(&x);
        let mut y = x.clone();
        for _ in 0..10 {
            y = &y + &gen::group(&mut r, 6, 3, 10, 2).coboundary();
            check(s_of(&y) == s, || format!("case {case}: S not constant on the coset"))?;
        }
        let a = gen::ring(&mut r, 6, 10, 3);
        check(s_of(&embed_single(&a)) == a, || format!("case {case}: S([[a]]) != a"))?;
    }
    Ok("1000 cases x 10 coboundaries, S o embed = id on 1000".into())
}

// ---- 5 ----

fn riesz_replay() -> Outcome {
    let mut r = rng("riesz");
    let specs = gen::benchmark_specs();
    let caps = SearchCaps {
        max_degree: 32,
        ..SearchCaps::default()
    };
    let per_spec = 17;
    let mut times = Vec::new();
    for (name, spec) in &specs {
        for i in 0..per_spec {
            let [x1, x2, y1, y2] = gen::riesz_quadruple(&mut r);
            let start = Instant::now();
            let res = interpolate([&x1, &x2], [&y1, &y2], spec, caps)
                .map_err(|e| format!("{name} #{i}: {e}"))?;
            times.push(start.elapsed().as_secs_f64());
            for x in [&x1, &x2] {
                check(in_g_plus(&(&res.z - x), spec).member, || format!("{name} #{i}: z - x"))?;
            }
            for y in [&y1, &y2] {
                check(in_g_plus(&(y - &res.z), spec).member, || format!("{name} #{i}: y - z"))?;
            }
        }
    }
    times.sort_by(f64::total_cmp);
    let median = times[times.len() / 2];
    let max = times[times.len() - 1];
    check(median < 2.0, || format!("median {median:.3}s"))?;
    Ok(format!(
        "{} quadruples over {} specs, all certified, median {median:.3}s, max {max:.2}s",
        times.len(),
        specs.len()
    ))
}

// ---- 6 ----

fn cone_replay() -> Outcome {
    let mut r = rng("cone");
    let h = ParamSet::point(half()).unwrap();
    let specs: Vec<_> = gen::benchmark_specs()
        .into_iter()
        .filter(|(_, s)| !s.f1().is_empty() && s.f1() != &h)
        .collect();
    let mut done = 0;
    let mut attempts = 0;
    while done < 100 {
        attempts += 1;
        check(attempts < 10_000, || format!("only {done} instances generated"))?;
        let (name, spec) = &specs[attempts % specs.len()];
        let Some(x) = gen::cone_instance(&mut r, spec, 20) else {
            continue;
        };
        let rep = positive_representative(&x, spec, SearchCaps::default())
            .map_err(|e| format!("{name}: {e} for {x}"))?;
        check(in_g_plus(&rep.y, spec).member, || format!("{name}: y not in G+"))?;
        check(rep.y.sum_alpha() == x.sum_alpha(), || format!("{name}: coset changed"))?;
        done += 1;
    }
    Ok(format!("{done} instances in G++ \\ G+ over {} specs, all repaired", specs.len()))
}

// ---- 7 ----

fn trace_scaling() -> Outcome {
    let mut r = rng("trace");
    for case in 0..1000 {
        let x = gen::group(&mut r, 6, 4, 10, 2);
        let t0 = gen::unit_rational(&mut r, 60);
        let ratio = &t0 / (Rational::one() - &t0);
        let gx = x.gamma_star(1);
        let plain = TraceFunctional::new(TraceKind::Plain, t0.clone()).unwrap();
        let twisted = TraceFunctional::new(TraceKind::Twisted, t0.clone()).unwrap();
        check(plain.apply(&gx) == &ratio * plain.apply(&x), || format!("case {case}: PLAIN"))?;
        check(twisted.apply(&gx) == twisted.apply(&x), || format!("case {case}: TWISTED"))?;
        // direct evaluation, independent of the functional
        let direct: Rational = x.entries().values().map(|v| v.eval(&t0).unwrap()).sum();
        check(plain.apply(&x) == direct, || format!("case {case}: PLAIN value"))?;
    }
    Ok("1000 cases, exact".into())
}

// ---- 8 ----

fn union_with_zero(k: &BetaSet) -> Vec<(f64, f64)> {
    let mut parts: Vec<(f64, f64)> = k.points.iter().map(|&b| (b, b)).collect();
    parts.extend(k.intervals.iter().copied());
    parts.push((0.0, 0.0));
    parts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = vec![];
    for (lo, hi) in parts {
        match out.last_mut() {
            Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
            _ => out.push((lo, hi)),
        }
    }
    out
}

fn spectrum_round_trip() -> Outcome {
    let mut r = rng("spectrum");
    let h = ParamSet::point(half()).unwrap();
    let mut worst = 0.0f64;
    for case in 0..100 {
        let k = gen::beta_set(&mut r, 4, 20.0);
        let f1 = f1_for_k(&k, 30).map_err(|e| format!("case {case}: {e}"))?;
        let spec = validate_spec(h.clone(), f1.set).map_err(|e| format!("case {case}: {e}"))?;
        let got = kms_spectrum(&spec);
        let want = union_with_zero(&k);
        check(got.len() == want.len(), || format!("case {case}: {} components, expected {}", got.len(), want.len()))?;
        for (c, (lo, hi)) in got.iter().zip(&want) {
            worst = worst.max((c.lo() - lo).abs()).max((c.hi() - hi).abs());
        }
    }
    check(worst < 1e-9, || format!("endpoint error {worst:e}"))?;
    let only = kms_spectrum(&validate_spec(h.clone(), h).unwrap());
    check(only.len() == 1 && only[0].lo() == 0.0 && only[0].hi() == 0.0, || "F1 = {1/2} is not {0}".into())?;
    Ok(format!("100 sets, max endpoint error {worst:.1e}; {{1/2}} gives {{0}}"))
}

// ---- 9 ----

fn hypothesis_gate() -> Outcome {
    let mut r = rng("gate");
    let (mut accepted, mut rejected) = (0, 0);
    let pick = |r: &mut ChaCha8Rng| -> Rational {
        // hit 1/2 and its neighbourhood often
        match r.gen_range(0..4) {
            0 => half(),
            1 => rat(r.gen_range(1..=4), 9),
            2 => rat(r.gen_range(5..=8), 9),
            _ => gen::unit_rational(r, 12),
        }
    };
    for case in 0..1000 {
        let mut raw = || {
            let mut points = vec![];
            let mut intervals = vec![];
            for _ in 0..r.gen_range(0..=3) {
                let a = pick(&mut r);
                let b = pick(&mut r);
                if a == b || r.gen_bool(0.3) {
                    points.push(a);
                } else {
                    intervals.push(if a < b { (a, b) } else { (b, a) });
                }
            }
            (points, intervals)
        };
        let (fp, fi) = raw();
        let (gp, gi) = raw();
        let h = half();
        let has = |p: &[Rational], i: &[(Rational, Rational)]| {
            p.iter().any(|x| *x == h) || i.iter().any(|(a, b)| *a <= h && h <= *b)
        };
        let ok = !(fp.is_empty() && fi.is_empty()) && has(&fp, &fi) == has(&gp, &gi);
        let f = ParamSet::normalize(fp, fi).unwrap();
        let f1 = ParamSet::normalize(gp, gi).unwrap();
        let got = validate_spec(f, f1).is_ok();
        check(got == ok, || format!("case {case}: validate_spec = {got}, oracle = {ok}"))?;
        if ok {
            accepted += 1;
        } else {
            rejected += 1;
        }
    }
    check(accepted > 100 && rejected > 100, || format!("unbalanced: {accepted}/{rejected}"))?;
    Ok(format!("1000 pairs: {accepted} accepted, {rejected} rejected, all as expected"))
}

// ---- 10 ----

fn determinism() -> Outcome {
    let start = Instant::now();
    let a = run_verify(42, Scale::Small);
    let first = start.elapsed();
    let b = run_verify(42, Scale::Small);
    check(a.passed(), || format!("verify reported failures:\n{}", a.to_text(false)))?;
    check(a.to_text(false) == b.to_text(false), || "reports differ".into())?;
    check(a.suites == b.suites, || "suite results differ".into())?;
    check(first < Duration::from_secs(60), || format!("small scale took {first:?}"))?;
    Ok(format!(
        "{} suites identical across two runs, small scale {:.1}s",
        a.suites.len(),
        first.as_secs_f64()
    ))
}
