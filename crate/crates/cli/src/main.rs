//! `dglab`: exact positivity, interpolation and cokernel computations in the
//! ordered group `G = ⊕_Z Z[t, 1/t, 1/(1-t)]`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use dglab_core::k_theory::{in_image, positive_representative, s_of, solve_coboundary};
use dglab_core::param_set::{f1_for_k, validate_spec, BetaSet, KmsSpec, ParamSet};
use dglab_core::positivity::is_positive_on;
use dglab_core::rational::{format_rational, half, parse_rational};
use dglab_core::report::{
    beta_component_json, beta_component_text, certificate_json, membership_json,
    membership_text,
};
use dglab_core::riesz::interpolate;
use dglab_core::ring::RingElement;
use dglab_core::sandwich::{solve_sandwich, SandwichProblem, SearchCaps, MAX_DEGREE_ENV};
use dglab_core::serial::{self, FileFormat, ParseOptions, SpecSets};
use dglab_core::traces::{
    classify_eigenfunctional, kms_spectrum, measure_trace, AtomicMeasure, Eigenfunctional,
};
use dglab_core::verify::{run_verify_suites, suite_names, Scale};
use dglab_core::{Error, GroupElement};

const EXIT_USAGE: u8 = 2;
const EXIT_NEGATIVE: u8 = 3;
const EXIT_EXHAUSTED: u8 = 4;
const EXIT_INTERNAL: u8 = 5;

#[derive(Parser)]
#[command(name = "dglab", version, about = "Exact computations in a dimension group of rational functions")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Reject non-canonical ring elements and warn about unreduced rationals.
    #[arg(long, global = true)]
    strict: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Exact positivity of a ring element on a parameter set.
    #[command(subcommand)]
    Positivity(PositivityCmd),
    /// Integer polynomial sandwiched between rational functions.
    #[command(subcommand)]
    Sandwich(SandwichCmd),
    /// Riesz interpolation in (G, G+).
    #[command(subcommand)]
    Riesz(RieszCmd),
    /// The cokernel of id - gamma_star.
    #[command(subcommand)]
    Coker(CokerCmd),
    /// Traces, eigen-functionals and the inverse temperature spectrum.
    #[command(subcommand)]
    Kms(KmsCmd),
    /// Parameter-set specifications.
    #[command(subcommand)]
    Spec(SpecCmd),
    /// Seeded randomized replay of the constructive results.
    Verify(VerifyArgs),
}

#[derive(Subcommand)]
enum PositivityCmd {
    Check {
        #[arg(long)]
        elem: PathBuf,
        #[arg(long)]
        set: PathBuf,
    },
}

#[derive(Subcommand)]
enum SandwichCmd {
    Solve {
        #[arg(long)]
        problem: PathBuf,
    },
}

#[derive(Subcommand)]
enum RieszCmd {
    Interpolate {
        #[arg(long)]
        x1: PathBuf,
        #[arg(long)]
        x2: PathBuf,
        #[arg(long)]
        y1: PathBuf,
        #[arg(long)]
        y2: PathBuf,
        #[arg(long)]
        spec: PathBuf,
    },
}

#[derive(Subcommand)]
enum CokerCmd {
    /// The unique y with (id - gamma_star) y = x.
    Solve {
        #[arg(long)]
        elem: PathBuf,
    },
    /// Whether x lies in the image of id - gamma_star.
    InImage {
        #[arg(long)]
        elem: PathBuf,
    },
    /// S(q(x)) = sum_n alpha^n(x_n).
    SMap {
        #[arg(long)]
        elem: PathBuf,
    },
    /// A member of G+ in the coset of x, for x in G++.
    PositiveRep {
        #[arg(long)]
        elem: PathBuf,
        #[arg(long)]
        spec: PathBuf,
    },
}

#[derive(Subcommand)]
enum KmsCmd {
    Spectrum(SpectrumArgs),
    /// Positive functionals with phi(gamma_star x) = s phi(x).
    Classify {
        /// A positive rational other than 1, as "p/q".
        #[arg(long)]
        s: String,
        #[arg(long)]
        spec: PathBuf,
    },
    /// The twisted trace of an atomic measure on F.
    Trace {
        #[arg(long)]
        measure: PathBuf,
        #[arg(long)]
        elem: PathBuf,
        /// The set F the atoms must lie in; the atoms themselves when omitted.
        #[arg(long, conflicts_with = "spec")]
        set: Option<PathBuf>,
        /// Take F from a spec file.
        #[arg(long)]
        spec: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SpectrumArgs {
    #[arg(long, conflicts_with_all = ["f_set", "t_set", "beta_set"])]
    spec: Option<PathBuf>,
    /// F as a t-space set; defaults to {1/2}.
    #[arg(long)]
    f_set: Option<PathBuf>,
    /// F1 as a t-space set.
    #[arg(long, conflicts_with = "beta_set")]
    t_set: Option<PathBuf>,
    /// F1 as a compact set of inverse temperatures, rationalized.
    #[arg(long)]
    beta_set: Option<PathBuf>,
    /// Significant digits kept when rationalizing a beta set.
    #[arg(long, default_value_t = 30)]
    precision: u32,
}

#[derive(Subcommand)]
enum SpecCmd {
    Validate {
        #[arg(long)]
        spec: PathBuf,
    },
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value = "small")]
    scale: Scale,
    /// Run only this suite; repeatable.
    #[arg(long = "suite", value_name = "NAME")]
    suites: Vec<String>,
    /// Leave the wall time out of the report.
    #[arg(long)]
    no_timing: bool,
}

/// Why a command stopped early.
enum Failure {
    Core(Error),
    Io(String),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

/// Rendered output plus the exit status it implies.
struct Outcome {
    json: Value,
    text: String,
    code: u8,
}

impl Outcome {
    fn ok(json: Value, text: String) -> Self {
        Outcome { json, text, code: 0 }
    }

    fn negative_if(mut self, negative: bool) -> Self {
        if negative {
            self.code = EXIT_NEGATIVE;
        }
        self
    }
}

struct Ctx {
    opts: ParseOptions,
}

impl Ctx {
    fn load<T: FileFormat>(&self, path: &Path) -> Result<T, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
        match serial::parse::<T>(&text, self.opts) {
            Ok(p) => {
                for w in p.warnings {
                    eprintln!("warning: {}: {w}", path.display());
                }
                Ok(p.value)
            }
            Err(Error::Parse { offset, message }) => Err(Failure::Usage(format!(
                "{}: parse error at byte {offset}: {message}",
                path.display()
            ))),
            Err(e) => Err(e.into()),
        }
    }

    fn spec(&self, path: &Path) -> Result<KmsSpec, Failure> {
        Ok(self.load::<SpecSets>(path)?.validate()?)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let ctx = Ctx {
        opts: ParseOptions { strict: cli.strict },
    };
    match run(&ctx, cli.command) {
        Ok(out) => {
            match cli.format {
                Format::Json => println!(
                    "{}",
                    serde_json::to_string_pretty(&out.json).expect("serializable")
                ),
                Format::Text => print!("{}", out.text),
            }
            ExitCode::from(out.code)
        }
        Err(f) => {
            let (code, message) = match f {
                Failure::Core(e) => (exit_code(&e), e.to_string()),
                Failure::Io(m) | Failure::Usage(m) => (EXIT_USAGE, m),
            };
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse { .. } | Error::Domain(_) | Error::Limit(_) => EXIT_USAGE,
        Error::EmptyF
        | Error::HalfPointViolation(_)
        | Error::Precondition(_)
        | Error::Infeasible(_)
        | Error::NotOrderUnit(_)
        | Error::HalfPointInfeasible(_)
        | Error::AtomOutsideF(_) => EXIT_NEGATIVE,
        Error::SearchExhausted(_) => EXIT_EXHAUSTED,
        Error::Internal(_) => EXIT_INTERNAL,
    }
}

fn run(ctx: &Ctx, command: Command) -> Result<Outcome, Failure> {
    match command {
        Command::Positivity(PositivityCmd::Check { elem, set }) => {
            let f: RingElement = ctx.load(&elem)?;
            let s: ParamSet = ctx.load(&set)?;
            let cert = is_positive_on(&f, &s);
            let json = json!({
                "element": f.to_json(),
                "set": s.to_json(),
                "certificate": certificate_json(&cert),
            });
            let text = format!("element: {f}\n{cert}");
            Ok(Outcome::ok(json, text).negative_if(!cert.is_positive()))
        }
        Command::Sandwich(SandwichCmd::Solve { problem }) => {
            let mut p: SandwichProblem = ctx.load(&problem)?;
            if std::env::var_os(MAX_DEGREE_ENV).is_some() {
                p.max_degree = SearchCaps::from_env().max_degree;
            }
            let sol = solve_sandwich(&p)?;
            let a = RingElement::from_poly(sol.candidate.clone());
            let certs: Vec<Value> = sol
                .certificates
                .iter()
                .map(|(lo, hi)| json!({ "lower": certificate_json(lo), "upper": certificate_json(hi) }))
                .collect();
            let json = json!({
                "candidate": a.to_json(),
                "degree": sol.degree,
                "iterations": sol.iterations,
                "certificates": certs,
            });
            let mut text = format!(
                "candidate: {a}\ndegree: {}\niterations: {}\n",
                sol.degree, sol.iterations
            );
            for (i, (lo, hi)) in sol.certificates.iter().enumerate() {
                writeln!(text, "constraint {i}: lower < weight * a").unwrap();
                push_indented(&mut text, &lo.to_string());
                writeln!(text, "constraint {i}: weight * a < upper").unwrap();
                push_indented(&mut text, &hi.to_string());
            }
            Ok(Outcome::ok(json, text))
        }
        Command::Riesz(RieszCmd::Interpolate { x1, x2, y1, y2, spec }) => {
            let xs: [GroupElement; 2] = [ctx.load(&x1)?, ctx.load(&x2)?];
            let ys: [GroupElement; 2] = [ctx.load(&y1)?, ctx.load(&y2)?];
            let spec = ctx.spec(&spec)?;
            let r = interpolate([&xs[0], &xs[1]], [&ys[0], &ys[1]], &spec, SearchCaps::from_env())?;
            let ra = RingElement::from_poly(r.a.clone());
            let rb = RingElement::from_poly(r.b.clone());
            let json = json!({
                "z": r.z.to_json(),
                "a": ra.to_json(),
                "b": rb.to_json(),
                "degenerate": r.degenerate,
                "lower": r.lower.iter().map(membership_json).collect::<Vec<_>>(),
                "upper": r.upper.iter().map(membership_json).collect::<Vec<_>>(),
            });
            let mut text = format!("z: {}\na: {ra}\nb: {rb}\ndegenerate: {}\n", r.z, r.degenerate);
            for (i, m) in r.lower.iter().enumerate() {
                writeln!(text, "z - x{}:", i + 1).unwrap();
                push_indented(&mut text, &membership_text(m));
            }
            for (j, m) in r.upper.iter().enumerate() {
                writeln!(text, "y{} - z:", j + 1).unwrap();
                push_indented(&mut text, &membership_text(m));
            }
            Ok(Outcome::ok(json, text))
        }
        Command::Coker(cmd) => coker(ctx, cmd),
        Command::Kms(cmd) => kms(ctx, cmd),
        Command::Spec(SpecCmd::Validate { spec }) => {
            let spec = ctx.spec(&spec)?;
            let json = json!({ "valid": true, "spec": spec.to_json() });
            let text = format!(
                "valid: true\nF: {}\nF1: {}\n",
                set_text(spec.f()),
                set_text(spec.f1())
            );
            Ok(Outcome::ok(json, text))
        }
        Command::Verify(args) => {
            let known: Vec<&str> = suite_names().collect();
            if let Some(bad) = args.suites.iter().find(|s| !known.contains(&s.as_str())) {
                return Err(Failure::Usage(format!(
                    "unknown suite {bad:?}; known suites: {}",
                    known.join(", ")
                )));
            }
            let only: Vec<&str> = args.suites.iter().map(String::as_str).collect();
            let report = run_verify_suites(args.seed, args.scale, &only);
            let mut json = serde_json::to_value(&report).expect("serializable");
            if args.no_timing {
                json.as_object_mut().expect("object").remove("wall_time_secs");
            }
            let text = report.to_text(!args.no_timing);
            let code = if report.passed() { 0 } else { EXIT_INTERNAL };
            Ok(Outcome { json, text, code })
        }
    }
}

fn coker(ctx: &Ctx, cmd: CokerCmd) -> Result<Outcome, Failure> {
    match cmd {
        CokerCmd::Solve { elem } => {
            let x: GroupElement = ctx.load(&elem)?;
            let y = solve_coboundary(&x)?;
            Ok(Outcome::ok(json!({ "y": y.to_json() }), format!("y: {y}\n")))
        }
        CokerCmd::InImage { elem } => {
            let x: GroupElement = ctx.load(&elem)?;
            let inside = in_image(&x);
            let s = s_of(&x);
            let json = json!({ "in_image": inside, "sum_alpha": s.to_json() });
            let text = format!("in_image: {inside}\nsum_alpha: {s}\n");
            Ok(Outcome::ok(json, text).negative_if(!inside))
        }
        CokerCmd::SMap { elem } => {
            let x: GroupElement = ctx.load(&elem)?;
            let s = s_of(&x);
            Ok(Outcome::ok(json!({ "s": s.to_json() }), format!("S: {s}\n")))
        }
        CokerCmd::PositiveRep { elem, spec } => {
            let x: GroupElement = ctx.load(&elem)?;
            let spec = ctx.spec(&spec)?;
            let r = positive_representative(&x, &spec, SearchCaps::from_env())?;
            let b = RingElement::from_poly(r.b.clone());
            let json = json!({
                "y": r.y.to_json(),
                "b": b.to_json(),
                "certificate": membership_json(&r.certificate),
            });
            let mut text = format!("y: {}\nb: {b}\ny in G+:\n", r.y);
            push_indented(&mut text, &membership_text(&r.certificate));
            Ok(Outcome::ok(json, text))
        }
    }
}

fn kms(ctx: &Ctx, cmd: KmsCmd) -> Result<Outcome, Failure> {
    match cmd {
        KmsCmd::Spectrum(args) => spectrum(ctx, args),
        KmsCmd::Classify { s, spec } => {
            let s = parse_rational(&s)
                .map_err(|_| Failure::Usage(format!("--s: invalid rational {s:?}")))?
                .value;
            let spec = ctx.spec(&spec)?;
            let s_text = format_rational(&s);
            match classify_eigenfunctional(&s, &spec)? {
                Eigenfunctional::Constructed(tf) => {
                    let json = json!({
                        "s": s_text,
                        "exists": true,
                        "functional": { "kind": "plain", "t0": format_rational(tf.t0()) },
                    });
                    let text = format!("s: {s_text}\nexists: true\nfunctional: {tf}\n");
                    Ok(Outcome::ok(json, text))
                }
                Eigenfunctional::Absent { t_prime } => {
                    let t = format_rational(&t_prime);
                    let json = json!({ "s": s_text, "exists": false, "t_prime": t });
                    let text = format!("s: {s_text}\nexists: false\nt' = {t} is not in F1\n");
                    Ok(Outcome::ok(json, text).negative_if(true))
                }
            }
        }
        KmsCmd::Trace { measure, elem, set, spec } => {
            let m: AtomicMeasure = ctx.load(&measure)?;
            let x: GroupElement = ctx.load(&elem)?;
            let f = match (set, spec) {
                (Some(p), _) => ctx.load::<ParamSet>(&p)?,
                (None, Some(p)) => ctx.spec(&p)?.f().clone(),
                (None, None) => {
                    ParamSet::normalize(m.atoms().iter().map(|(t, _)| t.clone()).collect(), vec![])?
                }
            };
            let v = measure_trace(&m, &f, &x)?;
            let v = format_rational(&v);
            Ok(Outcome::ok(json!({ "value": v }), format!("value: {v}\n")))
        }
    }
}

fn spectrum(ctx: &Ctx, args: SpectrumArgs) -> Result<Outcome, Failure> {
    let mut rounding = None;
    let spec = if let Some(p) = &args.spec {
        ctx.spec(p)?
    } else {
        let f = match &args.f_set {
            Some(p) => ctx.load::<ParamSet>(p)?,
            None => ParamSet::point(half())?,
        };
        let f1 = match (&args.t_set, &args.beta_set) {
            (Some(p), _) => ctx.load::<ParamSet>(p)?,
            (None, Some(p)) => {
                let k: BetaSet = ctx.load(p)?;
                let r = f1_for_k(&k, args.precision)?;
                rounding = Some((r.precision, r.max_rounding_error));
                r.set
            }
            (None, None) => {
                return Err(Failure::Usage(
                    "kms spectrum needs --spec, --t-set or --beta-set".into(),
                ))
            }
        };
        validate_spec(f, f1)?
    };
    let comps = kms_spectrum(&spec);
    let mut json = json!({
        "spec": spec.to_json(),
        "spectrum": comps.iter().map(beta_component_json).collect::<Vec<_>>(),
    });
    let mut text = format!("F: {}\nF1: {}\n", set_text(spec.f()), set_text(spec.f1()));
    if let Some((precision, err)) = rounding {
        json["precision"] = json!(precision);
        json["max_rounding_error"] = json!(err);
        writeln!(text, "precision: {precision} digits, max rounding error {err:e}").unwrap();
    }
    writeln!(text, "spectrum ({} components):", comps.len()).unwrap();
    for c in &comps {
        writeln!(text, "  {}", beta_component_text(c)).unwrap();
    }
    Ok(Outcome::ok(json, text))
}

fn set_text(s: &ParamSet) -> String {
    let mut parts: Vec<String> = s.points().iter().map(|p| format!("{{{}}}", format_rational(p))).collect();
    parts.extend(
        s.intervals()
            .iter()
            .map(|(a, b)| format!("[{}, {}]", format_rational(a), format_rational(b))),
    );
    if parts.is_empty() {
        "empty".into()
    } else {
        parts.join(" ∪ ")
    }
}

fn push_indented(out: &mut String, block: &str) {
    for line in block.lines() {
        writeln!(out, "  {line}").unwrap();
    }
}

