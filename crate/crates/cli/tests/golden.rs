//! Golden-file tests for every `dglab` subcommand.
//!
//! Each case runs the binary on files under `tests/fixtures` and compares
//! stdout and stderr with `tests/golden/<case>.txt`. Set `UPDATE_GOLDEN=1`
//! to rewrite the expected files.

use std::path::PathBuf;
use std::process::Command;

struct Case {
    name: &'static str,
    args: &'static [&'static str],
    code: i32,
}

const fn case(name: &'static str, args: &'static [&'static str], code: i32) -> Case {
    Case { name, args, code }
}

const CASES: &[Case] = &[
    case("positivity_positive", &["positivity", "check", "--elem", "@weight", "--set", "@upper"], 0),
    case("positivity_negative", &["positivity", "check", "--elem", "@weight", "--set", "@middle"], 3),
    case(
        "positivity_json",
        &["--format", "json", "positivity", "check", "--elem", "@weight", "--set", "@middle"],
        3,
    ),
    case(
        "positivity_strict_warning",
        &["--strict", "positivity", "check", "--elem", "@one", "--set", "@unreduced"],
        0,
    ),
    case(
        "positivity_strict_rejects",
        &["--strict", "positivity", "check", "--elem", "@noncanonical", "--set", "@middle"],
        2,
    ),
    case("parse_error", &["positivity", "check", "--elem", "@bad_exponent", "--set", "@middle"], 2),
    case("missing_file", &["positivity", "check", "--elem", "@nonexistent", "--set", "@middle"], 2),
    case("usage_error", &["positivity", "check", "--elem", "@weight"], 2),
    case("sandwich_solve", &["sandwich", "solve", "--problem", "@problem"], 0),
    case("sandwich_json", &["--format", "json", "sandwich", "solve", "--problem", "@problem"], 0),
    case("sandwich_exhausted", &["sandwich", "solve", "--problem", "@problem_deg0"], 4),
    case(
        "riesz_interpolate",
        &["riesz", "interpolate", "--x1", "@x1", "--x2", "@x2", "--y1", "@y1", "--y2", "@y2", "--spec", "@spec_middle"],
        0,
    ),
    case(
        "riesz_precondition",
        &["riesz", "interpolate", "--x1", "@y1", "--x2", "@x2", "--y1", "@x1", "--y2", "@y2", "--spec", "@spec_middle"],
        3,
    ),
    case("coker_solve", &["coker", "solve", "--elem", "@coboundary"], 0),
    case("coker_solve_rejects", &["coker", "solve", "--elem", "@y1"], 3),
    case("coker_in_image", &["coker", "in-image", "--elem", "@coboundary"], 0),
    case("coker_not_in_image", &["coker", "in-image", "--elem", "@mixed"], 3),
    case("coker_s_map", &["coker", "s-map", "--elem", "@mixed"], 0),
    case("coker_s_map_json", &["--format", "json", "coker", "s-map", "--elem", "@mixed"], 0),
    case("coker_positive_rep", &["coker", "positive-rep", "--elem", "@cone", "--spec", "@spec_disjoint"], 0),
    case("kms_spectrum_spec", &["kms", "spectrum", "--spec", "@spec_two_points"], 0),
    case("kms_spectrum_half", &["kms", "spectrum", "--spec", "@spec_half"], 0),
    case("kms_spectrum_t_set", &["kms", "spectrum", "--t-set", "@t_set"], 0),
    case("kms_spectrum_beta_set", &["kms", "spectrum", "--beta-set", "@betas", "--precision", "20"], 0),
    case("kms_spectrum_json", &["--format", "json", "kms", "spectrum", "--beta-set", "@betas"], 0),
    case("kms_classify_exists", &["kms", "classify", "--s", "1/2", "--spec", "@spec_middle"], 0),
    case("kms_classify_absent", &["kms", "classify", "--s", "5", "--spec", "@spec_middle"], 3),
    case("kms_classify_bad_s", &["kms", "classify", "--s", "1", "--spec", "@spec_middle"], 3),
    case(
        "kms_trace",
        &["kms", "trace", "--measure", "@measure", "--elem", "@mixed", "--set", "@trace_set"],
        0,
    ),
    case("kms_trace_atoms", &["kms", "trace", "--measure", "@measure", "--elem", "@mixed"], 0),
    case(
        "kms_trace_outside",
        &["kms", "trace", "--measure", "@measure_outside", "--elem", "@mixed", "--spec", "@spec_middle"],
        3,
    ),
    case("spec_validate", &["spec", "validate", "--spec", "@spec_disjoint"], 0),
    case("spec_validate_violation", &["spec", "validate", "--spec", "@spec_violating"], 3),
    case(
        "verify_subset",
        &["verify", "--seed", "42", "--suite", "ring_laws", "--suite", "s_map", "--no-timing"],
        0,
    ),
    case("verify_unknown_suite", &["verify", "--suite", "nope"], 2),
];

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn run(case: &Case) -> (i32, String) {
    let args: Vec<String> = case
        .args
        .iter()
        .map(|a| match a.strip_prefix('@') {
            Some(name) => format!("tests/fixtures/{name}.json"),
            None => a.to_string(),
        })
        .collect();
    let out = Command::new(env!("CARGO_BIN_EXE_dglab"))
        .args(&args)
        .current_dir(crate_dir())
        .env_remove("DGLAB_MAX_DEGREE")
        .output()
        .expect("binary runs");
    let mut text = format!("$ dglab {}\n", args.join(" "));
    text.push_str("--- stdout\n");
    text.push_str(&String::from_utf8_lossy(&out.stdout));
    text.push_str("--- stderr\n");
    text.push_str(&String::from_utf8_lossy(&out.stderr));
    (out.status.code().unwrap_or(-1), text)
}

#[test]
fn golden_files() {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    let mut mismatches = Vec::new();
    for case in CASES {
        let (code, text) = run(case);
        let path = crate_dir().join("tests/golden").join(format!("{}.txt", case.name));
        if update {
            std::fs::write(&path, &text).unwrap();
        } else {
            let expected = std::fs::read_to_string(&path)
                .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            if expected != text {
                mismatches.push(format!("{}:\n--- expected\n{expected}--- got\n{text}", case.name));
            }
        }
        if code != case.code {
            mismatches.push(format!("{}: exit code {code}, expected {}", case.name, case.code));
        }
    }
    assert!(mismatches.is_empty(), "{}", mismatches.join("\n"));
}

#[test]
fn every_subcommand_has_a_case() {
    let leaves = [
        "positivity check",
        "sandwich solve",
        "riesz interpolate",
        "coker solve",
        "coker in-image",
        "coker s-map",
        "coker positive-rep",
        "kms spectrum",
        "kms classify",
        "kms trace",
        "spec validate",
        "verify",
    ];
    for leaf in leaves {
        let words: Vec<&str> = leaf.split(' ').collect();
        let covered = CASES.iter().any(|c| {
            let plain: Vec<&str> = c.args.iter().copied().filter(|a| !a.starts_with('-')).collect();
            plain.starts_with(&words)
        });
        assert!(covered, "no golden case for `{leaf}`");
    }
}
