//! Structured renderings of certificates and spectra, shared by the command
//! line tool and the Python bindings.

use std::fmt::Write as _;

use serde_json::{json, Value};

use crate::group::GPlusMembership;
use crate::param_set::BetaComponent;
use crate::positivity::{PositivityCertificate, Verdict, Witness};
use crate::rational::format_rational;

pub fn verdict_str(v: Verdict) -> &'static str {
    match v {
        Verdict::Positive => "POSITIVE",
        Verdict::NotPositive => "NOT_POSITIVE",
    }
}

pub fn certificate_json(c: &PositivityCertificate) -> Value {
    let witness = match &c.witness {
        None => Value::Null,
        Some(Witness::Point { t, value }) => json!({
            "kind": "point",
            "t": format_rational(t),
            "value": format_rational(value),
        }),
        Some(Witness::Interval { lo, hi, sign_lo, sign_hi }) => json!({
            "kind": "interval",
            "lo": format_rational(lo),
            "hi": format_rational(hi),
            "sign_lo": sign_lo,
            "sign_hi": sign_hi,
        }),
    };
    let trace: Vec<Value> = c
        .method_trace
        .iter()
        .map(|e| {
            json!({
                "lo": format_rational(&e.lo),
                "hi": format_rational(&e.hi),
                "root_count": e.root_count,
                "sign_lo": e.sign_lo,
                "sign_hi": e.sign_hi,
            })
        })
        .collect();
    json!({
        "verdict": verdict_str(c.verdict),
        "witness": witness,
        "method_trace": trace,
    })
}

pub fn membership_json(m: &GPlusMembership) -> Value {
    json!({
        "member": m.member,
        "alpha_certificate": m.alpha_certificate.as_ref().map(certificate_json),
        "plain_certificate": m.plain_certificate.as_ref().map(certificate_json),
    })
}

/// Indented text block for a membership, one certificate per clause.
pub fn membership_text(m: &GPlusMembership) -> String {
    let mut out = format!("member: {}\n", m.member);
    let clauses = [
        ("sum_alpha on F", &m.alpha_certificate),
        ("sum_plain on F1", &m.plain_certificate),
    ];
    for (label, cert) in clauses {
        if let Some(c) = cert {
            writeln!(out, "{label}:").unwrap();
            for line in c.to_string().lines() {
                writeln!(out, "  {line}").unwrap();
            }
        }
    }
    out
}

pub fn beta_component_json(c: &BetaComponent) -> Value {
    match c {
        BetaComponent::Point { beta, t } => json!({
            "kind": "point",
            "beta": beta,
            "t": format_rational(t),
        }),
        BetaComponent::Interval { lo, hi, t_lo, t_hi } => json!({
            "kind": "interval",
            "beta": [lo, hi],
            "t": [format_rational(t_lo), format_rational(t_hi)],
        }),
    }
}

pub fn beta_component_text(c: &BetaComponent) -> String {
    match c {
        BetaComponent::Point { beta, t } => {
            format!("point beta = {beta}  t = {}", format_rational(t))
        }
        BetaComponent::Interval { lo, hi, t_lo, t_hi } => format!(
            "interval beta in [{lo}, {hi}]  t in [{}, {}]",
            format_rational(t_lo),
            format_rational(t_hi)
        ),
    }
}
