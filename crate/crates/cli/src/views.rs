//! JSON and text renderings of library results.

use dewkit::families::SpanCertificate;
use dewkit::reproduce::ReproductionReport;
use dewkit::subspace::CesCertificate;
use dewkit::tensor::{CMat, CVec, ProductVector};
use dewkit::witness::{EwVerdict, OptimalityReport};
use serde_json::{json, Value};

pub fn vector(v: &CVec) -> Value {
    Value::from(v.iter().map(|z| json!([z.re, z.im])).collect::<Vec<_>>())
}

pub fn matrix(x: &CMat) -> Value {
    Value::from((0..x.nrows()).map(|r| vector(&x.row(r).transpose())).collect::<Vec<_>>())
}

pub fn product_vector(pv: &ProductVector) -> Value {
    json!({ "e": vector(&pv.e), "f": vector(&pv.f) })
}

pub fn ces_certificate(c: &CesCertificate) -> Value {
    json!({
        "is_ces": c.is_ces,
        "max_product_overlap": c.max_product_overlap,
        "witness_vector": c.witness_vector.as_ref().map(product_vector),
        "multistarts_used": c.multistarts_used,
        "seed": c.seed,
        "tol": c.tol,
    })
}

pub fn ew_verdict(v: &EwVerdict) -> Value {
    json!({
        "is_ew": v.is_ew,
        "min_product_value": v.min_product_value,
        "min_eigenvalue": v.min_eigenvalue,
        "violating_product": v.violating_product.as_ref().map(product_vector),
    })
}

pub fn optimality(r: &OptimalityReport) -> Value {
    json!({
        "pw_span_dim": r.pw_span_dim,
        "spanning_certified_optimal": r.spanning_certified_optimal,
        "status": r.status,
        "subtraction": r.subtractable.as_ref().map(|s| json!({
            "epsilon": s.epsilon,
            "p": matrix(&s.p),
            "improved_min_product_value": s.improved_verdict.min_product_value,
        })),
    })
}

pub fn span(c: &SpanCertificate) -> Value {
    serde_json::to_value(c).expect("plain struct")
}

fn text_value(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn reports_text(reports: &[ReproductionReport]) -> String {
    let mut out = String::new();
    for r in reports {
        let verdict = if r.passed() { "PASS" } else { "FAIL" };
        out.push_str(&format!("{} [{}] seed={}\n", r.example_id, verdict, r.seed));
        for c in &r.claims {
            let mark = if c.pass { "ok  " } else { "FAIL" };
            out.push_str(&format!("  {mark} {}: computed {} ({})\n", c.description, c.computed, expected_text(c)));
        }
        for o in &r.observations {
            out.push_str(&format!("  note {}: {}\n", o.description, text_value(&o.value)));
        }
    }
    out
}

fn expected_text(c: &dewkit::reproduce::Claim) -> String {
    use dewkit::reproduce::Expected::*;
    match c.expected {
        Equals { value, tol } if tol == 0.0 => format!("expected {value}"),
        Equals { value, tol } => format!("expected {value} ± {tol:e}"),
        AtMost { value } => format!("expected ≤ {value:e}"),
        AtLeast { value } => format!("expected ≥ {value:e}"),
        Below { value } => format!("expected < {value:e}"),
    }
}

/// Flat `key: value` lines for a JSON object, nested keys joined with dots.
pub fn flat_text(v: &Value) -> String {
    fn walk(prefix: &str, v: &Value, out: &mut String) {
        match v {
            Value::Object(map) => {
                for (k, x) in map {
                    let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                    walk(&key, x, out);
                }
            }
            Value::Array(items) if items.iter().any(|x| x.is_object() || x.is_array()) && items.len() > 8 => {
                out.push_str(&format!("{prefix}: [{} entries]\n", items.len()));
            }
            other => out.push_str(&format!("{prefix}: {}\n", text_value(other))),
        }
    }
    let mut out = String::new();
    walk("", v, &mut out);
    out
}
