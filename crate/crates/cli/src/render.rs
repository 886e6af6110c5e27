//! JSON fragments shared by the subcommands.

use dcgraphs::analytic::{AsymptoticCount, Regime};
use dcgraphs::numeric::mantissa_exponent;
use dcgraphs::{DegreeSet, Multigraph, SampleReport};
use num_rational::BigRational;
use serde_json::{json, Value};

/// `p/q`, or `p` for integers.
pub fn rational(q: &BigRational) -> String {
    q.to_string()
}

pub fn instance_json(command: &str, d: &DegreeSet, n: usize, m: usize) -> Value {
    json!({ "command": command, "degrees": d.to_string(), "n": n, "m": m })
}

/// Adds `ln`, `log10`, `mantissa`, `exponent` for a positive magnitude.
pub fn add_magnitude(v: &mut Value, ln: f64) {
    v["ln"] = json!(ln);
    v["log10"] = json!(ln / std::f64::consts::LN_10);
    if let Some((mantissa, exponent)) = mantissa_exponent(ln) {
        v["mantissa"] = json!(mantissa);
        v["exponent"] = json!(exponent);
    }
}

pub fn add_asymptotic(v: &mut Value, count: &AsymptoticCount) {
    v["feasible"] = json!(count.feasible);
    add_magnitude(v, count.log_value);
    match &count.regime {
        Regime::Saddle(s) => {
            v["regime"] = json!("saddle");
            v["zeta"] = json!(s.zeta);
            v["phi_prime"] = json!(s.phi_prime_at_zeta);
            v["w"] = json!(s.w_at_zeta);
        }
        Regime::Degenerate { degree } => {
            v["regime"] = json!("degenerate");
            v["degree"] = json!(degree);
        }
        Regime::Infeasible(_) => v["regime"] = json!("infeasible"),
    }
}

pub fn report_json(r: &SampleReport) -> Value {
    json!({
        "samples_requested": r.samples_requested,
        "samples_produced": r.samples_produced,
        "rejections": r.rejections,
        "odd_sum_retries": r.odd_sum_retries,
        "attempts": r.attempts(),
        "empirical_acceptance": r.empirical_acceptance(),
    })
}

pub fn graph_json(g: &Multigraph) -> Value {
    let edges: Vec<Value> = g.edge_sequence().into_iter().map(|(u, v)| json!([u, v])).collect();
    json!({ "n": g.vertex_count(), "m": g.edge_count(), "edges": edges })
}
