//! Stable JSON and CSV shapes for reports.
//!
//! Exact values are serialized as strings (`"61/2"`) alongside an `approx`
//! float; identical inputs always produce identical JSON (field order is
//! fixed and floats round-trip through serde_json's shortest form).

use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};

use crate::coarse::{ClosenessReport, ClosenessVerdict, ControlProfile, EquivalencePair};
use crate::exact::{rational_to_string, Enclosure};
use crate::space::Point;
use crate::verifier::ScenarioReport;

/// Schema tag carried by every emitted report.
pub const SCHEMA_VERSION: &str = "v1";

pub fn rational_json(q: &BigRational) -> Value {
    json!({
        "exact": rational_to_string(q),
        "approx": q.to_f64().unwrap_or(f64::NAN),
    })
}

pub fn enclosure_json(e: &Enclosure) -> Value {
    if e.is_exact() {
        json!({
            "exact": rational_to_string(e.lo()),
            "approx": e.approx(),
        })
    } else {
        json!({
            "lo": rational_to_string(e.lo()),
            "hi": rational_to_string(e.hi()),
            "approx": e.approx(),
        })
    }
}

pub fn point_json(p: &Point) -> Value {
    match p {
        Point::Halfline(v) => json!({
            "space": "halfline",
            "value": {
                "exact": v.to_string(),
                "approx": v.to_f64(),
            },
        }),
        Point::Strip { r, label } => json!({
            "space": "strip",
            "r": rational_json(r),
            "j": label,
        }),
        Point::Grid { nsq, r, label } => json!({
            "space": "grid",
            "nsq": nsq,
            "r": rational_json(r),
            "k": label,
        }),
    }
}

fn verdict_json(v: &ClosenessVerdict) -> Value {
    match v {
        ClosenessVerdict::BoundedClose { bound } => json!({
            "kind": "bounded-close",
            "bound": enclosure_json(bound),
        }),
        ClosenessVerdict::Diverging { growth_exponent } => json!({
            "kind": "diverging",
            "growth_exponent": growth_exponent,
        }),
        ClosenessVerdict::Indeterminate => json!({ "kind": "indeterminate" }),
    }
}

/// `{windows, sup_values, witnesses, verdict, constants}` for a closeness
/// trend; `constants` carries whichever of `B`, `rho1`, `C`, `A` apply.
pub fn closeness_report_json(report: &ClosenessReport, constants: Value) -> Value {
    json!({
        "left": report.left,
        "right": report.right,
        "windows": report.windows,
        "sup_values": report.sup_values.iter().map(enclosure_json).collect::<Vec<_>>(),
        "witnesses": report.witnesses.iter().map(point_json).collect::<Vec<_>>(),
        "verdict": verdict_json(&report.verdict),
        "constants": constants,
    })
}

pub fn control_profile_json(profile: &ControlProfile) -> Value {
    json!({
        "map": profile.map,
        "window": profile.window,
        "buckets": profile.buckets.iter().map(|b| json!({
            "upper": rational_to_string(&b.upper),
            "rho_hat": b.rho_hat.as_ref().map(enclosure_json),
            "witness": b.witness.as_ref().map(|(p, q)| json!([point_json(p), point_json(q)])),
        })).collect::<Vec<_>>(),
        "expansion": profile.expansion.iter().map(|e| json!({
            "lower": rational_to_string(&e.lower),
            "s_hat": e.s_hat.as_ref().map(enclosure_json),
        })).collect::<Vec<_>>(),
        "pairs_examined": profile.pairs_examined,
    })
}

pub fn equivalence_pair_json(pair: &EquivalencePair) -> Value {
    let constants = json!({ "B": enclosure_json(&pair.bound) });
    json!({
        "forward": pair.forward,
        "backward": pair.backward,
        "ok": pair.ok,
        "constants": constants,
        "backward_forward": closeness_report_json(&pair.backward_forward, constants.clone()),
        "forward_backward": closeness_report_json(&pair.forward_backward, constants.clone()),
        "forward_profile": control_profile_json(&pair.forward_profile),
        "backward_profile": control_profile_json(&pair.backward_profile),
    })
}

/// The scenario report shape consumed by the CLI and downstream tooling:
/// `{schema, scenario, params, claims: [{id, paper_anchor, verdict,
/// witness, bound}], runtime_ms}`.
pub fn scenario_report_json(report: &ScenarioReport) -> Value {
    let claims: Vec<Value> = report
        .claims
        .iter()
        .map(|c| {
            let mut m = Map::new();
            m.insert("id".into(), json!(c.id));
            m.insert("paper_anchor".into(), json!(c.anchor));
            m.insert("verdict".into(), json!(c.verdict.as_str()));
            m.insert("witness".into(), c.witness.clone().unwrap_or(Value::Null));
            m.insert(
                "bound".into(),
                c.bound.map(|b| json!(b)).unwrap_or(Value::Null),
            );
            Value::Object(m)
        })
        .collect();
    json!({
        "schema": SCHEMA_VERSION,
        "scenario": report.scenario,
        "params": report.params,
        "claims": claims,
        "runtime_ms": report.runtime_ms,
    })
}

/// One row of a sup-distance grid dump.
#[derive(Clone, Debug)]
pub struct SupGridRow {
    pub family: String,
    pub k: u32,
    pub n: u32,
    pub sup: Enclosure,
    pub bound: Option<BigRational>,
    pub within_bound: Option<bool>,
}

/// Render sup-distance rows as CSV (the plotting feed).
pub fn sup_grid_csv(rows: &[SupGridRow]) -> String {
    let mut out = String::from("family,k,n,sup_exact,sup_approx,bound,within_bound\n");
    for row in rows {
        let bound = row
            .bound
            .as_ref()
            .map(rational_to_string)
            .unwrap_or_default();
        let within = row
            .within_bound
            .map(|b| b.to_string())
            .unwrap_or_default();
        let sup_exact = if row.sup.is_exact() {
            rational_to_string(row.sup.lo())
        } else {
            format!("[{};{}]", rational_to_string(row.sup.lo()), rational_to_string(row.sup.hi()))
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            row.family,
            row.k,
            row.n,
            sup_exact,
            row.sup.approx(),
            bound,
            within
        ));
    }
    out
}

/// Claims of a scenario report as CSV.
pub fn scenario_report_csv(report: &ScenarioReport) -> String {
    let mut out = String::from("scenario,claim,paper_anchor,verdict,bound\n");
    for c in &report.claims {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            report.scenario,
            c.id,
            c.anchor,
            c.verdict.as_str(),
            c.bound.map(|b| b.to_string()).unwrap_or_default()
        ));
    }
    out
}

/// Plain-text claim lines, one per claim.
pub fn scenario_report_text(report: &ScenarioReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "scenario {} ({} claims, {} ms)\n",
        report.scenario,
        report.claims.len(),
        report.runtime_ms
    ));
    for c in &report.claims {
        let bound = c
            .bound
            .map(|b| format!(" bound={b}"))
            .unwrap_or_default();
        out.push_str(&format!(
            "  [{}] {} ({}){}\n",
            c.verdict.as_str(),
            c.id,
            c.anchor,
            bound
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::parse_rational;
    use crate::verifier::{Claim, Verdict};

    #[test]
    fn scenario_json_shape() {
        let report = ScenarioReport {
            scenario: "squares".into(),
            params: json!({"k": 2}),
            claims: vec![Claim {
                id: "closeness-upper".into(),
                anchor: "eq:closeness-ceil".into(),
                verdict: Verdict::Pass,
                witness: None,
                bound: Some(0.5),
            }],
            runtime_ms: 12,
        };
        let v = scenario_report_json(&report);
        assert_eq!(v["schema"], json!("v1"));
        assert_eq!(v["claims"][0]["paper_anchor"], json!("eq:closeness-ceil"));
        assert_eq!(v["claims"][0]["verdict"], json!("PASS"));
        assert_eq!(v["claims"][0]["bound"], json!(0.5));
    }

    #[test]
    fn closeness_report_json_has_the_stable_shape() {
        let f = crate::CoarseMapSpec::parse("strip.f?k=1").unwrap();
        let g = crate::CoarseMapSpec::parse("strip.g?k=1").unwrap();
        let windows = crate::Window::strip(parse_rational("8").unwrap(), parse_rational("1").unwrap())
            .unwrap()
            .nested(3)
            .unwrap();
        let report = crate::coarse::closeness_trend(&f, &g, &windows).unwrap();
        let constants = crate::coarse::constants_json(&[
            ("B", &parse_rational("1").unwrap()),
            ("rho1", &parse_rational("1").unwrap()),
        ]);
        let v = closeness_report_json(&report, constants);
        for key in ["windows", "sup_values", "witnesses", "verdict", "constants"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        assert_eq!(v["constants"]["B"]["exact"], json!("1"));
        assert_eq!(v["verdict"]["kind"], json!("bounded-close"));
        assert_eq!(v["sup_values"].as_array().unwrap().len(), 3);
    }

    #[test]
    fn csv_rows_render() {
        let rows = vec![SupGridRow {
            family: "squares".into(),
            k: 2,
            n: 1,
            sup: Enclosure::exact(parse_rational("1/2").unwrap()),
            bound: Some(parse_rational("1/2").unwrap()),
            within_bound: Some(true),
        }];
        let csv = sup_grid_csv(&rows);
        assert!(csv.contains("squares,2,1,1/2,0.5,1/2,true"));
    }

    #[test]
    fn identical_reports_serialize_identically() {
        let make = || ScenarioReport {
            scenario: "strips".into(),
            params: json!({"k": 1, "n": 2}),
            claims: vec![],
            runtime_ms: 0,
        };
        let a = serde_json::to_string_pretty(&scenario_report_json(&make())).unwrap();
        let b = serde_json::to_string_pretty(&scenario_report_json(&make())).unwrap();
        assert_eq!(a, b);
    }
}
