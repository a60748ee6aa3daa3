use std::fmt::Write as _;

use lo_core::boxes::fig4_family;
use lo_core::boxes::{lo_threshold, tensor_power, AffineFamily};
use lo_core::classify::{
    classify as classify_list, classify_scenario, CanonicalForm, Classification,
};
use lo_core::cliques::{par_enumerate_maximal_cliques, Clique};
use lo_core::dgp::DgpInstance;
use lo_core::error::LoError;
use lo_core::graph::OrthogonalityGraph;
use lo_core::inequality::{parse_inequality_list, LoInequality};
use lo_core::nspolytope::ns_max_with_witness;
use lo_core::rational::{format_rational, parse_rational, to_f64, Rational};
use lo_core::witness::violation_witness;
use serde_json::{json, Value};

use crate::inputs::{full_graph, scenario, Inputs};
use crate::report::{CliError, Outcome};
use crate::{
    ClassifyArgs, CliquesArgs, DgpArgs, EvalArgs, Fig4Args, FormArg, GraphArgs, NsmaxArgs,
    ThresholdArgs, WitnessArgs,
};

type CmdResult = Result<Outcome, CliError>;

fn events_of(ineq: &LoInequality) -> Vec<String> {
    ineq.events().iter().map(|e| e.to_string()).collect()
}

fn clique_events(g: &OrthogonalityGraph, c: &Clique) -> Vec<String> {
    c.vertices()
        .iter()
        .map(|&v| g.event(v).to_string())
        .collect()
}

pub fn graph(a: &GraphArgs) -> CmdResult {
    let s = scenario(&a.scenario)?;
    let g = full_graph(s)?;
    if let Some(path) = &a.dot {
        std::fs::write(path, g.to_text())?;
    }
    Ok(Outcome {
        text: format!("vertices={} edges={}\n", g.order(), g.edge_count()),
        scenario: Some(s),
        results: json!({"vertices": g.order(), "edges": g.edge_count()}),
        ..Outcome::default()
    })
}

pub fn cliques(a: &CliquesArgs, json_out: bool) -> CmdResult {
    let s = scenario(&a.scenario)?;
    let mut inputs = Inputs::default();
    let full = full_graph(s)?;
    let g = match &a.support {
        Some(path) => {
            let b = inputs.behavior(&path.display().to_string())?;
            full.support_subgraph(&b)?
        }
        None => full,
    };
    let found = par_enumerate_maximal_cliques(g.bits(), a.min_size, a.limit);
    let mut cliques = found.cliques;
    // reports must be reproducible, so JSON output is always sorted
    if a.sorted || json_out {
        for c in &mut cliques {
            let mut ids = c.event_ids(&g);
            ids.sort_unstable();
            *c = Clique::new(ids.iter().filter_map(|&k| g.vertex_of_event(k)).collect());
        }
        cliques.sort_by_cached_key(|c| c.event_ids(&g));
    }
    let lists: Vec<Vec<String>> = cliques.iter().map(|c| clique_events(&g, c)).collect();
    let mut text = String::new();
    for l in &lists {
        let _ = writeln!(text, "{}", l.join(","));
    }
    if found.truncated {
        eprintln!(
            "note: stopped at the limit of {} cliques",
            a.limit.unwrap_or(0)
        );
    }
    Ok(Outcome {
        text,
        scenario: Some(s),
        inputs: inputs.digests,
        results: json!({
            "vertices": g.order(),
            "count": lists.len(),
            "truncated": found.truncated,
            "cliques": lists,
        }),
    })
}

pub fn classify(a: &ClassifyArgs) -> CmdResult {
    let s = scenario(&a.scenario)?;
    let form = match a.form {
        FormArg::Signature => CanonicalForm::LocalSignature,
        FormArg::Reduced => CanonicalForm::ReducedVector,
    };
    let mut inputs = Inputs::default();
    let result = match &a.input {
        Some(path) => {
            let text = inputs.read(path)?;
            let list = parse_inequality_list(&text, Some(s))?;
            if let Some(bad) = list.iter().find(|i| i.scenario() != s) {
                return Err(LoError::ScenarioMismatch {
                    expected: s.to_string(),
                    found: bad.scenario().to_string(),
                }
                .into());
            }
            classify_list(list, s, form)?
        }
        None => classify_scenario(s, form)?,
    };
    Ok(classification_outcome(s, result, inputs))
}

fn classification_outcome(
    s: lo_core::scenario::Scenario,
    c: Classification,
    inputs: Inputs,
) -> Outcome {
    let mut text = String::new();
    let mut classes = Vec::new();
    for (i, class) in c.classes.iter().enumerate() {
        let kind = if class.trivial {
            "trivial"
        } else {
            "nontrivial"
        };
        let events = events_of(&class.representative);
        let _ = writeln!(
            text,
            "class {}: {kind} ns_max={} orbit_size={} inequalities={} representative={}",
            i + 1,
            format_rational(&class.ns_max),
            class.orbit_size,
            class.inequality_count,
            events.join(",")
        );
        classes.push(json!({
            "representative": events,
            "orbit_size": class.orbit_size,
            "inequalities": class.inequality_count,
            "members": class.members,
            "ns_max": format_rational(&class.ns_max),
            "trivial": class.trivial,
        }));
    }
    let _ = writeln!(
        text,
        "classes={} nontrivial={} trivial={}",
        c.classes.len(),
        c.nontrivial_count(),
        c.trivial_count()
    );
    Outcome {
        text,
        scenario: Some(s),
        inputs: inputs.digests,
        results: json!({
            "classes": classes,
            "nontrivial": c.nontrivial_count(),
            "trivial": c.trivial_count(),
            "inputs": c.inputs,
        }),
    }
}

pub fn eval(a: &EvalArgs) -> CmdResult {
    let mut inputs = Inputs::default();
    let b = tensor_power(&inputs.behavior(&a.behavior)?, a.copies)?;
    let text = inputs.read(&a.ineq)?;
    let ineq = LoInequality::from_text(&text, Some(b.scenario()))?;
    let value = ineq.evaluate(&b)?;
    let violated = value > ineq.bound();
    Ok(Outcome {
        text: format!("{}\n", format_rational(&value)),
        scenario: Some(b.scenario()),
        inputs: inputs.digests,
        results: json!({
            "value": format_rational(&value),
            "violated": violated,
            "copies": a.copies,
        }),
    })
}

pub fn witness(a: &WitnessArgs) -> CmdResult {
    let mut inputs = Inputs::default();
    let b = tensor_power(&inputs.behavior(&a.behavior)?, a.copies)?;
    let g = full_graph(b.scenario())?;
    let found = violation_witness(&b, &g)?;
    let (text, results) = match found {
        Some((clique, value)) => {
            let events = clique_events(&g, &clique);
            (
                format!("{}\n{}\n", format_rational(&value), events.join(",")),
                json!({"violated": true, "value": format_rational(&value), "clique": events}),
            )
        }
        None => ("no violation\n".to_string(), json!({"violated": false})),
    };
    Ok(Outcome {
        text,
        scenario: Some(b.scenario()),
        inputs: inputs.digests,
        results,
    })
}

pub fn nsmax(a: &NsmaxArgs) -> CmdResult {
    let mut inputs = Inputs::default();
    let fallback = a.scenario.as_deref().map(scenario).transpose()?;
    let text = inputs.read(&a.ineq)?;
    let ineq = LoInequality::from_text(&text, fallback)?;
    if let Some(s) = fallback {
        if s != ineq.scenario() {
            return Err(LoError::ScenarioMismatch {
                expected: s.to_string(),
                found: ineq.scenario().to_string(),
            }
            .into());
        }
    }
    let (value, box_) = ns_max_with_witness(&ineq)?;
    if let Some(path) = &a.witness {
        std::fs::write(path, box_.to_json_string())?;
    }
    Ok(Outcome {
        text: format!("{}\n", format_rational(&value)),
        scenario: Some(ineq.scenario()),
        inputs: inputs.digests,
        results: json!({
            "ns_max": format_rational(&value),
            "trivial": value == Rational::from_integer(1.into()),
        }),
    })
}

pub fn threshold(a: &ThresholdArgs) -> CmdResult {
    let mut inputs = Inputs::default();
    let tolerance = parse_rational(&a.tolerance)?;
    if tolerance <= Rational::from_integer(0.into()) {
        return Err(CliError::Usage("--tolerance must be positive".into()));
    }
    let text = inputs.read(&a.ineq)?;
    let family = AffineFamily::noisy_pr();
    let ineq = LoInequality::from_text(&text, None)?;
    let (text, results) = match lo_threshold(&family, &ineq, a.copies, &tolerance) {
        Ok(t) => {
            let (lo, hi) = (format_rational(&t.lower), format_rational(&t.upper));
            (
                format!("[{lo}, {hi}]\n{:.6}\n", t.midpoint()),
                json!({
                    "lower": lo,
                    "upper": hi,
                    "decimal": format!("{:.6}", t.midpoint()),
                    "copies": a.copies,
                }),
            )
        }
        Err(LoError::NoViolationInRange) => (
            "no violation for q in (0, 1]\n".to_string(),
            json!({"lower": Value::Null, "upper": Value::Null, "copies": a.copies}),
        ),
        Err(e) => return Err(e.into()),
    };
    Ok(Outcome {
        text,
        scenario: Some(ineq.scenario()),
        inputs: inputs.digests,
        results,
    })
}

pub fn dgp(a: &DgpArgs) -> CmdResult {
    let mut inputs = Inputs::default();
    let text = inputs.read(&a.instance)?;
    let inst = DgpInstance::from_json_str(&text)?;
    let difficult = inst.is_maximally_difficult();
    let mut out = format!("size={} maximally_difficult={difficult}\n", inst.size());
    let mut results = json!({"size": inst.size(), "maximally_difficult": difficult});
    if difficult {
        let ineq = inst.to_inequality()?;
        let _ = writeln!(out, "inequality={}", events_of(&ineq).join(","));
        results["inequality"] = json!(events_of(&ineq));
    }
    if a.classical_value {
        let v = inst.classical_value()?;
        let _ = writeln!(out, "classical_value={}", format_rational(&v));
        results["classical_value"] = json!(format_rational(&v));
    }
    Ok(Outcome {
        text: out,
        scenario: Some(inst.scenario()),
        inputs: inputs.digests,
        results,
    })
}

/// Grid over `ξ + γ ≤ 1` of the PR / local / noise mixture.
pub fn fig4(a: &Fig4Args) -> CmdResult {
    if a.steps < 2 {
        return Err(CliError::Usage("--steps must be at least 2".into()));
    }
    let mut inputs = Inputs::default();
    let text = inputs.read(&a.ineq)?;
    let ineq = LoInequality::from_text(&text, None)?;
    let denom = (a.steps - 1) as i64;
    let mut csv = String::from("xi,gamma,value,violated\n");
    let mut rows = Vec::new();
    for i in 0..=denom {
        for j in 0..=denom - i {
            let xi = Rational::new(i.into(), denom.into());
            let gamma = Rational::new(j.into(), denom.into());
            let b = tensor_power(&fig4_family(&xi, &gamma)?, a.copies)?;
            let value = ineq.evaluate(&b)?;
            let violated = value > ineq.bound();
            let _ = writeln!(
                csv,
                "{},{},{},{violated}",
                to_f64(&xi),
                to_f64(&gamma),
                format_rational(&value)
            );
            rows.push(json!({
                "xi": format_rational(&xi),
                "gamma": format_rational(&gamma),
                "value": format_rational(&value),
                "violated": violated,
            }));
        }
    }
    Ok(Outcome {
        text: csv,
        scenario: Some(ineq.scenario()),
        inputs: inputs.digests,
        results: json!({"copies": a.copies, "points": rows}),
    })
}
