//! Human and JSON renderings of containment verdicts.

use std::fmt::Write;

use schemamap::containment::{DummyOutcome, DummyWitness, EquivalenceOutcome, EquivalenceVerdict, Outcome, Verdict};
use schemamap::oracle::boolean_query_of;
use schemamap::parser::render_fact;
use schemamap::SchemaMapping;
use serde_json::{json, Map, Value as Json};

pub fn outcome_json(o: &Outcome) -> Json {
    match o {
        Outcome::Contained => json!("CONTAINED"),
        Outcome::NotContained => json!("NOT_CONTAINED"),
        Outcome::Inconclusive(_) => json!("INCONCLUSIVE"),
    }
}

fn witness_json(w: &DummyWitness) -> Json {
    let (outcome, reason) = match &w.outcome {
        DummyOutcome::Passed => ("passed", None),
        DummyOutcome::Failed => ("failed", None),
        DummyOutcome::Inconclusive(why) => ("inconclusive", Some(why.clone())),
    };
    let hom = w.homomorphism.as_ref().map(|h| {
        h.null_part()
            .map(|(k, v)| (k.to_string(), Json::String(v.to_string())))
            .collect::<Map<_, _>>()
    });
    json!({
        "dummy": render_fact(w.dummy.fact()),
        "outcome": outcome,
        "reason": reason,
        "left_chase": w.left_chase.as_ref().map(|i| i.facts().map(render_fact).collect::<Vec<_>>()),
        "right_level": w.right_level,
        "right_saturated": w.right_saturated,
        "right_prefix_size": w.right_prefix_size,
        "homomorphism": hom,
    })
}

fn timings(witnesses: &[DummyWitness]) -> Vec<f64> {
    witnesses.iter().map(|w| w.elapsed.as_secs_f64() * 1e3).collect()
}

pub fn verdict_json(v: &Verdict, out: &mut Map<String, Json>) {
    out.insert("verdict".into(), outcome_json(&v.outcome));
    if let Outcome::Inconclusive(why) = &v.outcome {
        out.insert("reason".into(), json!(why));
    }
    out.insert("witnesses".into(), v.witnesses.iter().map(witness_json).collect());
    out.insert("bound_used".into(), json!(v.bound_used));
    out.insert("left_weakly_acyclic".into(), json!(v.left_weakly_acyclic));
    out.insert("right_weakly_acyclic".into(), json!(v.right_weakly_acyclic));
    out.insert("timings_ms".into(), json!({"dummies": timings(&v.witnesses)}));
}

pub fn equivalence_json(v: &EquivalenceVerdict, out: &mut Map<String, Json>) {
    let (verdict, failing) = match &v.outcome {
        EquivalenceOutcome::Equivalent => ("EQUIVALENT", None),
        EquivalenceOutcome::NotEquivalent { failing } => ("NOT_EQUIVALENT", Some(failing.to_string())),
        EquivalenceOutcome::Inconclusive(_) => ("INCONCLUSIVE", None),
    };
    out.insert("verdict".into(), json!(verdict));
    out.insert("failing_direction".into(), json!(failing));
    let mut witnesses = Vec::new();
    for (dir, side) in [("forward", &v.forward), ("backward", &v.backward)] {
        for w in &side.witnesses {
            let mut j = witness_json(w);
            j["direction"] = json!(dir);
            witnesses.push(j);
        }
        out.insert(
            dir.into(),
            json!({"verdict": outcome_json(&side.outcome), "bound_used": side.bound_used}),
        );
    }
    out.insert("witnesses".into(), Json::Array(witnesses));
    out.insert(
        "bound_used".into(),
        json!(v.forward.bound_used.max(v.backward.bound_used)),
    );
    out.insert(
        "timings_ms".into(),
        json!({"forward": timings(&v.forward.witnesses), "backward": timings(&v.backward.witnesses)}),
    );
}

pub fn verdict_text(v: &Verdict, left: &SchemaMapping) -> String {
    let mut s = format!("{}\n", v.outcome);
    let _ = writeln!(s, "level bound: {}", v.bound_used);
    for w in &v.witnesses {
        let fact = render_fact(w.dummy.fact());
        match &w.outcome {
            DummyOutcome::Passed => {
                let _ = writeln!(
                    s,
                    "  {fact}: passed at level {} (left chase {} facts)",
                    w.right_level,
                    w.left_chase_size()
                );
            }
            DummyOutcome::Inconclusive(why) => {
                let _ = writeln!(s, "  {fact}: inconclusive ({why})");
            }
            DummyOutcome::Failed => {
                let _ = writeln!(s, "failing dummy: {fact}");
                let how = if w.right_saturated {
                    "saturated"
                } else {
                    "bound reached"
                };
                let _ = writeln!(
                    s,
                    "right chase: {} facts up to level {} ({how})",
                    w.right_prefix_size, w.right_level
                );
                if let Some(lc) = &w.left_chase {
                    s.push_str("left chase:\n");
                    for f in lc.facts() {
                        let _ = writeln!(s, "  {}.", render_fact(f));
                    }
                    if let Some(q) = boolean_query_of(lc, &left.target) {
                        let _ = writeln!(s, "separating query: {q}");
                    }
                }
            }
        }
    }
    s
}

pub fn equivalence_text(v: &EquivalenceVerdict, a: &SchemaMapping, b: &SchemaMapping) -> String {
    let mut s = format!("{}\n", v.outcome);
    for (label, side, left) in [("A ⊆ B", &v.forward, a), ("B ⊆ A", &v.backward, b)] {
        let _ = writeln!(s, "--- {label} ---");
        s.push_str(&verdict_text(side, left));
    }
    s
}
