//! Metrics attached to goal models as quality sinks.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::diag::{codes, sort_diagnostics, Diagnostic};
use crate::govern::MetricDef;
use crate::lifecycle::normalize_tag;
use crate::model::{Contribution, ElementKind, GElement, GoalModel, Strength};

/// Identifier of the quality standing for metric `name`.
pub fn metric_quality_id(name: &str) -> String {
    format!("m-{}", normalize_tag(name))
}

/// Adds one quality per linked metric, with a Helps contribution from every
/// linked element. The quality lives in the actor owning the first linked
/// element and has no outgoing links, so labels of existing elements are
/// unaffected. Linking again adds nothing.
pub fn link_metrics(m: &GoalModel, ms: &[MetricDef]) -> (GoalModel, Vec<Diagnostic>) {
    let mut out = m.clone();
    let mut diags = Vec::new();
    for metric in ms {
        if metric.links.is_empty() {
            diags.push(
                Diagnostic::warning(
                    codes::W_UNLINKED,
                    format!("metric `{}` is not linked to any goal or task", metric.name),
                )
                .at(&metric.loc),
            );
            continue;
        }
        let mut sources = Vec::new();
        for l in &metric.links {
            match out.owner_of(l) {
                Some(a) => sources.push((a.id.clone(), l.clone())),
                None => diags.push(
                    Diagnostic::error(codes::E_REF, format!("metric `{}` links to unknown element `{l}`", metric.name))
                        .at(&metric.loc),
                ),
            }
        }
        let Some((home, _)) = sources.first().cloned() else {
            continue;
        };
        let qid = metric_quality_id(&metric.name);
        match out.element(&qid) {
            Some(e) if e.kind != ElementKind::Quality => {
                diags.push(
                    Diagnostic::error(codes::E_DUP, format!("`{qid}` already names a {} in the model", e.kind))
                        .at(&metric.loc),
                );
                continue;
            }
            Some(_) => {}
            None => {
                let actor = out.actors.iter_mut().find(|a| a.id == home).expect("owner exists");
                let mut q = GElement::new(qid.clone(), ElementKind::Quality, metric.name.clone());
                q.loc = metric.loc.clone();
                actor.elements.push(q);
            }
        }
        for (actor_id, el) in sources {
            let actor = out.actors.iter_mut().find(|a| a.id == actor_id).expect("owner exists");
            let source = actor.elements.iter_mut().find(|e| e.id == el).expect("element exists");
            let present = source.contributions.iter().any(|c| c.target == qid && c.strength == Strength::Helps);
            if !present {
                source.contributions.push(Contribution {
                    target: qid.clone(),
                    strength: Strength::Helps,
                    loc: metric.loc.clone(),
                });
            }
        }
    }
    sort_diagnostics(&mut diags);
    (out, diags)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WhoRow {
    pub metric: String,
    pub why: String,
    pub who: Vec<String>,
    #[serde(rename = "where")]
    pub sources: Vec<String>,
    /// Owners of the linked elements.
    pub actors: Vec<String>,
}

pub fn who_report(m: &GoalModel, ms: &[MetricDef]) -> Vec<WhoRow> {
    ms.iter()
        .map(|metric| {
            let actors: BTreeSet<String> =
                metric.links.iter().filter_map(|l| m.owner_of(l)).map(|a| a.id.clone()).collect();
            WhoRow {
                metric: metric.name.clone(),
                why: metric.why.clone(),
                who: metric.who.clone(),
                sources: metric.sources.clone(),
                actors: actors.into_iter().collect(),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_goal_model;
    use crate::evaluate::{propagate, Scenario};
    use crate::label::Label;

    fn model() -> GoalModel {
        parse_goal_model(
            r#"goalmodel m {
                actor prov { goal g "Govern" task t "Provide API Governance" g and t }
                actor dev { task u "Use API" }
            }"#,
        )
        .unwrap()
    }

    fn metric(name: &str, links: &[&str]) -> MetricDef {
        let mut d = MetricDef::new(name);
        d.links = links.iter().map(|s| s.to_string()).collect();
        d
    }

    #[test]
    fn link_creates_helps_sink() {
        let (linked, d) = link_metrics(&model(), &[metric("Consistency", &["t"])]);
        assert!(d.is_empty());
        let q = linked.element("m-consistency").unwrap();
        assert_eq!(q.kind, ElementKind::Quality);
        assert!(q.contributions.is_empty());
        assert_eq!(linked.owner_of("m-consistency").unwrap().id, "prov");
        let t = linked.element("t").unwrap();
        assert_eq!(t.contributions[0].strength, Strength::Helps);

        let r = propagate(&linked, &Scenario::new("s").with("t", Label::Satisfied));
        assert_eq!(r.label("m-consistency"), Label::PartiallySatisfied);
    }

    #[test]
    fn idempotent() {
        let ms = [metric("Consistency", &["t", "u"])];
        let (once, _) = link_metrics(&model(), &ms);
        let (twice, _) = link_metrics(&once, &ms);
        assert_eq!(once, twice);
    }

    #[test]
    fn unlinked_and_dangling() {
        let (_, d) = link_metrics(&model(), &[metric("Lonely", &[]), metric("Bad", &["ghost"])]);
        let codes: Vec<_> = d.iter().map(|d| d.code.as_str()).collect();
        assert!(codes.contains(&"W-UNLINKED") && codes.contains(&"E-REF"));
    }

    #[test]
    fn who_rows() {
        assert!(who_report(&model(), &[]).is_empty());
        let rows = who_report(&model(), &[metric("Consistency", &["t", "u"])]);
        assert_eq!(rows[0].actors, ["dev", "prov"]);
    }
}
