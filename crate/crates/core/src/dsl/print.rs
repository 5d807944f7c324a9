//! Canonical text for every dialect. Output depends only on the model, so
//! printing is byte-stable and reparses to an equal model.

use std::fmt::Write;

use super::lexer::is_plain_ident;
use super::{quote, quote_always};
use crate::evaluate::Scenario;
use crate::govern::MetricCatalog;
use crate::lifecycle::{ApiDescriptor, CharField};
use crate::model::{BapoTag, DepEnd, Endpoint, FlowStatus, GoalModel, Layer, LayerAssignments, ValueModel};

/// Models with a canonical textual form.
pub trait Canonical {
    fn write_canonical(&self, out: &mut String);
}

pub fn print_model<M: Canonical + ?Sized>(m: &M) -> String {
    let mut out = String::new();
    m.write_canonical(&mut out);
    out
}

const IND: &str = "  ";

fn tags(out: &mut String, indent: &str, layers: &LayerAssignments, bapo: &std::collections::BTreeSet<BapoTag>) {
    for (focus, layer) in layers {
        let _ = writeln!(out, "{indent}layer({}) = {}", quote(focus), Layer::keyword(*layer));
    }
    if !bapo.is_empty() {
        let letters: Vec<&str> = bapo.iter().map(|t| t.letter()).collect();
        let _ = writeln!(out, "{indent}bapo = {}", letters.join(", "));
    }
}

/// ` "Name"` when the display name differs from the identifier.
fn display(id: &str, name: &str) -> String {
    if id == name {
        String::new()
    } else {
        format!(" {}", quote_always(name))
    }
}

fn dep_end(e: &DepEnd) -> String {
    match &e.element {
        Some(el) => format!("{}.{}", quote(&e.actor), quote(el)),
        None => quote(&e.actor).into_owned(),
    }
}

fn endpoint(e: &Endpoint) -> String {
    match &e.activity {
        Some(a) => format!("{}.{}", quote(&e.actor), quote(a)),
        None => quote(&e.actor).into_owned(),
    }
}

fn list(items: impl IntoIterator<Item = String>) -> String {
    items.into_iter().collect::<Vec<_>>().join(", ")
}

impl Canonical for GoalModel {
    fn write_canonical(&self, out: &mut String) {
        let draft = if self.draft { " draft" } else { "" };
        let _ = writeln!(out, "goalmodel {}{draft} {{", quote(&self.name));
        for a in &self.actors {
            let closed = if a.open { "" } else { " closed" };
            let _ = write!(out, "{IND}actor {}{}{closed}", quote(&a.id), display(&a.id, &a.name));
            let has_body = !a.elements.is_empty() || !a.layer_assignments.is_empty() || !a.bapo_tags.is_empty();
            if !has_body {
                out.push('\n');
                continue;
            }
            out.push_str(" {\n");
            let inner = format!("{IND}{IND}");
            tags(out, &inner, &a.layer_assignments, &a.bapo_tags);
            for e in &a.elements {
                let _ = writeln!(out, "{inner}{} {}{}", e.kind.keyword(), quote(&e.id), display(&e.id, &e.name));
            }
            for e in &a.elements {
                if let Some(r) = &e.refinement {
                    let children = list(r.children.iter().map(|c| quote(c).into_owned()));
                    let _ = writeln!(out, "{inner}{} {} {children}", quote(&e.id), r.kind.keyword());
                }
            }
            for e in &a.elements {
                for c in &e.contributions {
                    let _ = writeln!(out, "{inner}{} {} {}", quote(&e.id), c.strength.keyword(), quote(&c.target));
                }
            }
            let _ = writeln!(out, "{IND}}}");
        }
        for d in &self.dependencies {
            let _ = write!(
                out,
                "{IND}depend {} -> {} : {} {}",
                dep_end(&d.depender),
                dep_end(&d.dependee),
                d.dependum.kind.keyword(),
                quote_always(&d.dependum.name)
            );
            if let Some(l) = d.dependum.initial {
                let _ = write!(out, " label {}", l.keyword());
            }
            let _ = writeln!(out, " as {}", quote(&d.id));
        }
        for l in &self.associations {
            let _ = writeln!(out, "{IND}link {} partof {}", quote(&l.from), quote(&l.to));
        }
        out.push_str("}\n");
    }
}

impl Canonical for ValueModel {
    fn write_canonical(&self, out: &mut String) {
        let _ = writeln!(out, "valuemodel {} {{", quote(&self.name));
        for a in &self.actors {
            let _ = write!(out, "{IND}actor {}{}", quote(&a.id), display(&a.id, &a.name));
            if let Some(p) = &a.parent {
                let _ = write!(out, " in {}", quote(p));
            }
            if a.api_role {
                out.push_str(" api");
            }
            if a.market_segment {
                out.push_str(" segment");
            }
            let has_body = !a.activities.is_empty() || !a.layer_assignments.is_empty() || !a.bapo_tags.is_empty();
            if !has_body {
                out.push('\n');
                continue;
            }
            out.push_str(" {\n");
            let inner = format!("{IND}{IND}");
            tags(out, &inner, &a.layer_assignments, &a.bapo_tags);
            for act in &a.activities {
                let _ = writeln!(out, "{inner}activity {}{}", quote(&act.id), display(&act.id, &act.name));
            }
            let _ = writeln!(out, "{IND}}}");
        }
        for f in &self.flows {
            let _ = write!(
                out,
                "{IND}flow {} from {} to {} : {}",
                quote_always(&f.object.name),
                endpoint(&f.from),
                endpoint(&f.to),
                f.object.kind.keyword()
            );
            match f.status {
                FlowStatus::Normal => {}
                FlowStatus::Problematic => out.push_str(" status problematic"),
                FlowStatus::Missing => out.push_str(" status missing"),
            }
            if let Some(g) = &f.group {
                let _ = write!(out, " group {}", quote(g));
            }
            let _ = writeln!(out, " as {}", quote(&f.id));
        }
        for s in &self.stimuli {
            let _ = writeln!(out, "{IND}stimulus {}{} at {}", quote(&s.id), display(&s.id, &s.name), quote(&s.at));
        }
        out.push_str("}\n");
    }
}

impl Canonical for Scenario {
    fn write_canonical(&self, out: &mut String) {
        let _ = writeln!(out, "scenario {} {{", quote(&self.name));
        for (id, l) in &self.assignments {
            let _ = writeln!(out, "{IND}label {} = {}", quote(id), l.keyword());
        }
        out.push_str("}\n");
    }
}

fn tag(s: &str) -> String {
    if is_plain_ident(s) {
        s.to_string()
    } else {
        quote_always(s)
    }
}

impl Canonical for ApiDescriptor {
    fn write_canonical(&self, out: &mut String) {
        let _ = writeln!(out, "api {} {{", quote(&self.name));
        let _ = writeln!(out, "{IND}stage {}", self.declared_stage.keyword());
        for f in CharField::ALL {
            if let Some(v) = self.observed.get(f) {
                let _ = writeln!(out, "{IND}{} {}", f.keyword(), v.keyword);
            }
        }
        for s in &self.curve {
            let _ = writeln!(out, "{IND}sample {} {} {}", s.t, s.stage.keyword(), s.value);
        }
        if !self.transition_rationales.is_empty() {
            let _ = writeln!(out, "{IND}rationale {}", list(self.transition_rationales.iter().map(|r| tag(r))));
        }
        out.push_str("}\n");
    }
}

impl Canonical for MetricCatalog {
    fn write_canonical(&self, out: &mut String) {
        let _ = writeln!(out, "metrics {} {{", quote(&self.name));
        let inner = format!("{IND}{IND}");
        for m in &self.metrics {
            let _ = writeln!(out, "{IND}metric {} {{", quote(&m.name));
            if !m.what.is_empty() {
                let _ = writeln!(out, "{inner}what {}", quote_always(&m.what));
            }
            if !m.why.is_empty() {
                let _ = writeln!(out, "{inner}why {}", quote_always(&m.why));
            }
            if !m.who.is_empty() {
                let _ = writeln!(out, "{inner}who {}", list(m.who.iter().map(|s| quote_always(s))));
            }
            if !m.sources.is_empty() {
                let _ = writeln!(out, "{inner}where {}", list(m.sources.iter().map(|s| quote_always(s))));
            }
            if !m.dimensions.is_empty() {
                let _ = writeln!(out, "{inner}dims {}", list(m.dimensions.iter().map(|d| d.keyword().to_string())));
            }
            if let Some(a) = m.automation {
                let _ = writeln!(out, "{inner}automation {}", a.keyword());
            }
            if !m.links.is_empty() {
                let _ = writeln!(out, "{inner}links {}", list(m.links.iter().map(|l| quote(l).into_owned())));
            }
            let _ = writeln!(out, "{IND}}}");
        }
        out.push_str("}\n");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{parse_api_descriptor, parse_goal_model, parse_metric_catalog, parse_scenario, parse_value_model};

    #[test]
    fn empty_value_model() {
        assert_eq!(print_model(&ValueModel::new("m")), "valuemodel m {\n}\n");
    }

    #[test]
    fn goal_round_trip() {
        let text = r#"goalmodel "api" draft {
            actor dev "App Developer" {
                layer(device) = usage
                bapo = B, O
                goal g "Build app"
                task "Use API"
                quality q "Fast"
                g or "Use API"
                "Use API" helps q
            }
            actor prov closed
            depend dev."Use API" -> prov : resource "Data" label partden
            link dev partof prov
        }"#;
        let m = parse_goal_model(text).unwrap();
        let printed = print_model(&m);
        let again = parse_goal_model(&printed).unwrap();
        assert_eq!(m, again);
        assert_eq!(printed, print_model(&again));
    }

    #[test]
    fn value_round_trip() {
        let text = r#"valuemodel v {
            actor co "Company"
            actor team in co api segment { activity serve "Serve" bapo = A }
            actor user
            flow "API access" from team.serve to user : task status problematic group g1 as access
            flow fee from user to team
            stimulus need "Need" at user
        }"#;
        let m = parse_value_model(text).unwrap();
        let again = parse_value_model(&print_model(&m)).unwrap();
        assert_eq!(m, again);
    }

    #[test]
    fn other_dialects_round_trip() {
        let s = parse_scenario("scenario s { label \"a b\" = satisfied\n label c = denied }").unwrap();
        assert_eq!(parse_scenario(&print_model(&s)).unwrap(), s);

        let d = parse_api_descriptor(
            "api d { stage deprecation\n support minimizing\n sample 0.5 plan 0.125\n rationale \"a b\", x-y }",
        )
        .unwrap();
        assert_eq!(parse_api_descriptor(&print_model(&d)).unwrap(), d);

        let c = parse_metric_catalog(
            "metrics c { metric \"Dev speed\" { why \"w\"\n who \"x\"\n dims usage, implementation\n links t } }",
        )
        .unwrap();
        assert_eq!(parse_metric_catalog(&print_model(&c)).unwrap(), c);
    }
}
