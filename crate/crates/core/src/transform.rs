//! Value model to draft goal model.

use crate::diag::{codes, Diagnostic};
use crate::label::Label;
use crate::model::{
    AssociationKind, AssociationLink, DepEnd, Dependency, Dependum, ElementKind, Endpoint, FlowStatus, GActor,
    GElement, GoalModel, ValueModel,
};
use crate::validate::structural_value_errors;

fn dep_end(e: &Endpoint) -> DepEnd {
    DepEnd { actor: e.actor.clone(), element: e.activity.clone() }
}

/// Builds a draft goal model from `m`.
///
/// Identifiers carry over: actors keep theirs, activities become tasks,
/// stimuli become goals and each flow becomes the dependency of the same id,
/// pointing from the receiving end to the providing end.
pub fn transform_value_to_goal(m: &ValueModel) -> (GoalModel, Vec<Diagnostic>) {
    let mut out = GoalModel::new(m.name.clone());
    out.draft = true;

    let problems = structural_value_errors(m);
    if !problems.is_empty() {
        let mut diags =
            vec![Diagnostic::error(codes::E_PRE, "value model has structural errors and cannot be transformed")];
        diags.extend(problems);
        return (out, diags);
    }

    let mut diags = Vec::new();
    for va in &m.actors {
        let mut ga = GActor::new(va.id.clone(), va.name.clone());
        ga.layer_assignments = va.layer_assignments.clone();
        ga.bapo_tags = va.bapo_tags.clone();
        ga.loc = va.loc.clone();
        for act in &va.activities {
            let mut t = GElement::new(act.id.clone(), ElementKind::Task, act.name.clone());
            t.loc = act.loc.clone();
            ga.elements.push(t);
        }
        for s in m.stimuli.iter().filter(|s| s.at == va.id) {
            let mut g = GElement::new(s.id.clone(), ElementKind::Goal, s.name.clone());
            g.loc = s.loc.clone();
            ga.elements.push(g);
        }
        ga.open = !ga.elements.is_empty();
        diags.push(
            Diagnostic::info(
                codes::W_EXPAND,
                format!("draft actor `{}`: elicit the goals and qualities behind its tasks and dependencies", va.id),
            )
            .at(&va.loc),
        );
        if let Some(parent) = &va.parent {
            out.associations.push(AssociationLink {
                kind: AssociationKind::PartOf,
                from: va.id.clone(),
                to: parent.clone(),
                loc: va.loc.clone(),
            });
        }
        out.actors.push(ga);
    }

    for f in &m.flows {
        out.dependencies.push(Dependency {
            id: f.id.clone(),
            depender: dep_end(&f.to),
            dependum: Dependum {
                kind: f.object.kind,
                name: f.object.name.clone(),
                initial: match f.status {
                    FlowStatus::Normal => None,
                    FlowStatus::Problematic | FlowStatus::Missing => Some(Label::Denied),
                },
            },
            dependee: dep_end(&f.from),
            loc: f.loc.clone(),
        });
    }

    crate::diag::sort_diagnostics(&mut diags);
    (out, diags)
}
