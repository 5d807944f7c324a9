//! Qualitative label propagation over goal models.
//!
//! Every node (element or dependum) holds an [`EvidencePair`] that only ever
//! grows. Each sweep recomputes every node's input evidence from the current
//! labels and joins it in; a sweep that changes nothing ends the run. All
//! rules are monotone in the evidence order, so the result is the least
//! fixpoint and does not depend on the order nodes are visited in.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::diag::{codes, has_errors, sort_diagnostics, Diagnostic, Loc};
use crate::label::{Evidence, EvidencePair, Label};
use crate::model::{ElementKind, GoalModel, RefinementKind, Strength};
use crate::validate::validate_goal_model;

/// Name reported with every evaluation: denied sources propagate through
/// hurts/breaks symmetrically to satisfied ones.
pub const RULE_SET: &str = "symmetric-closure";

#[derive(Debug, Clone, Default, Serialize)]
pub struct Scenario {
    pub name: String,
    pub assignments: BTreeMap<String, Label>,
    #[serde(skip)]
    pub locs: BTreeMap<String, Loc>,
}

/// Equality ignores where assignments were written.
impl PartialEq for Scenario {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.assignments == other.assignments
    }
}

impl Eq for Scenario {}

impl Scenario {
    pub fn new(name: impl Into<String>) -> Self {
        Scenario { name: name.into(), ..Default::default() }
    }

    pub fn assign(&mut self, id: impl Into<String>, label: Label) {
        self.assignments.insert(id.into(), label);
    }

    pub fn with(mut self, id: impl Into<String>, label: Label) -> Self {
        self.assign(id, label);
        self
    }

    fn loc(&self, id: &str) -> &Loc {
        self.locs.get(id).unwrap_or(&Loc::NONE)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct EvaluationResult {
    pub labels: BTreeMap<String, Label>,
    pub overridden: BTreeSet<String>,
    pub iterations: usize,
    pub rule_set: &'static str,
    pub diagnostics: Vec<Diagnostic>,
}

impl EvaluationResult {
    fn failed(diagnostics: Vec<Diagnostic>) -> Self {
        EvaluationResult {
            labels: BTreeMap::new(),
            overridden: BTreeSet::new(),
            iterations: 0,
            rule_set: RULE_SET,
            diagnostics,
        }
    }

    pub fn label(&self, id: &str) -> Label {
        self.labels.get(id).copied().unwrap_or(Label::Unknown)
    }
}

/// Evidence a contribution of `strength` delivers from a source labelled `l`.
pub fn contribution_evidence(strength: Strength, l: Label) -> EvidencePair {
    use Evidence::{Full, None as No, Partial};
    let pair = |p, n| EvidencePair::new(p, n);
    match (strength, l) {
        (_, Label::Unknown) => EvidencePair::NONE,
        (Strength::Makes, l) => EvidencePair::from_label(l),
        (Strength::Helps, Label::Satisfied | Label::PartiallySatisfied) => pair(Partial, No),
        (Strength::Helps, Label::PartiallyDenied | Label::Denied) => pair(No, Partial),
        (Strength::Hurts, Label::Satisfied | Label::PartiallySatisfied) => pair(No, Partial),
        (Strength::Hurts, Label::PartiallyDenied | Label::Denied) => pair(Partial, No),
        (Strength::Helps | Strength::Hurts, Label::Conflict) => pair(Partial, Partial),
        (Strength::Breaks, Label::Satisfied) => pair(No, Full),
        (Strength::Breaks, Label::PartiallySatisfied) => pair(No, Partial),
        (Strength::Breaks, Label::PartiallyDenied) => pair(Partial, No),
        (Strength::Breaks, Label::Denied) => pair(Full, No),
        (Strength::Breaks, Label::Conflict) => pair(Full, Full),
    }
}

/// Where a node's input evidence comes from.
#[derive(Debug, Default)]
struct Inputs {
    refinement: Option<(RefinementKind, Vec<usize>)>,
    /// Dependums this element depends on (And-combined with the refinement).
    dependums: Vec<usize>,
    contributions: Vec<(usize, Strength)>,
    /// For a dependum: the dependee element.
    dependee: Option<usize>,
}

impl Inputs {
    fn is_empty(&self) -> bool {
        self.refinement.is_none()
            && self.dependums.is_empty()
            && self.contributions.is_empty()
            && self.dependee.is_none()
    }

    fn evidence(&self, labels: &[Label]) -> EvidencePair {
        let mut and_inputs: Vec<Label> = Vec::new();
        if let Some((kind, children)) = &self.refinement {
            let mut it = children.iter().map(|&c| labels[c]);
            if let Some(first) = it.next() {
                let combined = match kind {
                    RefinementKind::And => it.fold(first, Label::min),
                    RefinementKind::Or => it.fold(first, Label::max),
                };
                and_inputs.push(combined);
            }
        }
        and_inputs.extend(self.dependums.iter().map(|&d| labels[d]));
        if let Some(e) = self.dependee {
            and_inputs.push(labels[e]);
        }
        let mut ev = match and_inputs.split_first() {
            Some((&first, rest)) => EvidencePair::from_label(rest.iter().copied().fold(first, Label::min)),
            None => EvidencePair::NONE,
        };
        for &(src, strength) in &self.contributions {
            ev = ev.join(contribution_evidence(strength, labels[src]));
        }
        ev
    }
}

/// The node graph of a goal model: elements first, then dependums.
struct Graph {
    ids: Vec<String>,
    inputs: Vec<Inputs>,
    /// Initial evidence from dependum labels.
    seeds: Vec<EvidencePair>,
}

impl Graph {
    fn build(m: &GoalModel) -> Graph {
        let mut ids: Vec<String> = m.elements().map(|(_, e)| e.id.clone()).collect();
        ids.extend(m.dependencies.iter().map(|d| d.id.clone()));
        let index: HashMap<&str, usize> = ids.iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect();
        let mut inputs: Vec<Inputs> = ids.iter().map(|_| Inputs::default()).collect();
        let mut seeds = vec![EvidencePair::NONE; ids.len()];

        for (_, e) in m.elements() {
            let i = index[e.id.as_str()];
            if let Some(r) = &e.refinement {
                let children = r.children.iter().filter_map(|c| index.get(c.as_str()).copied()).collect();
                inputs[i].refinement = Some((r.kind, children));
            }
            for c in &e.contributions {
                if let Some(&t) = index.get(c.target.as_str()) {
                    inputs[t].contributions.push((i, c.strength));
                }
            }
        }
        for d in &m.dependencies {
            let di = index[d.id.as_str()];
            if let Some(el) = &d.depender.element {
                if let Some(&e) = index.get(el.as_str()) {
                    inputs[e].dependums.push(di);
                }
            }
            if let Some(el) = &d.dependee.element {
                inputs[di].dependee = index.get(el.as_str()).copied();
            }
            if let Some(l) = d.dependum.initial {
                seeds[di] = EvidencePair::from_label(l);
            }
        }
        Graph { ids, inputs, seeds }
    }
}

/// Runs the propagation engine without checking the model first.
///
/// Scenario ids missing from the model are ignored here; [`propagate`]
/// reports them.
fn run(m: &GoalModel, s: &Scenario) -> EvaluationResult {
    let g = Graph::build(m);
    let n = g.ids.len();
    let index: HashMap<&str, usize> = g.ids.iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect();

    let mut fixed: Vec<Option<EvidencePair>> = vec![None; n];
    for (id, &l) in &s.assignments {
        if let Some(&i) = index.get(id.as_str()) {
            fixed[i] = Some(EvidencePair::from_label(l));
        }
    }
    let mut ev: Vec<EvidencePair> = (0..n).map(|i| fixed[i].unwrap_or(g.seeds[i])).collect();
    let mut labels: Vec<Label> = ev.iter().map(|e| e.to_label()).collect();

    let mut iterations = 0;
    loop {
        let mut changed = false;
        for i in 0..n {
            if fixed[i].is_some() {
                continue;
            }
            if ev[i].absorb(g.inputs[i].evidence(&labels)) {
                labels[i] = ev[i].to_label();
                changed = true;
            }
        }
        if !changed {
            break;
        }
        iterations += 1;
    }

    let mut diagnostics = Vec::new();
    let mut overridden = BTreeSet::new();
    for (i, assigned) in fixed.iter().enumerate() {
        let Some(assigned) = *assigned else { continue };
        if g.inputs[i].is_empty() {
            continue;
        }
        let computed = g.inputs[i].evidence(&labels).join(g.seeds[i]).to_label();
        if computed != assigned.to_label() {
            overridden.insert(g.ids[i].clone());
            diagnostics.push(
                Diagnostic::info(
                    codes::I_OVERRIDE,
                    format!("`{}` is assigned {} but the model computes {}", g.ids[i], assigned.to_label(), computed),
                )
                .at(s.loc(&g.ids[i])),
            );
        }
    }
    let node_locs: HashMap<&str, &Loc> = m
        .elements()
        .map(|(_, e)| (e.id.as_str(), &e.loc))
        .chain(m.dependencies.iter().map(|d| (d.id.as_str(), &d.loc)))
        .collect();
    for i in 0..n {
        if labels[i] == Label::Conflict {
            diagnostics.push(
                Diagnostic::warning(
                    codes::W_CONFLICT,
                    format!("`{}` receives both positive and negative evidence", g.ids[i]),
                )
                .at(node_locs[g.ids[i].as_str()]),
            );
        }
    }
    sort_diagnostics(&mut diagnostics);

    EvaluationResult {
        labels: g.ids.into_iter().zip(labels).collect(),
        overridden,
        iterations,
        rule_set: RULE_SET,
        diagnostics,
    }
}

fn scenario_problems(m: &GoalModel, s: &Scenario) -> Vec<Diagnostic> {
    let known: BTreeSet<&str> =
        m.elements().map(|(_, e)| e.id.as_str()).chain(m.dependencies.iter().map(|d| d.id.as_str())).collect();
    let mut out = Vec::new();
    for (id, l) in &s.assignments {
        if !known.contains(id.as_str()) {
            out.push(
                Diagnostic::error(codes::E_REF, format!("scenario `{}` labels unknown element `{id}`", s.name))
                    .at(s.loc(id)),
            );
        } else if *l == Label::Conflict {
            out.push(Diagnostic::error(codes::E_VALUE, format!("`{id}` cannot be assigned conflict")).at(s.loc(id)));
        }
    }
    out
}

/// Evaluates `s` over `m`. The model must validate without errors and every
/// scenario id must name an element or dependency; otherwise the result
/// carries `E-PRE` / `E-REF` diagnostics and no labels.
pub fn propagate(m: &GoalModel, s: &Scenario) -> EvaluationResult {
    let problems = validate_goal_model(m);
    if has_errors(&problems) {
        let mut diags =
            vec![Diagnostic::error(codes::E_PRE, "goal model has validation errors; evaluation needs a valid model")];
        diags.extend(problems.into_iter().filter(Diagnostic::is_error));
        sort_diagnostics(&mut diags);
        return EvaluationResult::failed(diags);
    }
    let scenario_errors = scenario_problems(m, s);
    if !scenario_errors.is_empty() {
        return EvaluationResult::failed(scenario_errors);
    }
    run(m, s)
}

/// Evaluates a metric hierarchy: a model made only of qualities connected
/// by contributions, with measured leaves.
pub fn propagate_metric_hierarchy(h: &GoalModel, measured: &Scenario) -> EvaluationResult {
    let mut problems = Vec::new();
    for (_, e) in h.elements() {
        if e.kind != ElementKind::Quality {
            problems.push(
                Diagnostic::error(
                    codes::E_PRE,
                    format!("metric hierarchy element `{}` is a {}, not a quality", e.id, e.kind),
                )
                .at(&e.loc),
            );
        }
    }
    if !h.dependencies.is_empty() || !h.associations.is_empty() {
        problems.push(Diagnostic::error(codes::E_PRE, "metric hierarchy may only contain contribution links"));
    }
    if !problems.is_empty() {
        sort_diagnostics(&mut problems);
        return EvaluationResult::failed(problems);
    }
    propagate(h, measured)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub id: String,
    pub actor: String,
    pub kind: ElementKind,
    pub labels: Vec<Label>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Comparison {
    pub scenarios: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub actor: Option<String>,
    pub rows: Vec<ComparisonRow>,
    /// `#Satisfied + 0.5 * #PartiallySatisfied` over scored goals and qualities.
    pub scores: Vec<f64>,
    /// Competition rank per scenario (1 is best; ties share a rank).
    pub ranks: Vec<usize>,
    /// Scenario indices, best first; ties keep input order.
    pub ranking: Vec<usize>,
    pub diagnostics: Vec<Diagnostic>,
}

pub fn score(labels: impl IntoIterator<Item = Label>) -> f64 {
    labels
        .into_iter()
        .map(|l| match l {
            Label::Satisfied => 1.0,
            Label::PartiallySatisfied => 0.5,
            _ => 0.0,
        })
        .sum()
}

/// Evaluates each scenario and lines the labels up side by side.
pub fn compare_scenarios(m: &GoalModel, ss: &[Scenario], focus: Option<&str>) -> Result<Comparison, Vec<Diagnostic>> {
    if ss.len() < 2 {
        return Err(vec![Diagnostic::error(
            codes::E_PRE,
            format!("comparison needs at least two scenarios, got {}", ss.len()),
        )]);
    }
    if let Some(a) = focus {
        if m.actor(a).is_none() {
            return Err(vec![Diagnostic::error(codes::E_REF, format!("unknown actor `{a}`"))]);
        }
    }
    let results: Vec<EvaluationResult> = ss.iter().map(|s| propagate(m, s)).collect();
    let mut errors: Vec<Diagnostic> =
        results.iter().flat_map(|r| r.diagnostics.iter().filter(|d| d.is_error()).cloned()).collect();
    if !errors.is_empty() {
        sort_diagnostics(&mut errors);
        errors.dedup();
        return Err(errors);
    }

    let rows: Vec<ComparisonRow> = m
        .elements()
        .filter(|(a, _)| focus.is_none_or(|f| a.id == f))
        .map(|(a, e)| ComparisonRow {
            id: e.id.clone(),
            actor: a.id.clone(),
            kind: e.kind,
            labels: results.iter().map(|r| r.label(&e.id)).collect(),
        })
        .collect();
    let scores: Vec<f64> = (0..ss.len())
        .map(|i| {
            score(
                rows.iter().filter(|r| matches!(r.kind, ElementKind::Goal | ElementKind::Quality)).map(|r| r.labels[i]),
            )
        })
        .collect();
    let mut ranking: Vec<usize> = (0..ss.len()).collect();
    ranking.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let ranks = scores.iter().map(|s| 1 + scores.iter().filter(|o| *o > s).count()).collect();

    let mut diagnostics: Vec<Diagnostic> = results.into_iter().flat_map(|r| r.diagnostics).collect();
    sort_diagnostics(&mut diagnostics);
    diagnostics.dedup();

    Ok(Comparison {
        scenarios: ss.iter().map(|s| s.name.clone()).collect(),
        actor: focus.map(str::to_string),
        rows,
        scores,
        ranks,
        ranking,
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_goal_model;
    use Label::*;

    fn model(body: &str) -> GoalModel {
        parse_goal_model(format!("goalmodel t {{ {body} }}").as_str()).unwrap()
    }

    fn eval(body: &str, s: &[(&str, Label)]) -> EvaluationResult {
        let m = model(body);
        let mut sc = Scenario::new("s");
        for (id, l) in s {
            sc.assign(*id, *l);
        }
        let r = propagate(&m, &sc);
        assert!(!has_errors(&r.diagnostics), "{:?}", r.diagnostics);
        r
    }

    #[test]
    fn helps_from_satisfied_task() {
        let r = eval("actor A { task T; quality Q; T helps Q }", &[("T", Satisfied)]);
        assert_eq!(r.label("Q"), PartiallySatisfied);
    }

    #[test]
    fn breaks_from_satisfied_task() {
        let r = eval("actor A { task T; quality Q; T breaks Q }", &[("T", Satisfied)]);
        assert_eq!(r.label("Q"), Denied);
    }

    #[test]
    fn or_takes_the_best_child() {
        let r = eval("actor A { goal G; task T1; task T2; G or T1, T2 }", &[("T1", Satisfied), ("T2", Denied)]);
        assert_eq!(r.label("G"), Satisfied);
    }

    #[test]
    fn helps_and_hurts_conflict() {
        let r = eval(
            "actor A { task T1; task T2; quality Q; T1 helps Q; T2 hurts Q }",
            &[("T1", Satisfied), ("T2", Satisfied)],
        );
        assert_eq!(r.label("Q"), Conflict);
        assert_eq!(r.diagnostics[0].code, "W-CONFLICT");
    }

    #[test]
    fn dependency_feeds_the_depender() {
        let r = eval("actor A { goal g }\n actor B { task t }\n depend A.g -> B.t : resource r", &[("t", Satisfied)]);
        assert_eq!(r.label("dep1"), Satisfied);
        assert_eq!(r.label("g"), Satisfied);
    }

    #[test]
    fn denied_dependum_label_is_evidence() {
        let r = eval("actor A { goal g }\n actor B\n depend A.g -> B : resource r label denied", &[]);
        assert_eq!(r.label("g"), Denied);
    }

    #[test]
    fn mutual_dependencies_terminate() {
        let r = eval(
            "actor A { task a }\n actor B { task b }\n depend A.a -> B.b : resource x\n depend B.b -> A.a : resource y",
            &[("dep1", PartiallySatisfied)],
        );
        assert_eq!(r.label("a"), PartiallySatisfied);
        assert_eq!(r.label("b"), PartiallySatisfied);
        assert!(r.iterations <= 4 * 4);
    }

    #[test]
    fn override_disagreement_is_reported() {
        let r = eval("actor A { goal G; task T; G and T }", &[("T", Denied), ("G", Satisfied)]);
        assert_eq!(r.label("G"), Satisfied);
        assert!(r.overridden.contains("G"));
        assert!(!r.overridden.contains("T"));
        let r = eval("actor A { goal G; task T; G and T }", &[("T", Satisfied), ("G", Satisfied)]);
        assert!(r.overridden.is_empty());
    }

    #[test]
    fn unknown_scenario_id_is_rejected() {
        let m = model("actor A { goal G }");
        let r = propagate(&m, &Scenario::new("s").with("nope", Satisfied));
        assert_eq!(r.diagnostics[0].code, "E-REF");
        assert!(r.labels.is_empty());
    }

    #[test]
    fn invalid_model_is_a_precondition_failure() {
        let mut m = model("actor A { goal G; task T; G and T }");
        m.actors[0].elements[1].refinement =
            Some(crate::model::Refinement { kind: RefinementKind::And, children: vec!["G".into()] });
        let r = propagate(&m, &Scenario::new("s"));
        assert!(r.diagnostics.iter().any(|d| d.code == "E-PRE"));
    }

    #[test]
    fn contribution_table_is_symmetric_for_hurts() {
        for l in Label::ALL {
            let h = contribution_evidence(Strength::Helps, l);
            let u = contribution_evidence(Strength::Hurts, l);
            assert_eq!((h.positive, h.negative), (u.negative, u.positive));
        }
    }

    #[test]
    fn metric_hierarchy() {
        let h = model("actor M { quality c \"Consistency between APIs\"; quality p; c helps p }");
        let r = propagate_metric_hierarchy(&h, &Scenario::new("m").with("c", PartiallySatisfied));
        assert_eq!(r.label("p"), PartiallySatisfied);
        let r = propagate_metric_hierarchy(&h, &Scenario::new("m"));
        assert!(r.labels.values().all(|l| *l == Unknown));
        let bad = model("actor M { quality c; task t; t helps c }");
        let r = propagate_metric_hierarchy(&bad, &Scenario::new("m"));
        assert_eq!(r.diagnostics[0].code, "E-PRE");
    }

    #[test]
    fn comparison_scores_and_ranks() {
        let m = model("actor A { goal g1; goal g2; goal g3 }\n actor B { goal x }");
        let s1 = Scenario::new("one").with("g1", Satisfied).with("g2", PartiallySatisfied).with("g3", Denied);
        let s2 = Scenario::new("two").with("g1", Satisfied).with("g2", Satisfied);
        let c = compare_scenarios(&m, &[s1.clone(), s2], Some("A")).unwrap();
        assert_eq!(c.scores, [1.5, 2.0]);
        assert_eq!(c.ranking, [1, 0]);
        assert_eq!(c.ranks, [2, 1]);
        assert_eq!(c.rows.len(), 3);

        let same = compare_scenarios(&m, &[s1.clone(), s1.clone()], None).unwrap();
        assert_eq!(same.ranks, [1, 1]);
        assert!(same.rows.iter().all(|r| r.labels[0] == r.labels[1]));

        assert_eq!(compare_scenarios(&m, &[s1], None).unwrap_err()[0].code, "E-PRE");
    }
}
