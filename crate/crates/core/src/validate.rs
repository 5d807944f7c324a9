//! Structural and methodological checks for parsed models.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::diag::{codes, sort_diagnostics, Diagnostic, Loc};
use crate::model::{ActorTags, BapoTag, ElementKind, GoalModel, Layer, ValueModel};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ValueOptions {
    /// Also require a backflow for every actor pair that exchanges value.
    pub strict_reciprocity: bool,
}

pub fn validate_value_model(m: &ValueModel) -> Vec<Diagnostic> {
    validate_value_model_with(m, ValueOptions::default())
}

pub fn validate_value_model_with(m: &ValueModel, opts: ValueOptions) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let index: HashMap<&str, usize> = m.actors.iter().enumerate().map(|(i, a)| (a.id.as_str(), i)).collect();

    // Ancestors of each actor, itself included. Parent loops are parse
    // errors, but guard against hand-built models anyway.
    let lineage = |start: usize| {
        let mut chain = vec![start];
        let mut cur = start;
        while let Some(p) = m.actors[cur].parent.as_deref().and_then(|p| index.get(p)) {
            if chain.contains(p) {
                break;
            }
            chain.push(*p);
            cur = *p;
        }
        chain
    };

    let mut incoming = vec![0usize; m.actors.len()];
    let mut outgoing = vec![0usize; m.actors.len()];
    let mut pairs: BTreeMap<(usize, usize), &crate::model::ValueFlow> = BTreeMap::new();
    for f in &m.flows {
        let (Some(&from), Some(&to)) = (index.get(f.from.actor.as_str()), index.get(f.to.actor.as_str())) else {
            continue;
        };
        for a in lineage(from) {
            outgoing[a] += 1;
        }
        for a in lineage(to) {
            incoming[a] += 1;
        }
        if from != to {
            pairs.entry((from, to)).or_insert(f);
        }
    }

    for (i, a) in m.actors.iter().enumerate() {
        match (incoming[i], outgoing[i]) {
            (0, 0) => out.push(
                Diagnostic::warning(codes::W_ISOLATED, format!("actor `{}` takes part in no value flow", a.id))
                    .at(&a.loc),
            ),
            (0, n) => out.push(
                Diagnostic::warning(
                    codes::W_RECIP,
                    format!("actor `{}` provides value ({n} outgoing flows) but receives none", a.id),
                )
                .at(&a.loc),
            ),
            (n, 0) => out.push(
                Diagnostic::warning(
                    codes::W_RECIP,
                    format!("actor `{}` receives value ({n} incoming flows) but provides none", a.id),
                )
                .at(&a.loc),
            ),
            _ => {}
        }
    }

    if opts.strict_reciprocity {
        for (&(from, to), f) in &pairs {
            if !pairs.contains_key(&(to, from)) {
                out.push(
                    Diagnostic::warning(
                        codes::W_BACKFLOW,
                        format!("`{}` gives value to `{}` but nothing flows back", m.actors[from].id, m.actors[to].id),
                    )
                    .at(&f.loc),
                );
            }
        }
    }

    if !m.actors.iter().any(|a| a.api_role) {
        out.push(Diagnostic::error(codes::E_NOAPI, "no actor is marked as the API (`api`)"));
    }
    if m.stimuli.is_empty() {
        out.push(Diagnostic::warning(codes::W_NOSTIM, "model has no start stimulus"));
    }
    sort_diagnostics(&mut out);
    out
}

/// Errors that make a value model unusable as transformation input:
/// duplicate identifiers, dangling references and parent loops.
pub fn structural_value_errors(m: &ValueModel) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    let mut dup = |id: &str, loc: &Loc, out: &mut Vec<Diagnostic>| {
        if !seen.insert(id.to_string()) {
            out.push(Diagnostic::error(codes::E_DUP, format!("duplicate identifier `{id}`")).at(loc));
        }
    };
    for a in &m.actors {
        dup(&a.id, &a.loc, &mut out);
        for act in &a.activities {
            dup(&act.id, &act.loc, &mut out);
        }
    }
    for f in &m.flows {
        dup(&f.id, &f.loc, &mut out);
    }
    for s in &m.stimuli {
        dup(&s.id, &s.loc, &mut out);
    }
    for f in &m.flows {
        for end in [&f.from, &f.to] {
            let ok = m
                .actor(&end.actor)
                .is_some_and(|a| end.activity.as_ref().is_none_or(|act| a.activities.iter().any(|x| &x.id == act)));
            if !ok {
                out.push(
                    Diagnostic::error(codes::E_REF, format!("flow `{}` names unknown endpoint `{end}`", f.id))
                        .at(&f.loc),
                );
            }
        }
    }
    for f in &m.flows {
        if f.from == f.to {
            out.push(
                Diagnostic::error(codes::E_SELFDEP, format!("flow `{}` starts and ends at `{}`", f.id, f.from))
                    .at(&f.loc),
            );
        }
    }
    for s in &m.stimuli {
        if m.actor(&s.at).is_none() {
            out.push(Diagnostic::error(codes::E_REF, format!("unknown actor `{}`", s.at)).at(&s.loc));
        }
    }
    for a in &m.actors {
        let mut cur = a;
        let mut steps = 0;
        while let Some(p) = &cur.parent {
            match m.actor(p) {
                None => {
                    out.push(Diagnostic::error(codes::E_REF, format!("unknown parent actor `{p}`")).at(&a.loc));
                    break;
                }
                Some(next) => cur = next,
            }
            steps += 1;
            if cur.id == a.id || steps > m.actors.len() {
                out.push(
                    Diagnostic::error(codes::E_PARENT_CYCLE, format!("actor `{}` is nested inside itself", a.id))
                        .at(&a.loc),
                );
                break;
            }
        }
    }
    sort_diagnostics(&mut out);
    out
}

pub fn validate_goal_model(m: &GoalModel) -> Vec<Diagnostic> {
    let mut out = Vec::new();

    let mut owner: HashMap<&str, (usize, ElementKind)> = HashMap::new();
    let mut ids: BTreeSet<String> = BTreeSet::new();
    let mut dup = |id: &str, loc: &Loc, out: &mut Vec<Diagnostic>| {
        if !ids.insert(id.to_string()) {
            out.push(Diagnostic::error(codes::E_DUP, format!("duplicate identifier `{id}`")).at(loc));
        }
    };
    for (ai, a) in m.actors.iter().enumerate() {
        dup(&a.id, &a.loc, &mut out);
        if !a.open && !a.elements.is_empty() {
            out.push(
                Diagnostic::error(codes::E_CLOSED, format!("closed actor `{}` contains elements", a.id)).at(&a.loc),
            );
        }
        for e in &a.elements {
            dup(&e.id, &e.loc, &mut out);
            owner.entry(e.id.as_str()).or_insert((ai, e.kind));
        }
    }
    for d in &m.dependencies {
        dup(&d.id, &d.loc, &mut out);
    }

    // Refinement and contribution typing.
    let mut linked: BTreeSet<&str> = BTreeSet::new();
    for (ai, a) in m.actors.iter().enumerate() {
        for e in &a.elements {
            if let Some(r) = &e.refinement {
                if e.kind == ElementKind::Quality {
                    out.push(
                        Diagnostic::error(codes::E_QREFINE, format!("quality `{}` is AND/OR refined", e.id)).at(&e.loc),
                    );
                }
                for c in &r.children {
                    match owner.get(c.as_str()) {
                        None => out.push(
                            Diagnostic::error(codes::E_REF, format!("`{}` refines unknown element `{c}`", e.id))
                                .at(&e.loc),
                        ),
                        Some(&(ci, _)) if ci != ai => out.push(
                            Diagnostic::error(codes::E_REFINE, format!("`{}` refines `{c}` from another actor", e.id))
                                .at(&e.loc),
                        ),
                        _ => {
                            linked.insert(e.id.as_str());
                            linked.insert(c.as_str());
                        }
                    }
                }
            }
            for c in &e.contributions {
                match owner.get(c.target.as_str()) {
                    None => out.push(
                        Diagnostic::error(codes::E_REF, format!("`{}` contributes to unknown `{}`", e.id, c.target))
                            .at(&c.loc),
                    ),
                    Some(&(_, kind)) if kind != ElementKind::Quality => out.push(
                        Diagnostic::error(
                            codes::E_CONTRIB,
                            format!("contribution target `{}` is a {kind}, not a quality", c.target),
                        )
                        .at(&c.loc),
                    ),
                    _ => {
                        linked.insert(e.id.as_str());
                        linked.insert(c.target.as_str());
                    }
                }
            }
        }
    }

    for d in &m.dependencies {
        for end in [&d.depender, &d.dependee] {
            let Some(actor) = m.actor(&end.actor) else {
                out.push(
                    Diagnostic::error(
                        codes::E_DANGLE,
                        format!("dependency `{}` names unknown actor `{}`", d.id, end.actor),
                    )
                    .at(&d.loc),
                );
                continue;
            };
            if let Some(el) = &end.element {
                if !actor.open {
                    out.push(
                        Diagnostic::error(
                            codes::E_DANGLE,
                            format!("dependency `{}` attaches to `{end}` inside closed actor `{}`", d.id, actor.id),
                        )
                        .at(&d.loc),
                    );
                } else if actor.element(el).is_none() {
                    out.push(
                        Diagnostic::error(
                            codes::E_DANGLE,
                            format!("dependency `{}` attaches to missing element `{end}`", d.id),
                        )
                        .at(&d.loc),
                    );
                } else {
                    linked.insert(el.as_str());
                }
            }
        }
        if d.depender == d.dependee {
            out.push(
                Diagnostic::error(
                    codes::E_SELFDEP,
                    format!("dependency `{}` connects `{}` to itself", d.id, d.depender),
                )
                .at(&d.loc),
            );
        }
    }

    // Refinement cycles.
    let mut g: DiGraph<&str, ()> = DiGraph::new();
    let nodes: HashMap<&str, _> = m.elements().map(|(_, e)| (e.id.as_str(), g.add_node(e.id.as_str()))).collect();
    let locs: HashMap<&str, &Loc> = m.elements().map(|(_, e)| (e.id.as_str(), &e.loc)).collect();
    for (_, e) in m.elements() {
        if let Some(r) = &e.refinement {
            for c in &r.children {
                if let Some(&to) = nodes.get(c.as_str()) {
                    g.update_edge(nodes[e.id.as_str()], to, ());
                }
            }
        }
    }
    for scc in tarjan_scc(&g) {
        let cyclic = scc.len() > 1 || g.contains_edge(scc[0], scc[0]);
        if cyclic {
            let mut members: Vec<&str> = scc.iter().map(|&n| g[n]).collect();
            members.sort_unstable();
            out.push(
                Diagnostic::error(codes::E_CYCLE, format!("refinement cycle through {}", members.join(", ")))
                    .at(locs[members[0]]),
            );
        }
    }

    for (_, e) in m.elements() {
        if !linked.contains(e.id.as_str()) {
            out.push(
                Diagnostic::warning(codes::W_FLOAT, format!("{} `{}` is not connected to anything", e.kind, e.id))
                    .at(&e.loc),
            );
        }
    }

    sort_diagnostics(&mut out);
    out.dedup();
    out
}

/// Layer coverage for one API focus: every layer needs an actor and every
/// actor needs a layer.
pub fn check_layer_coverage(m: &impl ActorTags, focus: &str) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let tags = m.actor_tags();
    for layer in Layer::ALL {
        if !tags.iter().any(|(_, l, _, _)| l.get(focus) == Some(&layer)) {
            out.push(Diagnostic::warning(
                codes::W_LAYER_MISSING,
                format!("no actor is placed in the {layer} layer for `{focus}`"),
            ));
        }
    }
    for (id, l, _, loc) in &tags {
        if !l.contains_key(focus) {
            out.push(
                Diagnostic::warning(codes::W_UNASSIGNED, format!("actor `{id}` has no layer for `{focus}`")).at(loc),
            );
        }
    }
    sort_diagnostics(&mut out);
    out
}

pub fn check_bapo_coverage(m: &impl ActorTags) -> Vec<Diagnostic> {
    let present: BTreeSet<BapoTag> = m.actor_tags().into_iter().flat_map(|(_, _, b, _)| b.iter().copied()).collect();
    let mut out: Vec<Diagnostic> = BapoTag::ALL
        .into_iter()
        .filter(|t| !present.contains(t))
        .map(|t| Diagnostic::info(codes::I_BAPO_MISSING, format!("no actor is tagged {} ({})", t.letter(), t)))
        .collect();
    sort_diagnostics(&mut out);
    out
}
