//! Graphviz DOT rendering.
//!
//! Goal models: one node per actor and per element, one edge per
//! refinement child, contribution, dependency and part-of link. Value
//! models: one node per actor, activity and stimulus, one edge per flow,
//! parent link and stimulus.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::dsl::quote_always;
use crate::model::{ActorTags, DepEnd, ElementKind, Endpoint, FlowStatus, GoalModel, Layer, ValueModel};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DotOptions {
    /// Draw each actor as a cluster holding its elements.
    pub cluster_by_actor: bool,
    /// Group actor nodes into one rank band per layer of this API focus.
    /// Takes precedence over clustering.
    pub layer_bands: Option<String>,
}

fn id(s: &str) -> String {
    quote_always(s)
}

fn shape(kind: ElementKind) -> &'static str {
    match kind {
        ElementKind::Goal => "ellipse",
        ElementKind::Quality => "octagon",
        ElementKind::Task => "hexagon",
        ElementKind::Resource => "box",
    }
}

fn bands(out: &mut String, m: &impl ActorTags, focus: &str) {
    let mut by_layer: BTreeMap<Layer, Vec<&str>> = BTreeMap::new();
    for (actor, layers, _, _) in m.actor_tags() {
        if let Some(l) = layers.get(focus) {
            by_layer.entry(*l).or_default().push(actor);
        }
    }
    for layer in Layer::ALL {
        let _ = write!(out, "  subgraph {} {{ rank=same;", id(&format!("band_{}", layer.keyword())));
        for a in by_layer.get(&layer).into_iter().flatten() {
            let _ = write!(out, " {};", id(a));
        }
        out.push_str(" }\n");
    }
}

fn dep_node(e: &DepEnd) -> String {
    id(e.element.as_deref().unwrap_or(&e.actor))
}

pub fn goal_to_dot(m: &GoalModel, opts: &DotOptions) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph {} {{", id(&m.name));
    out.push_str("  rankdir=BT;\n  node [fontsize=10];\n");
    let cluster = opts.cluster_by_actor && opts.layer_bands.is_none();
    for (i, a) in m.actors.iter().enumerate() {
        let indent = if cluster { "    " } else { "  " };
        if cluster {
            let _ = writeln!(out, "  subgraph {} {{", id(&format!("cluster_{i}")));
            let _ = writeln!(out, "    label={};", id(&a.name));
        }
        let style = if a.open { "circle" } else { "doublecircle" };
        let _ = writeln!(out, "{indent}{} [shape={style}, label={}];", id(&a.id), id(&a.name));
        for e in &a.elements {
            let _ = writeln!(out, "{indent}{} [shape={}, label={}];", id(&e.id), shape(e.kind), id(&e.name));
        }
        if cluster {
            out.push_str("  }\n");
        }
    }
    if let Some(focus) = &opts.layer_bands {
        bands(&mut out, m, focus);
    }
    for (_, e) in m.elements() {
        if let Some(r) = &e.refinement {
            for c in &r.children {
                let _ = writeln!(out, "  {} -> {} [label={}];", id(c), id(&e.id), r.kind.keyword());
            }
        }
        for c in &e.contributions {
            let _ =
                writeln!(out, "  {} -> {} [label={}, style=dotted];", id(&e.id), id(&c.target), c.strength.keyword());
        }
    }
    for d in &m.dependencies {
        let _ = writeln!(
            out,
            "  {} -> {} [label={}, style=dashed];",
            dep_node(&d.depender),
            dep_node(&d.dependee),
            id(&d.dependum.name)
        );
    }
    for l in &m.associations {
        let _ = writeln!(out, "  {} -> {} [label=\"part of\", style=bold];", id(&l.from), id(&l.to));
    }
    out.push_str("}\n");
    out
}

fn endpoint_node(e: &Endpoint) -> String {
    id(e.activity.as_deref().unwrap_or(&e.actor))
}

pub fn value_to_dot(m: &ValueModel, opts: &DotOptions) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph {} {{", id(&m.name));
    out.push_str("  rankdir=LR;\n  node [fontsize=10];\n");
    let cluster = opts.cluster_by_actor && opts.layer_bands.is_none();
    for (i, a) in m.actors.iter().enumerate() {
        let indent = if cluster { "    " } else { "  " };
        if cluster {
            let _ = writeln!(out, "  subgraph {} {{", id(&format!("cluster_{i}")));
            let _ = writeln!(out, "    label={};", id(&a.name));
        }
        let shape = if a.market_segment { "box3d" } else { "box" };
        let peripheries = if a.api_role { 2 } else { 1 };
        let _ =
            writeln!(out, "{indent}{} [shape={shape}, peripheries={peripheries}, label={}];", id(&a.id), id(&a.name));
        for act in &a.activities {
            let _ = writeln!(out, "{indent}{} [shape=ellipse, label={}];", id(&act.id), id(&act.name));
        }
        if cluster {
            out.push_str("  }\n");
        }
    }
    for s in &m.stimuli {
        let _ = writeln!(out, "  {} [shape=circle, style=filled, label={}];", id(&s.id), id(&s.name));
    }
    if let Some(focus) = &opts.layer_bands {
        bands(&mut out, m, focus);
    }
    for f in &m.flows {
        let style = match f.status {
            FlowStatus::Normal => "solid",
            FlowStatus::Problematic => "bold, color=red",
            FlowStatus::Missing => "dashed",
        };
        let _ = writeln!(
            out,
            "  {} -> {} [label={}, style={}];",
            endpoint_node(&f.from),
            endpoint_node(&f.to),
            id(&f.object.name),
            if style.contains(',') { id(style) } else { style.to_string() }
        );
    }
    for a in &m.actors {
        if let Some(p) = &a.parent {
            let _ = writeln!(out, "  {} -> {} [label=\"in\", style=dotted];", id(&a.id), id(p));
        }
    }
    for s in &m.stimuli {
        let _ = writeln!(out, "  {} -> {} [arrowhead=none];", id(&s.id), id(&s.at));
    }
    out.push_str("}\n");
    out
}
