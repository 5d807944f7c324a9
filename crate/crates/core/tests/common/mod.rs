//! Shared helpers for the integration tests: seeded model generators, an
//! independent label propagation oracle and a DOT grammar.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use apimod::diag::has_errors;
use apimod::dsl::print_model;
use apimod::evaluate::Scenario;
use apimod::model::{
    Activity, BapoTag, Contribution, DepEnd, Dependency, Dependum, ElementKind, Endpoint, FlowStatus, GActor, GElement,
    GoalModel, Layer, Refinement, RefinementKind, Stimulus, Strength, VActor, ValueFlow, ValueModel, ValueObject,
};
use apimod::validate::{validate_goal_model, validate_value_model};
use apimod::{Label, Loc};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data")
}

pub fn golden_files() -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = std::fs::read_dir(data_dir().join("golden"))
        .expect("golden corpus")
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "vm"))
        .collect();
    v.sort();
    v
}

// ---------------------------------------------------------------------------
// Names

const FRAGMENTS: &[&str] = &[
    "alpha",
    "App Dev",
    "say \"hi\"",
    "goal",
    "and",
    "depend",
    "back\\slash",
    "tab\there",
    "two\nlines",
    "Ünïcödé",
    "データ",
    "a-b",
    "x_1",
    "-lead",
    "9start",
    "trail-",
    "{brace}",
    "semi;colon",
    "// not a comment",
];

/// Hands out unique identifiers and free-form display names.
pub struct Names {
    taken: BTreeSet<String>,
}

impl Names {
    pub fn new() -> Self {
        Names { taken: BTreeSet::new() }
    }

    pub fn id(&mut self, r: &mut impl Rng) -> String {
        let base = if r.gen_bool(0.5) {
            format!("n{}", r.gen_range(0..1000))
        } else {
            FRAGMENTS.choose(r).unwrap().to_string()
        };
        let mut id = base.clone();
        let mut k = 2;
        while !self.taken.insert(id.clone()) {
            id = format!("{base}-{k}");
            k += 1;
        }
        id
    }

    pub fn name(&mut self, r: &mut impl Rng, id: &str) -> String {
        if r.gen_bool(0.5) {
            id.to_string()
        } else {
            format!("{} {}", FRAGMENTS.choose(r).unwrap(), r.gen_range(0..100))
        }
    }
}

fn tags(r: &mut impl Rng) -> (BTreeMap<String, Layer>, BTreeSet<BapoTag>) {
    let mut layers = BTreeMap::new();
    for focus in ["device", "Cloud API"] {
        if r.gen_bool(0.3) {
            layers.insert(focus.to_string(), *Layer::ALL.choose(r).unwrap());
        }
    }
    let bapo = BapoTag::ALL.iter().copied().filter(|_| r.gen_bool(0.2)).collect();
    (layers, bapo)
}

// ---------------------------------------------------------------------------
// Goal models

/// A goal model that validates without errors, with at most `max_nodes`
/// elements plus dependums and at most `max_links` links.
pub fn random_goal_model(r: &mut impl Rng, max_nodes: usize, max_links: usize) -> GoalModel {
    loop {
        let m = goal_candidate(r, max_nodes, max_links);
        if !has_errors(&validate_goal_model(&m)) {
            return m;
        }
    }
}

fn goal_candidate(r: &mut impl Rng, max_nodes: usize, max_links: usize) -> GoalModel {
    let mut names = Names::new();
    let mut m = GoalModel::new(names.id(r));
    m.draft = r.gen_bool(0.2);
    let n_actors = r.gen_range(1..=3);
    let nodes = r.gen_range(1..=max_nodes);
    let n_deps = r.gen_range(0..=nodes / 2);
    let n_elems = nodes - n_deps;

    for _ in 0..n_actors {
        let id = names.id(r);
        let name = names.name(r, &id);
        let mut a = GActor::new(id, name);
        (a.layer_assignments, a.bapo_tags) = tags(r);
        m.actors.push(a);
    }
    // Elements in a global order; refinements only point forward, so there
    // are no cycles.
    let mut order: Vec<(usize, String, ElementKind)> = Vec::new();
    for _ in 0..n_elems {
        let ai = r.gen_range(0..n_actors);
        let id = names.id(r);
        let kind = *ElementKind::ALL.choose(r).unwrap();
        let name = names.name(r, &id);
        m.actors[ai].elements.push(GElement::new(id.clone(), kind, name));
        order.push((ai, id, kind));
    }
    for a in &mut m.actors {
        a.open = !a.elements.is_empty() || r.gen_bool(0.5);
    }

    let mut links = 0;
    for i in 0..order.len() {
        let (ai, ref id, kind) = order[i];
        if kind == ElementKind::Quality || !r.gen_bool(0.5) {
            continue;
        }
        let candidates: Vec<String> =
            order[i + 1..].iter().filter(|(aj, _, _)| *aj == ai).map(|(_, c, _)| c.clone()).collect();
        let children: Vec<String> = candidates.into_iter().filter(|_| r.gen_bool(0.6)).collect();
        if children.is_empty() || links + children.len() > max_links {
            continue;
        }
        links += children.len();
        let kind = if r.gen_bool(0.5) { RefinementKind::And } else { RefinementKind::Or };
        let el = element_mut(&mut m, id);
        el.refinement = Some(Refinement { kind, children });
    }
    let qualities: Vec<String> =
        order.iter().filter(|(_, _, k)| *k == ElementKind::Quality).map(|(_, id, _)| id.clone()).collect();
    if !qualities.is_empty() {
        for _ in 0..r.gen_range(0..=order.len() * 2) {
            if links >= max_links {
                break;
            }
            let src = order.choose(r).unwrap().1.clone();
            let target = qualities.choose(r).unwrap().clone();
            if src == target {
                continue;
            }
            let strength = *Strength::ALL.choose(r).unwrap();
            element_mut(&mut m, &src).contributions.push(Contribution { target, strength, loc: Loc::NONE });
            links += 1;
        }
    }
    for _ in 0..n_deps {
        if links >= max_links {
            break;
        }
        let depender = dep_end(r, &m);
        let dependee = dep_end(r, &m);
        let initial = if r.gen_bool(0.3) { Some(*Label::ASSIGNABLE.choose(r).unwrap()) } else { None };
        let id = names.id(r);
        let dname = names.name(r, &id);
        m.dependencies.push(Dependency {
            id,
            depender,
            dependum: Dependum { kind: *ElementKind::ALL.choose(r).unwrap(), name: dname, initial },
            dependee,
            loc: Loc::NONE,
        });
        links += 1;
    }
    if n_actors > 1 && links < max_links && r.gen_bool(0.3) {
        m.associations.push(apimod::model::AssociationLink {
            kind: apimod::model::AssociationKind::PartOf,
            from: m.actors[0].id.clone(),
            to: m.actors[1].id.clone(),
            loc: Loc::NONE,
        });
    }
    m
}

fn element_mut<'a>(m: &'a mut GoalModel, id: &str) -> &'a mut GElement {
    m.actors.iter_mut().flat_map(|a| a.elements.iter_mut()).find(|e| e.id == id).expect("element exists")
}

fn dep_end(r: &mut impl Rng, m: &GoalModel) -> DepEnd {
    let a = m.actors.choose(r).unwrap();
    match a.elements.choose(r) {
        Some(e) if r.gen_bool(0.8) => DepEnd::element(a.id.clone(), e.id.clone()),
        _ => DepEnd::actor(a.id.clone()),
    }
}

/// Labels a random subset of elements and dependencies.
pub fn random_scenario(r: &mut impl Rng, m: &GoalModel) -> Scenario {
    let mut s = Scenario::new("random");
    let ids = m.elements().map(|(_, e)| e.id.clone()).chain(m.dependencies.iter().map(|d| d.id.clone()));
    for id in ids.collect::<Vec<_>>() {
        if r.gen_bool(0.4) {
            s.assign(id, *Label::ASSIGNABLE.choose(r).unwrap());
        }
    }
    s
}

// ---------------------------------------------------------------------------
// Value models

/// A value model with at most `max_elements` actors, activities, flows and
/// stimuli that validates without errors.
pub fn random_value_model(r: &mut impl Rng, max_elements: usize) -> ValueModel {
    loop {
        let m = value_candidate(r, max_elements);
        if m.element_count() <= max_elements && !has_errors(&validate_value_model(&m)) {
            return m;
        }
    }
}

fn value_candidate(r: &mut impl Rng, max_elements: usize) -> ValueModel {
    let mut names = Names::new();
    let mut m = ValueModel::new(names.id(r));
    let budget = r.gen_range(1..=max_elements);
    let n_actors = r.gen_range(1..=budget.clamp(1, 5));
    let mut left = budget - n_actors;
    for i in 0..n_actors {
        let id = names.id(r);
        let name = names.name(r, &id);
        let mut a = VActor::new(id, name);
        if i > 0 && r.gen_bool(0.3) {
            a.parent = Some(m.actors[r.gen_range(0..i)].id.clone());
        }
        a.market_segment = r.gen_bool(0.2);
        a.api_role = r.gen_bool(0.3);
        (a.layer_assignments, a.bapo_tags) = tags(r);
        m.actors.push(a);
    }
    let api = r.gen_range(0..n_actors);
    m.actors[api].api_role = true;

    let n_acts = r.gen_range(0..=left / 2);
    left -= n_acts;
    for _ in 0..n_acts {
        let id = names.id(r);
        let name = names.name(r, &id);
        m.actors.choose_mut(r).unwrap().activities.push(Activity { id, name, loc: Loc::NONE });
    }
    let n_stimuli = r.gen_range(0..=left.min(2));
    left -= n_stimuli;
    for _ in 0..n_stimuli {
        let id = names.id(r);
        let name = names.name(r, &id);
        let at = m.actors.choose(r).unwrap().id.clone();
        m.stimuli.push(Stimulus { id, name, at, loc: Loc::NONE });
    }
    for _ in 0..left {
        let from = endpoint(r, &m);
        let to = endpoint(r, &m);
        if from == to {
            continue;
        }
        let id = names.id(r);
        let status =
            *[FlowStatus::Normal, FlowStatus::Normal, FlowStatus::Problematic, FlowStatus::Missing].choose(r).unwrap();
        let group = if r.gen_bool(0.2) { Some(names.id(r)) } else { None };
        m.flows.push(ValueFlow {
            object: ValueObject { name: names.name(r, &id), kind: *ElementKind::ALL.choose(r).unwrap() },
            id,
            from,
            to,
            status,
            group,
            loc: Loc::NONE,
        });
    }
    m
}

fn endpoint(r: &mut impl Rng, m: &ValueModel) -> Endpoint {
    let a = m.actors.choose(r).unwrap();
    match a.activities.choose(r) {
        Some(act) if r.gen_bool(0.5) => Endpoint::activity(a.id.clone(), act.id.clone()),
        _ => Endpoint::actor(a.id.clone()),
    }
}

/// Canonical text of a model, for failure messages.
pub fn show<M: apimod::dsl::Canonical>(m: &M) -> String {
    print_model(m)
}

// ---------------------------------------------------------------------------
// Propagation oracle
//
// Written against the propagation rules only: evidence is a pair of small
// integers, labels are single letters, and rule instances fire one at a time
// in a shuffled order until a whole round changes nothing.

/// (positive, negative), each 0 = none, 1 = partial, 2 = full.
type Ev = (u8, u8);

const fn join(a: Ev, b: Ev) -> Ev {
    (if a.0 > b.0 { a.0 } else { b.0 }, if a.1 > b.1 { a.1 } else { b.1 })
}

/// `S s ? d D C`: satisfied, partially satisfied, unknown, partially denied,
/// denied, conflict.
fn letter(e: Ev) -> char {
    match e {
        (0, 0) => '?',
        (1, 0) => 's',
        (2, 0) => 'S',
        (0, 1) => 'd',
        (0, 2) => 'D',
        _ => 'C',
    }
}

fn evidence(l: char) -> Ev {
    match l {
        'S' => (2, 0),
        's' => (1, 0),
        '?' => (0, 0),
        'd' => (0, 1),
        'D' => (0, 2),
        _ => (2, 2),
    }
}

const CHAIN: &str = "Dd?sS";

fn pick(a: char, b: char, lower: bool) -> char {
    if a == 'C' || b == 'C' {
        return 'C';
    }
    let (ia, ib) = (CHAIN.find(a).unwrap(), CHAIN.find(b).unwrap());
    if (ia <= ib) == lower {
        a
    } else {
        b
    }
}

/// Evidence a contribution delivers, indexed by source letter in `S s d D C`.
fn contribution(strength: Strength, src: char) -> Ev {
    let row: [Ev; 5] = match strength {
        Strength::Makes => [(2, 0), (1, 0), (0, 1), (0, 2), (2, 2)],
        Strength::Helps => [(1, 0), (1, 0), (0, 1), (0, 1), (1, 1)],
        Strength::Hurts => [(0, 1), (0, 1), (1, 0), (1, 0), (1, 1)],
        Strength::Breaks => [(0, 2), (0, 1), (1, 0), (2, 0), (2, 2)],
    };
    match src {
        'S' => row[0],
        's' => row[1],
        'd' => row[2],
        'D' => row[3],
        'C' => row[4],
        _ => (0, 0),
    }
}

fn to_label(l: char) -> Label {
    match l {
        'S' => Label::Satisfied,
        's' => Label::PartiallySatisfied,
        '?' => Label::Unknown,
        'd' => Label::PartiallyDenied,
        'D' => Label::Denied,
        _ => Label::Conflict,
    }
}

fn from_label(l: Label) -> char {
    match l {
        Label::Satisfied => 'S',
        Label::PartiallySatisfied => 's',
        Label::Unknown => '?',
        Label::PartiallyDenied => 'd',
        Label::Denied => 'D',
        Label::Conflict => 'C',
    }
}

enum Rule {
    /// Refinement (and/or over `children`) combined by min with `also`.
    Conjunction {
        target: usize,
        refinement: Option<(bool, Vec<usize>)>,
        also: Vec<usize>,
    },
    Contribution {
        target: usize,
        source: usize,
        strength: Strength,
    },
}

impl Rule {
    fn target(&self) -> usize {
        match self {
            Rule::Conjunction { target, .. } | Rule::Contribution { target, .. } => *target,
        }
    }

    fn deliver(&self, labels: &[char]) -> Ev {
        match self {
            Rule::Conjunction { refinement, also, .. } => {
                let mut parts: Vec<char> = Vec::new();
                if let Some((is_and, children)) = refinement {
                    let mut it = children.iter().map(|&c| labels[c]);
                    let first = it.next().unwrap();
                    parts.push(it.fold(first, |a, b| pick(a, b, *is_and)));
                }
                parts.extend(also.iter().map(|&i| labels[i]));
                let first = parts[0];
                evidence(parts[1..].iter().fold(first, |a, &b| pick(a, b, true)))
            }
            Rule::Contribution { source, strength, .. } => contribution(*strength, labels[*source]),
        }
    }
}

pub struct OracleResult {
    pub labels: BTreeMap<String, Label>,
    pub overridden: BTreeSet<String>,
}

/// Least fixpoint of the propagation rules by chaotic iteration.
pub fn oracle(m: &GoalModel, s: &Scenario, r: &mut impl Rng) -> OracleResult {
    let mut ids: Vec<String> = Vec::new();
    for a in &m.actors {
        ids.extend(a.elements.iter().map(|e| e.id.clone()));
    }
    ids.extend(m.dependencies.iter().map(|d| d.id.clone()));
    let at = |id: &str| ids.iter().position(|x| x == id).expect("known node");

    let mut rules = Vec::new();
    for a in &m.actors {
        for e in &a.elements {
            let target = at(&e.id);
            let refinement = e
                .refinement
                .as_ref()
                .map(|rf| (rf.kind == RefinementKind::And, rf.children.iter().map(|c| at(c)).collect::<Vec<_>>()));
            let also: Vec<usize> = m
                .dependencies
                .iter()
                .filter(|d| d.depender.element.as_deref() == Some(e.id.as_str()))
                .map(|d| at(&d.id))
                .collect();
            if refinement.is_some() || !also.is_empty() {
                rules.push(Rule::Conjunction { target, refinement, also });
            }
            for c in &e.contributions {
                rules.push(Rule::Contribution { target: at(&c.target), source: target, strength: c.strength });
            }
        }
    }
    let mut seeds = vec![(0u8, 0u8); ids.len()];
    for d in &m.dependencies {
        let target = at(&d.id);
        if let Some(el) = &d.dependee.element {
            rules.push(Rule::Conjunction { target, refinement: None, also: vec![at(el)] });
        }
        if let Some(l) = d.dependum.initial {
            seeds[target] = evidence(from_label(l));
        }
    }

    let fixed: Vec<Option<Ev>> = ids.iter().map(|id| s.assignments.get(id).map(|&l| evidence(from_label(l)))).collect();
    let mut ev: Vec<Ev> = (0..ids.len()).map(|i| fixed[i].unwrap_or(seeds[i])).collect();

    let mut order: Vec<usize> = (0..rules.len()).collect();
    loop {
        order.shuffle(r);
        let mut changed = false;
        for &k in &order {
            let t = rules[k].target();
            if fixed[t].is_some() {
                continue;
            }
            let labels: Vec<char> = ev.iter().map(|&e| letter(e)).collect();
            let next = join(ev[t], rules[k].deliver(&labels));
            if next != ev[t] {
                ev[t] = next;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    let labels: Vec<char> = ev.iter().map(|&e| letter(e)).collect();
    let mut overridden = BTreeSet::new();
    for (i, f) in fixed.iter().enumerate() {
        let Some(assigned) = f else { continue };
        let incoming: Vec<&Rule> = rules.iter().filter(|rule| rule.target() == i).collect();
        if incoming.is_empty() {
            continue;
        }
        let computed = incoming.iter().fold(seeds[i], |acc, rule| join(acc, rule.deliver(&labels)));
        if letter(computed) != letter(*assigned) {
            overridden.insert(ids[i].clone());
        }
    }
    OracleResult { labels: ids.iter().cloned().zip(labels.into_iter().map(to_label)).collect(), overridden }
}

// ---------------------------------------------------------------------------
// DOT grammar

pub mod dot {
    use pest::Parser;
    use pest_derive::Parser;

    #[derive(Parser)]
    #[grammar = "../tests/data/dot.pest"]
    pub struct Dot;

    /// Declared nodes (statements with attributes) and edges of a diagram.
    pub fn parse(text: &str) -> Result<(usize, usize), String> {
        let pairs = Dot::parse(Rule::graph, text).map_err(|e| e.to_string())?;
        let (mut nodes, mut edges) = (0, 0);
        for p in pairs.flatten() {
            match p.as_rule() {
                Rule::node_stmt if p.clone().into_inner().any(|c| c.as_rule() == Rule::attr_list) => nodes += 1,
                Rule::edgeop => edges += 1,
                _ => {}
            }
        }
        Ok((nodes, edges))
    }
}
