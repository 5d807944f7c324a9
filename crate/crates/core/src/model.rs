//! Value models, goal models, and the tags shared between them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::diag::Loc;
use crate::label::Label;

/// Strata of the layered API architecture, bottom first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Layer {
    Asset,
    Api,
    Usage,
    Domain,
}

impl Layer {
    /// Bottom-up order used for layered rendering.
    pub const ALL: [Layer; 4] = [Layer::Asset, Layer::Api, Layer::Usage, Layer::Domain];

    pub fn keyword(self) -> &'static str {
        match self {
            Layer::Asset => "asset",
            Layer::Api => "api",
            Layer::Usage => "usage",
            Layer::Domain => "domain",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Layer> {
        Layer::ALL.into_iter().find(|l| l.keyword() == s)
    }
}

impl fmt::Display for Layer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum BapoTag {
    Business,
    Architecture,
    Process,
    Organization,
}

impl BapoTag {
    pub const ALL: [BapoTag; 4] = [BapoTag::Business, BapoTag::Architecture, BapoTag::Process, BapoTag::Organization];

    pub fn letter(self) -> &'static str {
        match self {
            BapoTag::Business => "B",
            BapoTag::Architecture => "A",
            BapoTag::Process => "P",
            BapoTag::Organization => "O",
        }
    }

    pub fn from_letter(s: &str) -> Option<BapoTag> {
        BapoTag::ALL.into_iter().find(|t| t.letter() == s)
    }
}

impl fmt::Display for BapoTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Layer placement per API of focus.
pub type LayerAssignments = BTreeMap<String, Layer>;

// ---------------------------------------------------------------------------
// Goal models

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementKind {
    Goal,
    Quality,
    Task,
    Resource,
}

impl ElementKind {
    pub const ALL: [ElementKind; 4] =
        [ElementKind::Goal, ElementKind::Quality, ElementKind::Task, ElementKind::Resource];

    pub fn keyword(self) -> &'static str {
        match self {
            ElementKind::Goal => "goal",
            ElementKind::Quality => "quality",
            ElementKind::Task => "task",
            ElementKind::Resource => "resource",
        }
    }

    pub fn from_keyword(s: &str) -> Option<ElementKind> {
        ElementKind::ALL.into_iter().find(|k| k.keyword() == s)
    }
}

impl fmt::Display for ElementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RefinementKind {
    And,
    Or,
}

impl RefinementKind {
    pub fn keyword(self) -> &'static str {
        match self {
            RefinementKind::And => "and",
            RefinementKind::Or => "or",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Refinement {
    pub kind: RefinementKind,
    pub children: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Strength {
    Makes,
    Helps,
    Hurts,
    Breaks,
}

impl Strength {
    pub const ALL: [Strength; 4] = [Strength::Makes, Strength::Helps, Strength::Hurts, Strength::Breaks];

    pub fn keyword(self) -> &'static str {
        match self {
            Strength::Makes => "makes",
            Strength::Helps => "helps",
            Strength::Hurts => "hurts",
            Strength::Breaks => "breaks",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Strength> {
        Strength::ALL.into_iter().find(|k| k.keyword() == s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Contribution {
    pub target: String,
    pub strength: Strength,
    #[serde(skip)]
    pub loc: Loc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GElement {
    pub id: String,
    pub kind: ElementKind,
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refinement: Option<Refinement>,
    pub contributions: Vec<Contribution>,
    #[serde(skip)]
    pub loc: Loc,
}

impl GElement {
    pub fn new(id: impl Into<String>, kind: ElementKind, name: impl Into<String>) -> Self {
        GElement { id: id.into(), kind, name: name.into(), refinement: None, contributions: Vec::new(), loc: Loc::NONE }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct GActor {
    pub id: String,
    pub name: String,
    pub elements: Vec<GElement>,
    pub open: bool,
    pub layer_assignments: LayerAssignments,
    pub bapo_tags: BTreeSet<BapoTag>,
    #[serde(skip)]
    pub loc: Loc,
}

impl GActor {
    pub fn new(id: impl Into<String>, name: impl Into<String>) -> Self {
        GActor {
            id: id.into(),
            name: name.into(),
            elements: Vec::new(),
            open: true,
            layer_assignments: LayerAssignments::new(),
            bapo_tags: BTreeSet::new(),
            loc: Loc::NONE,
        }
    }

    pub fn element(&self, id: &str) -> Option<&GElement> {
        self.elements.iter().find(|e| e.id == id)
    }
}

/// One end of a dependency: an actor, optionally narrowed to an element.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct DepEnd {
    pub actor: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub element: Option<String>,
}

impl DepEnd {
    pub fn actor(actor: impl Into<String>) -> Self {
        DepEnd { actor: actor.into(), element: None }
    }

    pub fn element(actor: impl Into<String>, element: impl Into<String>) -> Self {
        DepEnd { actor: actor.into(), element: Some(element.into()) }
    }
}

impl fmt::Display for DepEnd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.element {
            Some(e) => write!(f, "{}.{}", self.actor, e),
            None => f.write_str(&self.actor),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Dependum {
    pub kind: ElementKind,
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial: Option<Label>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Dependency {
    pub id: String,
    pub depender: DepEnd,
    pub dependum: Dependum,
    pub dependee: DepEnd,
    #[serde(skip)]
    pub loc: Loc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum AssociationKind {
    PartOf,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AssociationLink {
    pub kind: AssociationKind,
    /// The part.
    pub from: String,
    /// The whole.
    pub to: String,
    #[serde(skip)]
    pub loc: Loc,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct GoalModel {
    pub name: String,
    pub actors: Vec<GActor>,
    pub dependencies: Vec<Dependency>,
    pub associations: Vec<AssociationLink>,
    pub draft: bool,
}

impl GoalModel {
    pub fn new(name: impl Into<String>) -> Self {
        GoalModel { name: name.into(), ..Default::default() }
    }

    pub fn actor(&self, id: &str) -> Option<&GActor> {
        self.actors.iter().find(|a| a.id == id)
    }

    /// Every element paired with its owning actor, in declaration order.
    pub fn elements(&self) -> impl Iterator<Item = (&GActor, &GElement)> {
        self.actors.iter().flat_map(|a| a.elements.iter().map(move |e| (a, e)))
    }

    pub fn element(&self, id: &str) -> Option<&GElement> {
        self.elements().map(|(_, e)| e).find(|e| e.id == id)
    }

    pub fn owner_of(&self, element: &str) -> Option<&GActor> {
        self.elements().find(|(_, e)| e.id == element).map(|(a, _)| a)
    }

    pub fn dependency(&self, id: &str) -> Option<&Dependency> {
        self.dependencies.iter().find(|d| d.id == id)
    }

    /// Number of refinement, contribution, dependency and association links.
    pub fn link_count(&self) -> usize {
        let refinements: usize =
            self.elements().filter_map(|(_, e)| e.refinement.as_ref()).map(|r| r.children.len()).sum();
        let contributions: usize = self.elements().map(|(_, e)| e.contributions.len()).sum();
        refinements + contributions + self.dependencies.len() + self.associations.len()
    }
}

// ---------------------------------------------------------------------------
// Value models

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Activity {
    pub id: String,
    pub name: String,
    #[serde(skip)]
    pub loc: Loc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct VActor {
    pub id: String,
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parent: Option<String>,
    pub activities: Vec<Activity>,
    pub market_segment: bool,
    pub api_role: bool,
    pub layer_assignments: LayerAssignments,
    pub bapo_tags: BTreeSet<BapoTag>,
    #[serde(skip)]
    pub loc: Loc,
}

impl VActor {
    pub fn new(id: impl Into<String>, name: impl Into<String>) -> Self {
        VActor {
            id: id.into(),
            name: name.into(),
            parent: None,
            activities: Vec::new(),
            market_segment: false,
            api_role: false,
            layer_assignments: LayerAssignments::new(),
            bapo_tags: BTreeSet::new(),
            loc: Loc::NONE,
        }
    }
}

/// A flow endpoint: an actor, or an activity inside one.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Endpoint {
    pub actor: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub activity: Option<String>,
}

impl Endpoint {
    pub fn actor(actor: impl Into<String>) -> Self {
        Endpoint { actor: actor.into(), activity: None }
    }

    pub fn activity(actor: impl Into<String>, activity: impl Into<String>) -> Self {
        Endpoint { actor: actor.into(), activity: Some(activity.into()) }
    }
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.activity {
            Some(a) => write!(f, "{}.{}", self.actor, a),
            None => f.write_str(&self.actor),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FlowStatus {
    #[default]
    Normal,
    Problematic,
    Missing,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValueObject {
    pub name: String,
    pub kind: ElementKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValueFlow {
    pub id: String,
    pub from: Endpoint,
    pub to: Endpoint,
    pub object: ValueObject,
    pub status: FlowStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    #[serde(skip)]
    pub loc: Loc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Stimulus {
    pub id: String,
    pub name: String,
    pub at: String,
    #[serde(skip)]
    pub loc: Loc,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct ValueModel {
    pub name: String,
    pub actors: Vec<VActor>,
    pub flows: Vec<ValueFlow>,
    pub stimuli: Vec<Stimulus>,
}

impl ValueModel {
    pub fn new(name: impl Into<String>) -> Self {
        ValueModel { name: name.into(), ..Default::default() }
    }

    pub fn actor(&self, id: &str) -> Option<&VActor> {
        self.actors.iter().find(|a| a.id == id)
    }

    pub fn element_count(&self) -> usize {
        self.actors.len()
            + self.actors.iter().map(|a| a.activities.len()).sum::<usize>()
            + self.flows.len()
            + self.stimuli.len()
    }
}

/// Read-only view of the per-actor annotations both model kinds carry.
pub trait ActorTags {
    /// `(actor id, layer placements, bapo tags, location)` per actor.
    fn actor_tags(&self) -> Vec<(&str, &LayerAssignments, &BTreeSet<BapoTag>, &Loc)>;
}

impl ActorTags for GoalModel {
    fn actor_tags(&self) -> Vec<(&str, &LayerAssignments, &BTreeSet<BapoTag>, &Loc)> {
        self.actors.iter().map(|a| (a.id.as_str(), &a.layer_assignments, &a.bapo_tags, &a.loc)).collect()
    }
}

impl ActorTags for ValueModel {
    fn actor_tags(&self) -> Vec<(&str, &LayerAssignments, &BTreeSet<BapoTag>, &Loc)> {
        self.actors.iter().map(|a| (a.id.as_str(), &a.layer_assignments, &a.bapo_tags, &a.loc)).collect()
    }
}
