//! Openness classification, decision quadrants and metric catalogs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use serde::Serialize;

use crate::diag::{codes, sort_diagnostics, Diagnostic, Loc, SourceSpan};

// ---------------------------------------------------------------------------
// Openness

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Exclusion {
    Difficult,
    Easy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Subtractability {
    Low,
    High,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum GoodsClass {
    PublicGoods,
    CommonPool,
    ClubGoods,
    PrivateGoods,
}

impl fmt::Display for GoodsClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GoodsClass::PublicGoods => "public goods",
            GoodsClass::CommonPool => "common-pool resources",
            GoodsClass::ClubGoods => "club goods",
            GoodsClass::PrivateGoods => "private goods",
        })
    }
}

impl Exclusion {
    pub fn from_keyword(s: &str) -> Option<Self> {
        match s {
            "difficult" => Some(Exclusion::Difficult),
            "easy" => Some(Exclusion::Easy),
            _ => None,
        }
    }
}

impl Subtractability {
    pub fn from_keyword(s: &str) -> Option<Self> {
        match s {
            "low" => Some(Subtractability::Low),
            "high" => Some(Subtractability::High),
            _ => None,
        }
    }
}

pub fn classify_openness(exclusion: Exclusion, subtractability: Subtractability) -> GoodsClass {
    match (exclusion, subtractability) {
        (Exclusion::Difficult, Subtractability::Low) => GoodsClass::PublicGoods,
        (Exclusion::Difficult, Subtractability::High) => GoodsClass::CommonPool,
        (Exclusion::Easy, Subtractability::Low) => GoodsClass::ClubGoods,
        (Exclusion::Easy, Subtractability::High) => GoodsClass::PrivateGoods,
    }
}

// ---------------------------------------------------------------------------
// Decision quadrants

pub const DEFAULT_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Quadrant {
    A,
    B,
    C,
    D,
}

impl fmt::Display for Quadrant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// `a` is value, `b` is effort.
    Impl,
    /// `a` is scope, `b` is impact.
    Change,
}

impl Mode {
    pub fn from_keyword(s: &str) -> Option<Mode> {
        match s {
            "impl" => Some(Mode::Impl),
            "change" => Some(Mode::Change),
            _ => None,
        }
    }

    /// Priority of each quadrant, first to last.
    pub fn order(self) -> [Quadrant; 4] {
        use Quadrant::*;
        match self {
            Mode::Impl => [A, B, C, D],
            Mode::Change => [A, B, D, C],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecisionItem {
    pub name: String,
    pub a: f64,
    pub b: f64,
}

impl DecisionItem {
    pub fn new(name: impl Into<String>, a: f64, b: f64) -> Self {
        DecisionItem { name: name.into(), a, b }
    }
}

/// Value `a` against effort `b`; a score equal to `t` counts as high.
pub fn classify_implementation(item: &DecisionItem, t: f64) -> Quadrant {
    match (item.a >= t, item.b >= t) {
        (true, false) => Quadrant::A,
        (true, true) => Quadrant::B,
        (false, false) => Quadrant::C,
        (false, true) => Quadrant::D,
    }
}

/// Scope `a` against impact `b`; a score equal to `t` counts as high.
pub fn classify_change(item: &DecisionItem, t: f64) -> Quadrant {
    match (item.b >= t, item.a >= t) {
        (true, true) => Quadrant::A,
        (true, false) => Quadrant::B,
        (false, true) => Quadrant::C,
        (false, false) => Quadrant::D,
    }
}

pub fn classify(item: &DecisionItem, mode: Mode, t: f64) -> Quadrant {
    match mode {
        Mode::Impl => classify_implementation(item, t),
        Mode::Change => classify_change(item, t),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prioritized {
    #[serde(flatten)]
    pub item: DecisionItem,
    pub quadrant: Quadrant,
}

/// Orders items by quadrant priority, then by `a - b` (impl) or by impact
/// (change), highest first. Equal items keep their input order.
pub fn prioritize_items(items: &[DecisionItem], mode: Mode, t: f64) -> Vec<Prioritized> {
    let order = mode.order();
    let rank = |q: Quadrant| order.iter().position(|&o| o == q).unwrap_or(order.len());
    let key = |i: &DecisionItem| match mode {
        Mode::Impl => i.a - i.b,
        Mode::Change => i.b,
    };
    let mut out: Vec<Prioritized> =
        items.iter().map(|i| Prioritized { item: i.clone(), quadrant: classify(i, mode, t) }).collect();
    out.sort_by(|x, y| rank(x.quadrant).cmp(&rank(y.quadrant)).then_with(|| key(&y.item).total_cmp(&key(&x.item))));
    out
}

fn parse_score(s: &str) -> Option<f64> {
    match s.to_ascii_lowercase().as_str() {
        "low" => Some(0.25),
        "med" | "medium" => Some(0.5),
        "high" => Some(0.75),
        other => other.parse().ok(),
    }
}

/// Reads `name,a,b` rows. Scores are numbers in `[0, 1]` or one of
/// `low`, `med`, `high`.
pub fn read_items_csv(name: &Path, text: &str) -> Result<Vec<DecisionItem>, Vec<Diagnostic>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let bad = |line: u64, msg: String| {
        Diagnostic::error(codes::E_VALUE, msg).with_span(Some(SourceSpan::line(name, line as u32)))
    };
    let headers = match reader.headers() {
        Ok(h) => h.clone(),
        Err(e) => return Err(vec![bad(1, format!("unreadable header: {e}"))]),
    };
    let cols: Vec<&str> = headers.iter().collect();
    if cols != ["name", "a", "b"] {
        return Err(vec![bad(1, format!("expected columns name,a,b, found {}", cols.join(",")))]);
    }
    let mut items = Vec::new();
    let mut errors = Vec::new();
    for rec in reader.records() {
        let rec = match rec {
            Ok(r) => r,
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line());
                errors.push(bad(line, format!("malformed row: {e}")));
                continue;
            }
        };
        let line = rec.position().map_or(0, |p| p.line());
        let mut scores = [0.0; 2];
        let mut ok = true;
        for (k, col) in ["a", "b"].iter().enumerate() {
            match parse_score(&rec[k + 1]) {
                Some(v) if (0.0..=1.0).contains(&v) => scores[k] = v,
                Some(v) => {
                    errors.push(bad(line, format!("score {col}={v} for `{}` is outside [0, 1]", &rec[0])));
                    ok = false;
                }
                None => {
                    errors.push(bad(line, format!("score {col}=`{}` for `{}` is not a number", &rec[k + 1], &rec[0])));
                    ok = false;
                }
            }
        }
        if ok {
            items.push(DecisionItem::new(&rec[0], scores[0], scores[1]));
        }
    }
    if errors.is_empty() {
        Ok(items)
    } else {
        Err(errors)
    }
}

/// Governance aspects and strategies, by name.
pub const ASPECTS: &[&str] = &[
    "Change Control",
    "Impact of Changes",
    "Policy Specification and Analysis",
    "Consistent Policy Implementation",
    "Monitoring",
    "Life-cycle Alignment",
    "API Integrity",
];

pub const STRATEGIES: &[&str] = &[
    "Pre-study",
    "Policies and risk",
    "Audit and trail",
    "Operation mode",
    "Metrics",
    "Acceptance processes",
    "People",
    "API development guidelines",
    "Organization",
    "Catalog and classify",
];

// ---------------------------------------------------------------------------
// Metrics

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Dimension {
    Business,
    Usage,
    Design,
    Implementation,
}

impl Dimension {
    pub const ALL: [Dimension; 4] =
        [Dimension::Business, Dimension::Usage, Dimension::Design, Dimension::Implementation];

    pub fn keyword(self) -> &'static str {
        match self {
            Dimension::Business => "business",
            Dimension::Usage => "usage",
            Dimension::Design => "design",
            Dimension::Implementation => "implementation",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Dimension> {
        Dimension::ALL.into_iter().find(|d| d.keyword() == s)
    }

    /// Prompt for finding metrics when a catalog has none in this dimension.
    pub fn question(self) -> &'static str {
        match self {
            Dimension::Business => {
                "Which business outcomes of offering the API (revenue, cost, market position) should be tracked?"
            }
            Dimension::Usage => "How do clients actually call and depend on the API, and which of that can be counted?",
            Dimension::Design => {
                "Which properties of the API signatures and their documentation can be checked before release?"
            }
            Dimension::Implementation => {
                "Which properties of the software behind the API (conformance, compatibility, defects) can be measured?"
            }
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Automation {
    Automatable,
    PartiallyAutomatable,
    Manual,
}

impl Automation {
    pub const ALL: [Automation; 3] = [Automation::Automatable, Automation::PartiallyAutomatable, Automation::Manual];

    pub fn keyword(self) -> &'static str {
        match self {
            Automation::Automatable => "automatable",
            Automation::PartiallyAutomatable => "partial",
            Automation::Manual => "manual",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Automation> {
        Automation::ALL.into_iter().find(|a| a.keyword() == s)
    }
}

impl fmt::Display for Automation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct MetricDef {
    pub name: String,
    pub what: String,
    pub why: String,
    pub who: Vec<String>,
    #[serde(rename = "where")]
    pub sources: Vec<String>,
    pub dimensions: BTreeSet<Dimension>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub automation: Option<Automation>,
    pub links: Vec<String>,
    #[serde(skip)]
    pub loc: Loc,
}

impl MetricDef {
    pub fn new(name: impl Into<String>) -> Self {
        MetricDef { name: name.into(), ..Default::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct MetricCatalog {
    pub name: String,
    pub metrics: Vec<MetricDef>,
}

impl MetricCatalog {
    pub fn metric(&self, name: &str) -> Option<&MetricDef> {
        self.metrics.iter().find(|m| m.name == name)
    }
}

pub fn check_metric_catalog(ms: &[MetricDef]) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for m in ms {
        let mut warn = |code: &str, msg: String| out.push(Diagnostic::warning(code, msg).at(&m.loc));
        if m.why.trim().is_empty() {
            warn(codes::W_NOWHY, format!("metric `{}` does not say why it is measured", m.name));
        }
        if m.who.is_empty() {
            warn(codes::W_NOWHO, format!("metric `{}` names no interested role", m.name));
        }
        if m.sources.is_empty() {
            warn(codes::W_NOWHERE, format!("metric `{}` names no data source", m.name));
        }
        if m.dimensions.is_empty() {
            warn(codes::W_NODIM, format!("metric `{}` is not placed in any dimension", m.name));
        }
        let design = m.dimensions.contains(&Dimension::Design);
        if design && m.automation.is_none() {
            out.push(
                Diagnostic::info(codes::I_NOAUTO, format!("design metric `{}` has no automation level", m.name))
                    .at(&m.loc),
            );
        }
        if !design && m.automation.is_some() {
            out.push(
                Diagnostic::info(
                    codes::I_AUTO_UNUSED,
                    format!("metric `{}` has an automation level but is not a design metric", m.name),
                )
                .at(&m.loc),
            );
        }
    }
    sort_diagnostics(&mut out);
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DimensionRow {
    pub dimension: Dimension,
    pub count: usize,
    pub metrics: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub question: Option<&'static str>,
}

/// Metric counts per dimension; empty dimensions carry an elicitation
/// question.
pub fn dimension_coverage_report(ms: &[MetricDef]) -> Vec<DimensionRow> {
    Dimension::ALL
        .into_iter()
        .map(|d| {
            let metrics: Vec<String> =
                ms.iter().filter(|m| m.dimensions.contains(&d)).map(|m| m.name.clone()).collect();
            DimensionRow {
                dimension: d,
                count: metrics.len(),
                question: metrics.is_empty().then(|| d.question()),
                metrics,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AutomationReport {
    pub groups: BTreeMap<Automation, Vec<String>>,
    pub unclassified: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Design-dimension metrics grouped by automation level.
pub fn automation_report(ms: &[MetricDef]) -> AutomationReport {
    let mut groups: BTreeMap<Automation, Vec<String>> = Automation::ALL.into_iter().map(|a| (a, Vec::new())).collect();
    let mut unclassified = Vec::new();
    let mut any = false;
    for m in ms.iter().filter(|m| m.dimensions.contains(&Dimension::Design)) {
        any = true;
        match m.automation {
            Some(a) => groups.entry(a).or_default().push(m.name.clone()),
            None => unclassified.push(m.name.clone()),
        }
    }
    AutomationReport {
        groups,
        unclassified,
        note: (!any).then(|| "catalog has no design-dimension metrics".to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn openness_grid() {
        use Exclusion::*;
        use Subtractability::*;
        assert_eq!(classify_openness(Difficult, Low), GoodsClass::PublicGoods);
        assert_eq!(classify_openness(Easy, High), GoodsClass::PrivateGoods);
        assert_eq!(classify_openness(Difficult, High), GoodsClass::CommonPool);
        assert_eq!(classify_openness(Easy, Low), GoodsClass::ClubGoods);
    }

    #[test]
    fn implementation_quadrants() {
        let t = DEFAULT_THRESHOLD;
        assert_eq!(classify_implementation(&DecisionItem::new("x", 0.9, 0.2), t), Quadrant::A);
        assert_eq!(classify_implementation(&DecisionItem::new("x", 0.9, 0.9), t), Quadrant::B);
        assert_eq!(classify_implementation(&DecisionItem::new("x", 0.2, 0.2), t), Quadrant::C);
        assert_eq!(classify_implementation(&DecisionItem::new("x", 0.2, 0.9), t), Quadrant::D);
        assert_eq!(classify_implementation(&DecisionItem::new("x", 0.5, 0.5), t), Quadrant::B);
    }

    #[test]
    fn change_quadrants() {
        let t = DEFAULT_THRESHOLD;
        assert_eq!(classify_change(&DecisionItem::new("x", 0.8, 0.9), t), Quadrant::A);
        assert_eq!(classify_change(&DecisionItem::new("x", 0.2, 0.9), t), Quadrant::B);
        assert_eq!(classify_change(&DecisionItem::new("x", 0.8, 0.2), t), Quadrant::C);
        assert_eq!(classify_change(&DecisionItem::new("x", 0.2, 0.2), t), Quadrant::D);
    }

    #[test]
    fn prioritization() {
        let items = [DecisionItem::new("b", 0.9, 0.9), DecisionItem::new("a", 0.9, 0.1)];
        let names: Vec<_> = prioritize_items(&items, Mode::Impl, 0.5).into_iter().map(|p| p.item.name).collect();
        assert_eq!(names, ["a", "b"]);

        let items = [DecisionItem::new("low", 0.7, 0.2), DecisionItem::new("high", 0.9, 0.2)];
        let names: Vec<_> = prioritize_items(&items, Mode::Impl, 0.5).into_iter().map(|p| p.item.name).collect();
        assert_eq!(names, ["high", "low"]);

        assert!(prioritize_items(&[], Mode::Change, 0.5).is_empty());

        let items = [DecisionItem::new("c", 0.9, 0.1), DecisionItem::new("d", 0.1, 0.1)];
        let names: Vec<_> = prioritize_items(&items, Mode::Change, 0.5).into_iter().map(|p| p.item.name).collect();
        assert_eq!(names, ["d", "c"]);
    }

    #[test]
    fn csv_items() {
        let items = read_items_csv(Path::new("i.csv"), "name,a,b\nx,high,0.1\n\"y, z\",low,med\n").unwrap();
        assert_eq!(items[0], DecisionItem::new("x", 0.75, 0.1));
        assert_eq!(items[1], DecisionItem::new("y, z", 0.25, 0.5));
        let err = read_items_csv(Path::new("i.csv"), "name,a,b\nx,1.5,0\ny,q,0\n").unwrap_err();
        assert_eq!(err.len(), 2);
        assert_eq!(err[1].span.as_ref().unwrap().start_line, 3);
    }

    fn metric(name: &str, dims: &[Dimension]) -> MetricDef {
        let mut m = MetricDef::new(name);
        m.why = "because".into();
        m.who = vec!["owner".into()];
        m.sources = vec!["logs".into()];
        m.dimensions = dims.iter().copied().collect();
        m
    }

    #[test]
    fn catalog_checks() {
        assert!(check_metric_catalog(&[metric("Branding", &[Dimension::Business])]).is_empty());
        let mut m = metric("x", &[Dimension::Usage]);
        m.who.clear();
        assert_eq!(check_metric_catalog(&[m])[0].code, "W-NOWHO");
        let d = metric("y", &[Dimension::Design]);
        assert_eq!(check_metric_catalog(&[d])[0].code, "I-NOAUTO");
        let mut u = metric("z", &[Dimension::Usage]);
        u.automation = Some(Automation::Manual);
        assert_eq!(check_metric_catalog(&[u])[0].code, "I-AUTO-UNUSED");
        let bare = MetricDef::new("bare");
        let codes: Vec<_> = check_metric_catalog(&[bare]).into_iter().map(|d| d.code).collect();
        assert_eq!(codes, ["W-NODIM", "W-NOWHERE", "W-NOWHO", "W-NOWHY"]);
    }

    #[test]
    fn coverage_and_automation() {
        let rows = dimension_coverage_report(&[metric("u", &[Dimension::Usage])]);
        assert_eq!(rows.iter().filter(|r| r.question.is_some()).count(), 3);
        assert_eq!(rows.iter().filter(|r| r.count == 0).count(), 3);
        assert!(dimension_coverage_report(&[]).iter().all(|r| r.question.is_some()));

        let mut doc = metric("Documentation", &[Dimension::Design]);
        doc.automation = Some(Automation::Automatable);
        let mut usable = metric("Usable", &[Dimension::Usage, Dimension::Design]);
        usable.automation = Some(Automation::Manual);
        let quality = metric("Quality", &[Dimension::Design]);
        let r = automation_report(&[doc, usable, quality]);
        assert_eq!(r.groups[&Automation::Automatable], ["Documentation"]);
        assert_eq!(r.groups[&Automation::Manual], ["Usable"]);
        assert_eq!(r.unclassified, ["Quality"]);
        assert!(r.note.is_none());
        assert!(automation_report(&[metric("u", &[Dimension::Usage])]).note.is_some());
    }

    proptest! {
        #[test]
        fn classification_changes_only_across_the_threshold(
            a in 0.0f64..=1.0, b in 0.0f64..=1.0, a2 in 0.0f64..=1.0, b2 in 0.0f64..=1.0,
        ) {
            let t = DEFAULT_THRESHOLD;
            let same_side = (a >= t) == (a2 >= t) && (b >= t) == (b2 >= t);
            for mode in [Mode::Impl, Mode::Change] {
                let q1 = classify(&DecisionItem::new("x", a, b), mode, t);
                let q2 = classify(&DecisionItem::new("x", a2, b2), mode, t);
                if same_side {
                    prop_assert_eq!(q1, q2);
                } else {
                    prop_assert_ne!(q1, q2);
                }
            }
        }

        #[test]
        fn prioritization_is_a_permutation(
            raw in proptest::collection::vec((0.0f64..=1.0, 0.0f64..=1.0), 0..30),
            change in any::<bool>(),
        ) {
            let items: Vec<DecisionItem> = raw.iter().enumerate().map(|(i, &(a, b))| DecisionItem::new(format!("i{i}"), a, b)).collect();
            let mode = if change { Mode::Change } else { Mode::Impl };
            let out = prioritize_items(&items, mode, 0.5);
            let mut names: Vec<String> = out.iter().map(|p| p.item.name.clone()).collect();
            names.sort();
            let mut expected: Vec<String> = items.iter().map(|i| i.name.clone()).collect();
            expected.sort();
            prop_assert_eq!(names, expected);
            let order = mode.order();
            let ranks: Vec<usize> = out.iter().map(|p| order.iter().position(|&q| q == p.quadrant).unwrap()).collect();
            prop_assert!(ranks.windows(2).all(|w| w[0] <= w[1]));
        }
    }
}
