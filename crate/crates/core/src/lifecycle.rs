//! Lifecycle stage characteristics, value-curve mismatch detection and
//! transition trigger checklists.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Serialize, Serializer};

use crate::diag::{codes, Diagnostic, Loc, SourceSpan};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Plan,
    Operation,
    Deprecation,
    Retire,
}

impl Stage {
    pub const ALL: [Stage; 4] = [Stage::Plan, Stage::Operation, Stage::Deprecation, Stage::Retire];

    pub fn keyword(self) -> &'static str {
        match self {
            Stage::Plan => "plan",
            Stage::Operation => "operation",
            Stage::Deprecation => "deprecation",
            Stage::Retire => "retire",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Stage> {
        Stage::ALL.into_iter().find(|st| st.keyword() == s)
    }

    /// The stage entered by this stage's outgoing transition. A retired API
    /// can only come back through a new planning round.
    pub fn next(self) -> Stage {
        match self {
            Stage::Plan => Stage::Operation,
            Stage::Operation => Stage::Deprecation,
            Stage::Deprecation => Stage::Retire,
            Stage::Retire => Stage::Plan,
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// Common surface of the six characteristic value sets.
pub trait Characteristic: Copy + Eq + fmt::Debug + 'static {
    const FIELD: CharField;
    const ALL: &'static [Self];
    fn keyword(self) -> &'static str;
    /// The matrix cell text for this value.
    fn description(self) -> &'static str;

    fn from_keyword(s: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|v| v.keyword() == s)
    }
}

macro_rules! characteristic {
    ($name:ident, $field:ident, { $($variant:ident => $kw:literal, $desc:literal;)+ }) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
        pub enum $name {
            $($variant,)+
        }

        impl Characteristic for $name {
            const FIELD: CharField = CharField::$field;
            const ALL: &'static [Self] = &[$($name::$variant,)+];

            fn keyword(self) -> &'static str {
                match self {
                    $($name::$variant => $kw,)+
                }
            }

            fn description(self) -> &'static str {
                match self {
                    $($name::$variant => $desc,)+
                }
            }
        }

        impl Serialize for $name {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.serialize_str(self.keyword())
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.keyword())
            }
        }
    };
}

characteristic!(Stability, Stability, {
    Unstable => "unstable", "Unstable";
    MainlyStable => "mainly-stable", "Mainly Stable";
    Stable => "stable", "Stable";
});

characteristic!(Change, Change, {
    UncoordinatedExperimental => "uncoordinated", "Uncoordinated, Experimental";
    CoordinatedWithCost => "coordinated", "Coordinated, Change with cost";
    MinimalErrorCorrection => "minimal", "Minimal, Error correction";
    None => "none", "None";
});

characteristic!(Commitment, Commitment, {
    None => "none", "No commitment to user";
    Committed => "committed", "Committed to user";
    Decreasing => "decreasing", "Decreasing commitment";
});

characteristic!(Governance, Governance, {
    SettingUp => "setting-up", "Setting up";
    Governed => "governed", "Governed";
    NotApplicable => "na", "N/A";
});

characteristic!(Compatibility, Compatibility, {
    NoneEither => "none", "No forward or backward compatibility";
    ForwardAndBackward => "forward-backward", "Forward and backward compatibility";
    BackwardOnly => "backward-only", "No (API) forward compatibility";
    NoneEitherRetired => "none-retired", "No forward or backward compatibility";
});

characteristic!(Support, Support, {
    IntenseFewUsers => "intense-few-users", "Intense feedback from few users";
    ManyUsers => "many-users", "User support for many users";
    Minimizing => "minimizing", "Minimizing support";
    None => "none", "No support";
});

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CharField {
    Stability,
    Change,
    Commitment,
    Governance,
    Compatibility,
    Support,
}

impl CharField {
    pub const ALL: [CharField; 6] = [
        CharField::Stability,
        CharField::Change,
        CharField::Commitment,
        CharField::Governance,
        CharField::Compatibility,
        CharField::Support,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            CharField::Stability => "stability",
            CharField::Change => "change",
            CharField::Commitment => "commitment",
            CharField::Governance => "governance",
            CharField::Compatibility => "compatibility",
            CharField::Support => "support",
        }
    }

    pub fn from_keyword(s: &str) -> Option<CharField> {
        CharField::ALL.into_iter().find(|f| f.keyword() == s)
    }

    /// Matrix row label.
    pub fn title(self) -> &'static str {
        match self {
            CharField::Stability => "Stability",
            CharField::Change => "Change",
            CharField::Commitment => "Commitment",
            CharField::Governance => "Governance",
            CharField::Compatibility => "Compatibility",
            CharField::Support => "Support",
        }
    }

    /// Accepted value keywords for this field.
    pub fn keywords(self) -> Vec<&'static str> {
        fn kws<C: Characteristic>() -> Vec<&'static str> {
            C::ALL.iter().map(|v| v.keyword()).collect()
        }
        match self {
            CharField::Stability => kws::<Stability>(),
            CharField::Change => kws::<Change>(),
            CharField::Commitment => kws::<Commitment>(),
            CharField::Governance => kws::<Governance>(),
            CharField::Compatibility => kws::<Compatibility>(),
            CharField::Support => kws::<Support>(),
        }
    }
}

impl fmt::Display for CharField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// A keyword plus its cell text, as read off either a row or an observation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CharValue {
    pub keyword: &'static str,
    pub description: &'static str,
}

fn cv<C: Characteristic>(c: C) -> CharValue {
    CharValue { keyword: c.keyword(), description: c.description() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Characteristics {
    pub stability: Stability,
    pub change: Change,
    pub commitment: Commitment,
    pub governance: Governance,
    pub compatibility: Compatibility,
    pub support: Support,
}

impl Characteristics {
    pub fn get(&self, field: CharField) -> CharValue {
        match field {
            CharField::Stability => cv(self.stability),
            CharField::Change => cv(self.change),
            CharField::Commitment => cv(self.commitment),
            CharField::Governance => cv(self.governance),
            CharField::Compatibility => cv(self.compatibility),
            CharField::Support => cv(self.support),
        }
    }
}

/// Characteristics as observed on a real API; any field may be unknown.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Observed {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stability: Option<Stability>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub change: Option<Change>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub commitment: Option<Commitment>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub governance: Option<Governance>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub compatibility: Option<Compatibility>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub support: Option<Support>,
}

impl Observed {
    pub fn get(&self, field: CharField) -> Option<CharValue> {
        match field {
            CharField::Stability => self.stability.map(cv),
            CharField::Change => self.change.map(cv),
            CharField::Commitment => self.commitment.map(cv),
            CharField::Governance => self.governance.map(cv),
            CharField::Compatibility => self.compatibility.map(cv),
            CharField::Support => self.support.map(cv),
        }
    }

    /// Sets `field` from a value keyword; `false` if the keyword is not one
    /// of the field's values.
    pub fn set(&mut self, field: CharField, keyword: &str) -> bool {
        fn put<C: Characteristic>(slot: &mut Option<C>, kw: &str) -> bool {
            match C::from_keyword(kw) {
                Some(v) => {
                    *slot = Some(v);
                    true
                }
                None => false,
            }
        }
        match field {
            CharField::Stability => put(&mut self.stability, keyword),
            CharField::Change => put(&mut self.change, keyword),
            CharField::Commitment => put(&mut self.commitment, keyword),
            CharField::Governance => put(&mut self.governance, keyword),
            CharField::Compatibility => put(&mut self.compatibility, keyword),
            CharField::Support => put(&mut self.support, keyword),
        }
    }

    pub fn from_row(c: &Characteristics) -> Observed {
        Observed {
            stability: Some(c.stability),
            change: Some(c.change),
            commitment: Some(c.commitment),
            governance: Some(c.governance),
            compatibility: Some(c.compatibility),
            support: Some(c.support),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValueCurveSample {
    pub t: f64,
    pub stage: Stage,
    pub value: f64,
    #[serde(skip)]
    pub loc: Loc,
}

impl ValueCurveSample {
    pub fn new(t: f64, stage: Stage, value: f64) -> Self {
        ValueCurveSample { t, stage, value, loc: Loc::NONE }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ApiDescriptor {
    pub name: String,
    pub declared_stage: Stage,
    pub observed: Observed,
    pub curve: Vec<ValueCurveSample>,
    pub transition_rationales: Vec<String>,
    #[serde(skip)]
    pub loc: Loc,
    /// Where each observed field was stated.
    #[serde(skip)]
    pub field_locs: BTreeMap<CharField, Loc>,
}

impl ApiDescriptor {
    pub fn new(name: impl Into<String>, stage: Stage) -> Self {
        ApiDescriptor {
            name: name.into(),
            declared_stage: stage,
            observed: Observed::default(),
            curve: Vec::new(),
            transition_rationales: Vec::new(),
            loc: Loc::NONE,
            field_locs: BTreeMap::new(),
        }
    }
}

pub fn expected_characteristics(stage: Stage) -> Characteristics {
    match stage {
        Stage::Plan => Characteristics {
            stability: Stability::Unstable,
            change: Change::UncoordinatedExperimental,
            commitment: Commitment::None,
            governance: Governance::SettingUp,
            compatibility: Compatibility::NoneEither,
            support: Support::IntenseFewUsers,
        },
        Stage::Operation => Characteristics {
            stability: Stability::MainlyStable,
            change: Change::CoordinatedWithCost,
            commitment: Commitment::Committed,
            governance: Governance::Governed,
            compatibility: Compatibility::ForwardAndBackward,
            support: Support::ManyUsers,
        },
        Stage::Deprecation => Characteristics {
            stability: Stability::Stable,
            change: Change::MinimalErrorCorrection,
            commitment: Commitment::Decreasing,
            governance: Governance::Governed,
            compatibility: Compatibility::BackwardOnly,
            support: Support::Minimizing,
        },
        Stage::Retire => Characteristics {
            stability: Stability::Stable,
            change: Change::None,
            commitment: Commitment::None,
            governance: Governance::NotApplicable,
            compatibility: Compatibility::NoneEitherRetired,
            support: Support::None,
        },
    }
}

/// The full stage matrix as `field | stage | cell` lines, one per cell.
pub fn render_matrix() -> String {
    let mut out = String::new();
    for field in CharField::ALL {
        for stage in Stage::ALL {
            let v = expected_characteristics(stage).get(field);
            out.push_str(&format!("{} | {} | {}\n", field.title(), stage, v.description));
        }
    }
    out
}

pub fn lint_characteristics(d: &ApiDescriptor) -> Vec<Diagnostic> {
    let expected = expected_characteristics(d.declared_stage);
    let mut out = Vec::new();
    for field in CharField::ALL {
        let want = expected.get(field);
        let loc = d.field_locs.get(&field).unwrap_or(&d.loc);
        match d.observed.get(field) {
            None => out.push(
                Diagnostic::info(
                    codes::I_UNOBSERVED,
                    format!("{field}: not observed (expected {} for {})", want.keyword, d.declared_stage),
                )
                .at(&d.loc),
            ),
            Some(got) if got.keyword != want.keyword => out.push(
                Diagnostic::warning(
                    codes::W_CHAR,
                    format!(
                        "{field}: expected {} (\"{}\") for {}, observed {} (\"{}\")",
                        want.keyword, want.description, d.declared_stage, got.keyword, got.description
                    ),
                )
                .at(loc),
            ),
            Some(_) => {}
        }
    }
    crate::diag::sort_diagnostics(&mut out);
    out
}

/// Tunables for [`detect_value_mismatches`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thresholds {
    /// A value at or above this is "very high" (M1, M5).
    pub high: f64,
    /// Peak value an API should reach before operation (M3).
    pub ready: f64,
    /// Fraction of the running peak that counts as a great decrease.
    pub drop: f64,
    /// Number of trailing planning samples checked for a rise.
    pub window: usize,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds { high: 0.7, ready: 0.7, drop: 0.5, window: 2 }
    }
}

/// Structural problems with a curve: order of `t`, stage regressions and
/// values outside `[0, 1]`.
pub fn check_curve(curve: &[ValueCurveSample], owner: &Loc) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    if curve.is_empty() {
        out.push(Diagnostic::error(codes::E_EMPTY, "value curve has no samples").at(owner));
        return out;
    }
    for (i, s) in curve.iter().enumerate() {
        if !(0.0..=1.0).contains(&s.value) || !s.value.is_finite() {
            out.push(
                Diagnostic::error(codes::E_CURVE, format!("sample at t={} has value {} outside [0, 1]", s.t, s.value))
                    .at(&s.loc),
            );
        }
        if i > 0 {
            let prev = &curve[i - 1];
            if s.t.partial_cmp(&prev.t) != Some(std::cmp::Ordering::Greater) {
                out.push(
                    Diagnostic::error(codes::E_CURVE, format!("sample t={} does not follow t={}", s.t, prev.t))
                        .at(&s.loc),
                );
            }
            if s.stage < prev.stage {
                out.push(
                    Diagnostic::error(
                        codes::E_CURVE,
                        format!("stage moves back from {} to {} at t={}", prev.stage, s.stage, s.t),
                    )
                    .at(&s.loc),
                );
            }
        }
    }
    out
}

pub fn detect_value_mismatches(d: &ApiDescriptor, cfg: &Thresholds) -> Vec<Diagnostic> {
    detect_curve_mismatches(&d.curve, cfg, &d.loc)
}

/// Findings `M1`..`M5` for a value curve, at most one per pattern.
pub fn detect_curve_mismatches(curve: &[ValueCurveSample], cfg: &Thresholds, owner: &Loc) -> Vec<Diagnostic> {
    let mut out = check_curve(curve, owner);
    if !out.is_empty() {
        return out;
    }
    let high = cfg.high;
    let plan: Vec<&ValueCurveSample> = curve.iter().filter(|s| s.stage == Stage::Plan).collect();
    let operation: Vec<&ValueCurveSample> = curve.iter().filter(|s| s.stage == Stage::Operation).collect();

    if let Some(s) = plan.iter().find(|s| s.value >= high) {
        out.push(
            Diagnostic::warning(codes::M1, format!("value {} at t={} reaches {high} during planning", s.value, s.t))
                .at(&s.loc),
        );
    }

    let moves_on = curve.iter().any(|s| s.stage > Stage::Plan);
    let window = cfg.window.max(2);
    if moves_on && plan.len() >= 2 {
        let tail = &plan[plan.len().saturating_sub(window)..];
        let (first, last) = (tail[0], tail[tail.len() - 1]);
        if last.value <= first.value {
            out.push(
                Diagnostic::warning(
                    codes::M2,
                    format!(
                        "value does not rise before operation ({} at t={} to {} at t={})",
                        first.value, first.t, last.value, last.t
                    ),
                )
                .at(&last.loc),
            );
        }
    }

    if let Some(first_op) = operation.first() {
        let peak =
            curve.iter().filter(|s| s.stage <= Stage::Operation).map(|s| s.value).fold(f64::NEG_INFINITY, f64::max);
        if peak < cfg.ready {
            out.push(
                Diagnostic::warning(
                    codes::M3,
                    format!(
                        "operation reached at t={} although value never reached {} (peak {peak})",
                        first_op.t, cfg.ready
                    ),
                )
                .at(&first_op.loc),
            );
        }
    }

    let mut peak = f64::NEG_INFINITY;
    for s in &operation {
        peak = peak.max(s.value);
        if s.value < peak && s.value <= (1.0 - cfg.drop) * peak {
            out.push(
                Diagnostic::warning(
                    codes::M4,
                    format!("value falls to {} at t={} from an operation peak of {peak}", s.value, s.t),
                )
                .at(&s.loc),
            );
            break;
        }
    }

    if let Some(s) = curve.iter().find(|s| s.stage >= Stage::Deprecation) {
        if s.value >= high {
            out.push(
                Diagnostic::warning(
                    codes::M5,
                    format!("value is still {} when {} starts at t={}", s.value, s.stage, s.t),
                )
                .at(&s.loc),
            );
        }
    }
    out
}

/// Reads a `t,stage,value` CSV curve.
pub fn read_curve_csv(name: &Path, text: &str) -> Result<Vec<ValueCurveSample>, Diagnostic> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let bad = |line: u64, msg: String| {
        Diagnostic::error(codes::E_CURVE, msg).with_span(Some(SourceSpan::line(name, line as u32)))
    };
    let headers = reader.headers().map_err(|e| bad(1, format!("unreadable curve header: {e}")))?.clone();
    let cols: Vec<&str> = headers.iter().collect();
    if cols != ["t", "stage", "value"] {
        return Err(bad(1, format!("expected columns t,stage,value, found {}", cols.join(","))));
    }
    let mut out = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            bad(line, format!("malformed curve row: {e}"))
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        let t: f64 = rec[0].parse().map_err(|_| bad(line, format!("`{}` is not a number", &rec[0])))?;
        let stage = Stage::from_keyword(&rec[1].to_ascii_lowercase())
            .ok_or_else(|| bad(line, format!("unknown stage `{}`", &rec[1])))?;
        let value: f64 = rec[2].parse().map_err(|_| bad(line, format!("`{}` is not a number", &rec[2])))?;
        let mut s = ValueCurveSample::new(t, stage, value);
        s.loc = Loc(Some(SourceSpan::line(name, line as u32)));
        out.push(s);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Transition triggers

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Trigger {
    pub tag: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TriggerCatalog {
    pub sections: BTreeMap<(Stage, Stage), Vec<Trigger>>,
}

const BUILTIN_TRIGGERS: &str = include_str!("../data/triggers.catalog");

/// Lowercase, with runs of non-alphanumerics collapsed to `-`.
pub fn normalize_tag(s: &str) -> String {
    let mut out = String::new();
    for c in s.trim().chars() {
        if c.is_alphanumeric() {
            out.extend(c.to_lowercase());
        } else if !out.is_empty() && !out.ends_with('-') {
            out.push('-');
        }
    }
    while out.ends_with('-') {
        out.pop();
    }
    out
}

impl TriggerCatalog {
    pub fn builtin() -> TriggerCatalog {
        TriggerCatalog::parse(Path::new("triggers.catalog"), BUILTIN_TRIGGERS)
            .expect("bundled trigger catalog is well formed")
    }

    /// Parses `[from -> to]` section headers followed by `tag | text` lines;
    /// `#` starts a comment line.
    pub fn parse(name: &Path, text: &str) -> Result<TriggerCatalog, Vec<Diagnostic>> {
        let mut cat = TriggerCatalog::default();
        let mut errors = Vec::new();
        let mut current: Option<(Stage, Stage)> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let span = SourceSpan::line(name, i as u32 + 1);
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(inner) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                let parsed = inner
                    .split_once("->")
                    .and_then(|(a, b)| Some((Stage::from_keyword(a.trim())?, Stage::from_keyword(b.trim())?)));
                match parsed {
                    Some(key) => {
                        cat.sections.entry(key).or_default();
                        current = Some(key);
                    }
                    None => errors.push(
                        Diagnostic::error(codes::E_SYNTAX, format!("bad section header `{line}`"))
                            .with_span(Some(span)),
                    ),
                }
                continue;
            }
            let Some(key) = current else {
                errors.push(
                    Diagnostic::error(codes::E_SYNTAX, "trigger outside of a `[from -> to]` section")
                        .with_span(Some(span)),
                );
                continue;
            };
            match line.split_once('|') {
                Some((tag, text)) if !normalize_tag(tag).is_empty() => cat
                    .sections
                    .entry(key)
                    .or_default()
                    .push(Trigger { tag: normalize_tag(tag), text: text.trim().to_string() }),
                _ => errors.push(Diagnostic::error(codes::E_SYNTAX, "expected `tag | text`").with_span(Some(span))),
            }
        }
        if errors.is_empty() {
            Ok(cat)
        } else {
            Err(errors)
        }
    }

    pub fn section(&self, from: Stage, to: Stage) -> &[Trigger] {
        self.sections.get(&(from, to)).map_or(&[], |v| v.as_slice())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TriggerCheck {
    pub tag: String,
    pub text: String,
    pub matched: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Checklist {
    pub from: Stage,
    pub to: Stage,
    pub triggers: Vec<TriggerCheck>,
    pub uncatalogued: Vec<String>,
}

impl Checklist {
    pub fn matched(&self) -> impl Iterator<Item = &TriggerCheck> {
        self.triggers.iter().filter(|t| t.matched)
    }
}

/// Triggers for the declared stage's outgoing transition, with the
/// descriptor's rationales matched by tag.
pub fn transition_checklist(d: &ApiDescriptor, catalog: &TriggerCatalog) -> Checklist {
    let from = d.declared_stage;
    let to = from.next();
    let section = catalog.section(from, to);
    let rationales: Vec<String> = d.transition_rationales.iter().map(|r| normalize_tag(r)).collect();
    let triggers = section
        .iter()
        .map(|t| TriggerCheck { tag: t.tag.clone(), text: t.text.clone(), matched: rationales.contains(&t.tag) })
        .collect();
    let mut uncatalogued = Vec::new();
    for (raw, norm) in d.transition_rationales.iter().zip(&rationales) {
        if !section.iter().any(|t| &t.tag == norm) && !uncatalogued.contains(raw) {
            uncatalogued.push(raw.clone());
        }
    }
    Checklist { from, to, triggers, uncatalogued }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn curve(points: &[(Stage, f64)]) -> Vec<ValueCurveSample> {
        points.iter().enumerate().map(|(i, &(st, v))| ValueCurveSample::new(i as f64, st, v)).collect()
    }

    fn found(c: &[ValueCurveSample], cfg: &Thresholds) -> Vec<String> {
        detect_curve_mismatches(c, cfg, &Loc::NONE).into_iter().map(|d| d.code).collect()
    }

    use Stage::*;

    #[test]
    fn matrix_cells() {
        let plan = expected_characteristics(Plan);
        assert_eq!(plan.stability, Stability::Unstable);
        assert_eq!(plan.support, Support::IntenseFewUsers);
        assert_eq!(expected_characteristics(Operation).compatibility, Compatibility::ForwardAndBackward);
        let retire = expected_characteristics(Retire);
        assert_eq!(retire.change, Change::None);
        assert_eq!(retire.governance, Governance::NotApplicable);
        assert_eq!(render_matrix().lines().count(), 24);
    }

    #[test]
    fn lint_flags_operation_instability() {
        let mut d = ApiDescriptor::new("x", Operation);
        d.observed = Observed::from_row(&expected_characteristics(Operation));
        d.observed.stability = Some(Stability::Unstable);
        let diags = lint_characteristics(&d);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, "W-CHAR");
        assert!(diags[0].message.starts_with("stability: expected mainly-stable"));
    }

    #[test]
    fn unobserved_fields_are_info() {
        let d = ApiDescriptor::new("x", Plan);
        let diags = lint_characteristics(&d);
        assert_eq!(diags.len(), 6);
        assert!(diags.iter().all(|d| d.code == "I-UNOBSERVED"));
    }

    #[test]
    fn high_planning_value_is_m1() {
        assert_eq!(found(&curve(&[(Plan, 0.9)]), &Thresholds::default()), ["M1"]);
    }

    #[test]
    fn operation_drop_is_m4() {
        let c = curve(&[(Plan, 0.2), (Plan, 0.5), (Operation, 0.9), (Operation, 0.3)]);
        assert_eq!(found(&c, &Thresholds::default()), ["M4"]);
    }

    #[test]
    fn ideal_curve_is_clean() {
        let c = curve(&[
            (Plan, 0.1),
            (Plan, 0.3),
            (Plan, 0.6),
            (Operation, 0.8),
            (Operation, 0.85),
            (Operation, 0.8),
            (Deprecation, 0.5),
            (Retire, 0.1),
        ]);
        assert!(found(&c, &Thresholds::default()).is_empty());
    }

    #[test]
    fn malformed_curves() {
        let cfg = Thresholds::default();
        assert_eq!(found(&[], &cfg), ["E-EMPTY"]);
        assert_eq!(found(&curve(&[(Operation, 0.5), (Plan, 0.5)]), &cfg), ["E-CURVE"]);
        let mut c = curve(&[(Plan, 0.1), (Plan, 0.2)]);
        c[1].t = 0.0;
        assert_eq!(found(&c, &cfg), ["E-CURVE"]);
    }

    #[test]
    fn checklist_matches_tags() {
        let mut d = ApiDescriptor::new("x", Operation);
        d.transition_rationales = vec!["technical-debt".into(), "alien-reason".into()];
        let c = transition_checklist(&d, &TriggerCatalog::builtin());
        assert_eq!((c.from, c.to), (Operation, Deprecation));
        let matched: Vec<_> = c.matched().map(|t| t.text.as_str()).collect();
        assert_eq!(matched, ["Technical debt"]);
        assert_eq!(c.uncatalogued, ["alien-reason"]);
    }

    #[test]
    fn checklist_without_rationales_lists_everything() {
        let d = ApiDescriptor::new("x", Deprecation);
        let cat = TriggerCatalog::builtin();
        let c = transition_checklist(&d, &cat);
        assert_eq!(c.triggers.len(), cat.section(Deprecation, Retire).len());
        assert_eq!(c.matched().count(), 0);
    }

    #[test]
    fn catalog_errors_carry_lines() {
        let err = TriggerCatalog::parse(Path::new("c"), "x | y\n[plan -> nowhere]\n").unwrap_err();
        let lines: Vec<_> = err.iter().map(|d| d.span.as_ref().unwrap().start_line).collect();
        assert_eq!(lines, [1, 2]);
    }

    #[test]
    fn normalizes_rationales() {
        assert_eq!(normalize_tag(" Technical Debt "), "technical-debt");
        assert_eq!(normalize_tag("cost_exceeds--value"), "cost-exceeds-value");
    }

    #[test]
    fn csv_curve() {
        let c = read_curve_csv(Path::new("c.csv"), "t,stage,value\n0,plan,0.2\n1, Operation ,0.8\n").unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c[1].stage, Operation);
        assert!(read_curve_csv(Path::new("c.csv"), "a,b\n1,2\n").is_err());
    }

    fn sample_curve() -> impl Strategy<Value = Vec<ValueCurveSample>> {
        proptest::collection::vec((0usize..4, 0.0f64..=1.0), 1..12).prop_map(|mut v| {
            v.sort_by_key(|(s, _)| *s);
            v.into_iter().enumerate().map(|(i, (s, x))| ValueCurveSample::new(i as f64, Stage::ALL[s], x)).collect()
        })
    }

    proptest! {
        #[test]
        fn raising_high_adds_no_m1_m3_m5(c in sample_curve(), lo in 0.0f64..=1.0, hi in 0.0f64..=1.0) {
            let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
            let at = |high| {
                let cfg = Thresholds { high, ..Thresholds::default() };
                found(&c, &cfg).into_iter().filter(|k| ["M1", "M3", "M5"].contains(&k.as_str())).collect::<Vec<_>>()
            };
            let (before, after) = (at(lo), at(hi));
            prop_assert!(after.iter().all(|k| before.contains(k)));
        }

        #[test]
        fn lint_flags_exactly_the_differing_fields(
            stage in 0usize..4,
            picks in proptest::collection::vec(0usize..4, 6),
        ) {
            let stage = Stage::ALL[stage];
            let row = expected_characteristics(stage);
            let mut d = ApiDescriptor::new("x", stage);
            let mut differing = 0;
            for (field, pick) in CharField::ALL.into_iter().zip(picks) {
                let kws = field.keywords();
                let kw = kws[pick % kws.len()];
                d.observed.set(field, kw);
                if kw != row.get(field).keyword {
                    differing += 1;
                }
            }
            prop_assert_eq!(lint_characteristics(&d).len(), differing);
        }
    }
}
