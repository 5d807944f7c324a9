//! The `apimod` command line.
//!
//! Exit codes: 0 clean, 1 warnings only, 2 errors (warnings count as errors
//! under `--strict`), 64 usage errors.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::diag::{codes, has_errors, sort_diagnostics, Diagnostic, Severity};
use crate::dsl::{
    parse_api_descriptor, parse_goal_model, parse_metric_catalog, parse_scenario, parse_value_model, print_model,
    Dialect, ParseResult, Source,
};
use crate::evaluate::{compare_scenarios, propagate, propagate_metric_hierarchy, EvaluationResult, Scenario};
use crate::govern::{
    automation_report, check_metric_catalog, classify_openness, dimension_coverage_report, prioritize_items,
    read_items_csv, Exclusion, MetricCatalog, Mode, Subtractability, ASPECTS, DEFAULT_THRESHOLD, STRATEGIES,
};
use crate::lifecycle::{
    detect_curve_mismatches, expected_characteristics, lint_characteristics, read_curve_csv, render_matrix,
    transition_checklist, ApiDescriptor, CharField, Thresholds, TriggerCatalog,
};
use crate::link::{link_metrics, who_report};
use crate::model::{ActorTags, GoalModel, ValueModel};
use crate::report::{goal_to_dot, value_to_dot, DotOptions, JsonReport};
use crate::transform::transform_value_to_goal;
use crate::validate::{
    check_bapo_coverage, check_layer_coverage, validate_goal_model, validate_value_model_with, ValueOptions,
};

pub const EXIT_CLEAN: i32 = 0;
pub const EXIT_WARNINGS: i32 = 1;
pub const EXIT_ERRORS: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Parser, Debug)]
#[command(name = "apimod", version, about = "Model, validate and analyse API ecosystems")]
struct Cli {
    /// Print a JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Treat warnings as errors.
    #[arg(long, global = true)]
    strict: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse and validate model files of any dialect.
    Check {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// API focus for layer coverage; defaults to every focus the model mentions.
        #[arg(long)]
        focus: Option<String>,
        /// Require a reverse flow for every flow between two actors.
        #[arg(long)]
        strict_reciprocity: bool,
    },
    /// Turn a value model into a draft goal model.
    Transform {
        model: PathBuf,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Propagate scenario labels through a goal model.
    Evaluate {
        model: PathBuf,
        #[arg(long)]
        scenario: PathBuf,
    },
    /// Evaluate several scenarios side by side.
    Compare {
        model: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        scenarios: Vec<PathBuf>,
        #[arg(long)]
        actor: Option<String>,
    },
    /// Stage characteristics, value curve and transition triggers of an API.
    Lifecycle {
        api: Option<PathBuf>,
        #[arg(long)]
        curve: Option<PathBuf>,
        #[arg(long, default_value_t = 0.7)]
        high: f64,
        /// Peak value expected before operation.
        #[arg(long, default_value_t = 0.7)]
        ready: f64,
        #[arg(long, default_value_t = 0.5)]
        drop: f64,
        /// Alternative trigger catalog file.
        #[arg(long)]
        triggers: Option<PathBuf>,
        /// Print the expected characteristics matrix.
        #[arg(long)]
        matrix: bool,
    },
    /// Governance decision aids.
    #[command(subcommand)]
    Govern(GovernCommand),
    /// Metric catalogs and their link to goal models.
    #[command(subcommand)]
    Metrics(MetricsCommand),
    /// Render a model as Graphviz DOT.
    Export {
        model: PathBuf,
        /// Group actors into layer bands for this API focus.
        #[arg(long)]
        focus: Option<String>,
        /// Draw actors as clusters.
        #[arg(long)]
        cluster: bool,
        #[arg(short)]
        o: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Impl,
    Change,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ExclusionArg {
    Difficult,
    Easy,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SubtractabilityArg {
    Low,
    High,
}

#[derive(Subcommand, Debug)]
enum GovernCommand {
    /// Place items in decision quadrants and order them.
    Classify {
        items: PathBuf,
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
        threshold: f64,
    },
    /// Goods class from exclusion and subtractability.
    Openness {
        #[arg(long, value_enum)]
        exclusion: ExclusionArg,
        #[arg(long, value_enum)]
        subtractability: SubtractabilityArg,
    },
    /// List governance aspects and strategies.
    Catalog,
}

#[derive(Args, Debug)]
struct ModelAndCatalog {
    model: PathBuf,
    catalog: PathBuf,
}

#[derive(Subcommand, Debug)]
enum MetricsCommand {
    /// Check a metric catalog for missing why/who/where/dimension.
    Check { catalog: PathBuf },
    /// Metrics per dimension, with questions for empty ones.
    Dimensions { catalog: PathBuf },
    /// Design metrics grouped by automation level.
    Automation { catalog: PathBuf },
    /// Add metric qualities to a goal model.
    Link {
        #[command(flatten)]
        files: ModelAndCatalog,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Why, who, where and owning actors per metric.
    Who {
        #[command(flatten)]
        files: ModelAndCatalog,
    },
    /// Propagate measured labels through a quality hierarchy.
    Hierarchy {
        model: PathBuf,
        #[arg(long)]
        scenario: PathBuf,
    },
}

/// Result of one command before rendering.
struct Outcome {
    command: String,
    inputs: Vec<String>,
    diagnostics: Vec<Diagnostic>,
    analysis: Value,
    text: String,
}

impl Outcome {
    fn new(command: &str) -> Self {
        Outcome {
            command: command.to_string(),
            inputs: Vec::new(),
            diagnostics: Vec::new(),
            analysis: Value::Null,
            text: String::new(),
        }
    }

    fn read(&mut self, path: &Path) -> Option<String> {
        self.inputs.push(path.display().to_string());
        match std::fs::read_to_string(path) {
            Ok(t) => Some(t),
            Err(e) => {
                self.diagnostics.push(Diagnostic::error(codes::E_IO, format!("cannot read {}: {e}", path.display())));
                None
            }
        }
    }

    fn parse<T>(&mut self, path: &Path, f: impl for<'a> Fn(Source<'a>) -> ParseResult<T>) -> Option<T> {
        let text = self.read(path)?;
        let r = f(Source::new(path, &text));
        self.diagnostics.extend(r.diagnostics);
        r.model
    }

    fn extend(&mut self, d: impl IntoIterator<Item = Diagnostic>) {
        self.diagnostics.extend(d);
    }

    fn ok(&self) -> bool {
        !has_errors(&self.diagnostics)
    }

    fn write_output(&mut self, target: Option<&Path>, body: String) {
        match target {
            Some(path) => {
                if let Err(e) = std::fs::write(path, &body) {
                    self.diagnostics
                        .push(Diagnostic::error(codes::E_IO, format!("cannot write {}: {e}", path.display())));
                }
            }
            None => self.text.push_str(&body),
        }
    }
}

fn to_value(v: &impl Serialize) -> Value {
    serde_json::to_value(v).expect("analysis serializes")
}

/// Runs the tool on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(stdout, "{text}");
                EXIT_CLEAN
            };
        }
    };

    let mut out = dispatch(cli.command);
    sort_diagnostics(&mut out.diagnostics);

    if cli.json {
        let mut report = JsonReport::new(out.command.clone(), out.inputs.clone());
        report.diagnostics = out.diagnostics.clone();
        report.analysis = out.analysis.clone();
        let _ = write!(stdout, "{}", report.to_json());
    } else {
        let _ = write!(stdout, "{}", out.text);
        for d in &out.diagnostics {
            let _ = writeln!(stderr, "{d}");
        }
    }
    exit_code(&out.diagnostics, cli.strict)
}

pub fn exit_code(diags: &[Diagnostic], strict: bool) -> i32 {
    let warnings = diags.iter().any(|d| d.severity == Severity::Warning);
    if has_errors(diags) || (strict && warnings) {
        EXIT_ERRORS
    } else if warnings {
        EXIT_WARNINGS
    } else {
        EXIT_CLEAN
    }
}

fn dispatch(cmd: Command) -> Outcome {
    match cmd {
        Command::Check { files, focus, strict_reciprocity } => check(&files, focus.as_deref(), strict_reciprocity),
        Command::Transform { model, o } => transform(&model, o.as_deref()),
        Command::Evaluate { model, scenario } => evaluate(&model, &scenario),
        Command::Compare { model, scenarios, actor } => compare(&model, &scenarios, actor.as_deref()),
        Command::Lifecycle { api, curve, high, ready, drop, triggers, matrix } => lifecycle(
            api.as_deref(),
            curve.as_deref(),
            Thresholds { high, ready, drop, ..Thresholds::default() },
            triggers.as_deref(),
            matrix,
        ),
        Command::Govern(g) => govern(g),
        Command::Metrics(m) => metrics(m),
        Command::Export { model, focus, cluster, o } => export(&model, focus, cluster, o.as_deref()),
    }
}

// ---------------------------------------------------------------------------

fn coverage(m: &impl ActorTags, focus: Option<&str>) -> Vec<Diagnostic> {
    let foci: Vec<String> = match focus {
        Some(f) => vec![f.to_string()],
        None => {
            let mut all: Vec<String> =
                m.actor_tags().into_iter().flat_map(|(_, layers, _, _)| layers.keys().cloned()).collect();
            all.sort();
            all.dedup();
            all
        }
    };
    let mut d: Vec<Diagnostic> = foci.iter().flat_map(|f| check_layer_coverage(m, f)).collect();
    d.extend(check_bapo_coverage(m));
    d
}

fn check(files: &[PathBuf], focus: Option<&str>, strict_reciprocity: bool) -> Outcome {
    let mut out = Outcome::new("check");
    let mut summary = Vec::new();
    for path in files {
        let Some(text) = out.read(path) else { continue };
        let before = out.diagnostics.len();
        let src = Source::new(path, &text);
        let dialect = Dialect::sniff(&text);
        match dialect {
            Some(Dialect::Value) => {
                let r = parse_value_model(src);
                out.extend(r.diagnostics);
                if let Some(m) = r.model {
                    out.extend(validate_value_model_with(&m, ValueOptions { strict_reciprocity }));
                    out.extend(coverage(&m, focus));
                }
            }
            Some(Dialect::Goal) => {
                let r = parse_goal_model(src);
                out.extend(r.diagnostics);
                if let Some(m) = r.model {
                    out.extend(validate_goal_model(&m));
                    out.extend(coverage(&m, focus));
                }
            }
            Some(Dialect::Scenario) => out.extend(parse_scenario(src).diagnostics),
            Some(Dialect::Api) => {
                let r = parse_api_descriptor(src);
                out.extend(r.diagnostics);
                if let Some(d) = r.model {
                    out.extend(lint_characteristics(&d));
                    if !d.curve.is_empty() {
                        out.extend(detect_curve_mismatches(&d.curve, &Thresholds::default(), &d.loc));
                    }
                }
            }
            Some(Dialect::Metrics) => {
                let r = parse_metric_catalog(src);
                out.extend(r.diagnostics);
                if let Some(c) = r.model {
                    out.extend(check_metric_catalog(&c.metrics));
                }
            }
            None => out.diagnostics.push(
                Diagnostic::error(
                    codes::E_SYNTAX,
                    "unknown file kind: expected valuemodel, goalmodel, scenario, api or metrics",
                )
                .with_span(Some(crate::diag::SourceSpan::line(path, 1))),
            ),
        }
        let new = &out.diagnostics[before..];
        let count = |s: Severity| new.iter().filter(|d| d.severity == s).count();
        let (e, w, i) = (count(Severity::Error), count(Severity::Warning), count(Severity::Info));
        let _ = writeln!(out.text, "{}: {e} errors, {w} warnings, {i} notes", path.display());
        summary.push(json!({
            "file": path.display().to_string(),
            "errors": e,
            "warnings": w,
            "infos": i,
        }));
    }
    out.analysis = json!({ "files": summary });
    out
}

fn transform(path: &Path, o: Option<&Path>) -> Outcome {
    let mut out = Outcome::new("transform");
    let Some(m) = out.parse(path, |s| parse_value_model(s)) else { return out };
    let (g, d) = transform_value_to_goal(&m);
    out.extend(d);
    if out.ok() {
        let text = print_model(&g);
        out.analysis = json!({
            "actors": g.actors.len(),
            "elements": g.elements().count(),
            "dependencies": g.dependencies.len(),
            "associations": g.associations.len(),
            "model": text,
        });
        out.write_output(o, text);
    }
    out
}

fn label_table(r: &EvaluationResult) -> String {
    let width = r.labels.keys().map(|k| k.chars().count()).max().unwrap_or(0).max(7);
    let mut s = String::new();
    let _ = writeln!(s, "{:width$}  label", "element");
    for (id, l) in &r.labels {
        let mark = if r.overridden.contains(id) { " *" } else { "" };
        let _ = writeln!(s, "{id:width$}  {}{mark}", l.keyword());
    }
    if !r.overridden.is_empty() {
        s.push_str("* assigned label overrides the propagated one\n");
    }
    s
}

fn evaluate(model: &Path, scenario: &Path) -> Outcome {
    let mut out = Outcome::new("evaluate");
    let m = out.parse(model, |s| parse_goal_model(s));
    let s = out.parse(scenario, |s| parse_scenario(s));
    let (Some(m), Some(s)) = (m, s) else { return out };
    let r = propagate(&m, &s);
    out.extend(r.diagnostics.clone());
    if !has_errors(&r.diagnostics) {
        out.text = label_table(&r);
    }
    out.analysis = to_value(&r);
    out
}

fn compare(model: &Path, scenarios: &[PathBuf], actor: Option<&str>) -> Outcome {
    let mut out = Outcome::new("compare");
    let m = out.parse(model, |s| parse_goal_model(s));
    let ss: Vec<Option<Scenario>> = scenarios.iter().map(|p| out.parse(p, |s| parse_scenario(s))).collect();
    let Some(m) = m else { return out };
    let Some(ss) = ss.into_iter().collect::<Option<Vec<_>>>() else { return out };
    match compare_scenarios(&m, &ss, actor) {
        Ok(c) => {
            let width = c.rows.iter().map(|r| r.id.chars().count()).max().unwrap_or(0).max(7);
            // Wide enough for the longest label keyword.
            let cols: Vec<usize> = c.scenarios.iter().map(|s| s.chars().count().max(9)).collect();
            let mut t = format!("{:width$}", "element");
            for (s, w) in c.scenarios.iter().zip(&cols) {
                let _ = write!(t, "  {s:w$}");
            }
            t.push('\n');
            for r in &c.rows {
                let _ = write!(t, "{:width$}", r.id);
                for (l, w) in r.labels.iter().zip(&cols) {
                    let _ = write!(t, "  {:w$}", l.keyword());
                }
                t.push('\n');
            }
            let _ = write!(t, "{:width$}", "score");
            for (s, w) in c.scores.iter().zip(&cols) {
                let _ = write!(t, "  {s:<w$}");
            }
            t.push('\n');
            let _ = write!(t, "{:width$}", "rank");
            for (r, w) in c.ranks.iter().zip(&cols) {
                let _ = write!(t, "  {r:<w$}");
            }
            t.push('\n');
            out.text = t.lines().map(|l| format!("{}\n", l.trim_end())).collect();
            out.extend(c.diagnostics.clone());
            out.analysis = to_value(&c);
        }
        Err(d) => out.extend(d),
    }
    out
}

fn lifecycle(
    api: Option<&Path>,
    curve: Option<&Path>,
    cfg: Thresholds,
    triggers: Option<&Path>,
    matrix: bool,
) -> Outcome {
    let mut out = Outcome::new("lifecycle");
    if matrix {
        out.text.push_str(&render_matrix());
        let rows: Vec<Value> = crate::lifecycle::Stage::ALL
            .into_iter()
            .map(|s| {
                let c = expected_characteristics(s);
                let cells: serde_json::Map<String, Value> = CharField::ALL
                    .into_iter()
                    .map(|f| (f.keyword().to_string(), Value::from(c.get(f).description)))
                    .collect();
                json!({ "stage": s.keyword(), "cells": cells })
            })
            .collect();
        out.analysis = json!({ "matrix": rows });
    }
    let Some(api) = api else {
        if !matrix {
            out.diagnostics.push(Diagnostic::error(codes::E_IO, "nothing to do: give an api descriptor or --matrix"));
        }
        return out;
    };
    let Some(mut d): Option<ApiDescriptor> = out.parse(api, |s| parse_api_descriptor(s)) else { return out };
    if let Some(path) = curve {
        let Some(text) = out.read(path) else { return out };
        match read_curve_csv(path, &text) {
            Ok(c) => d.curve = c,
            Err(e) => {
                out.diagnostics.push(e);
                return out;
            }
        }
    }
    let catalog = match triggers {
        Some(path) => {
            let Some(text) = out.read(path) else { return out };
            match TriggerCatalog::parse(path, &text) {
                Ok(c) => c,
                Err(e) => {
                    out.extend(e);
                    return out;
                }
            }
        }
        None => TriggerCatalog::builtin(),
    };
    if [cfg.high, cfg.ready, cfg.drop].iter().any(|x| !(0.0..=1.0).contains(x)) {
        out.diagnostics.push(Diagnostic::error(codes::E_VALUE, "--high, --ready and --drop must lie in [0, 1]"));
        return out;
    }
    let lint = lint_characteristics(&d);
    // A descriptor may leave out its curve; an explicit --curve must have samples.
    let findings = if d.curve.is_empty() && curve.is_none() {
        Vec::new()
    } else {
        detect_curve_mismatches(&d.curve, &cfg, &d.loc)
    };
    let checklist = transition_checklist(&d, &catalog);

    let expected = expected_characteristics(d.declared_stage);
    let t = &mut out.text;
    let _ = writeln!(t, "{} ({})", d.name, d.declared_stage);
    for f in CharField::ALL {
        let e = expected.get(f);
        let o = d.observed.get(f).map_or("-", |v| v.description);
        let flag = match d.observed.get(f) {
            Some(v) if v != e => "  MISMATCH",
            _ => "",
        };
        let _ = writeln!(t, "  {:13} expected {:40} observed {o}{flag}", f.title(), e.description);
    }
    let _ = writeln!(t, "transition {} -> {}", checklist.from, checklist.to);
    for c in &checklist.triggers {
        let _ = writeln!(t, "  [{}] {} ({})", if c.matched { "x" } else { " " }, c.text, c.tag);
    }
    for u in &checklist.uncatalogued {
        let _ = writeln!(t, "  uncatalogued: {u}");
    }

    let mut analysis = json!({
        "api": d.name,
        "stage": d.declared_stage,
        "expected": expected,
        "observed": d.observed,
        "curve": d.curve,
        "thresholds": { "high": cfg.high, "ready": cfg.ready, "drop": cfg.drop, "window": cfg.window },
        "mismatches": findings.iter().filter(|f| f.code.starts_with('M')).map(|f| f.code.clone()).collect::<Vec<_>>(),
        "checklist": checklist,
    });
    if let (Value::Object(a), Value::Object(m)) = (&mut analysis, &out.analysis) {
        a.extend(m.clone());
    }
    out.analysis = analysis;
    out.extend(lint);
    out.extend(findings);
    out
}

fn govern(cmd: GovernCommand) -> Outcome {
    match cmd {
        GovernCommand::Classify { items, mode, threshold } => {
            let mut out = Outcome::new("govern classify");
            let Some(text) = out.read(&items) else { return out };
            let items = match read_items_csv(&items, &text) {
                Ok(i) => i,
                Err(e) => {
                    out.extend(e);
                    return out;
                }
            };
            let mode = match mode {
                ModeArg::Impl => Mode::Impl,
                ModeArg::Change => Mode::Change,
            };
            let ranked = prioritize_items(&items, mode, threshold);
            for (i, p) in ranked.iter().enumerate() {
                let _ =
                    writeln!(out.text, "{:>3}  {}  {}  a={} b={}", i + 1, p.quadrant, p.item.name, p.item.a, p.item.b);
            }
            out.analysis = json!({ "mode": mode, "threshold": threshold, "items": ranked });
            out
        }
        GovernCommand::Openness { exclusion, subtractability } => {
            let mut out = Outcome::new("govern openness");
            let e = match exclusion {
                ExclusionArg::Difficult => Exclusion::Difficult,
                ExclusionArg::Easy => Exclusion::Easy,
            };
            let s = match subtractability {
                SubtractabilityArg::Low => Subtractability::Low,
                SubtractabilityArg::High => Subtractability::High,
            };
            let class = classify_openness(e, s);
            let _ = writeln!(out.text, "{class}");
            out.analysis = json!({ "exclusion": e, "subtractability": s, "class": class });
            out
        }
        GovernCommand::Catalog => {
            let mut out = Outcome::new("govern catalog");
            out.text.push_str("Aspects\n");
            for a in ASPECTS {
                let _ = writeln!(out.text, "  {a}");
            }
            out.text.push_str("Strategies\n");
            for s in STRATEGIES {
                let _ = writeln!(out.text, "  {s}");
            }
            out.analysis = json!({ "aspects": ASPECTS, "strategies": STRATEGIES });
            out
        }
    }
}

fn metrics(cmd: MetricsCommand) -> Outcome {
    match cmd {
        MetricsCommand::Check { catalog } => {
            let mut out = Outcome::new("metrics check");
            let Some(c) = out.parse(&catalog, |s| parse_metric_catalog(s)) else { return out };
            let d = check_metric_catalog(&c.metrics);
            let _ = writeln!(out.text, "{}: {} metrics, {} findings", c.name, c.metrics.len(), d.len());
            out.analysis = json!({ "metrics": c.metrics.len() });
            out.extend(d);
            out
        }
        MetricsCommand::Dimensions { catalog } => {
            let mut out = Outcome::new("metrics dimensions");
            let Some(c) = out.parse(&catalog, |s| parse_metric_catalog(s)) else { return out };
            let rows = dimension_coverage_report(&c.metrics);
            for r in &rows {
                let _ = writeln!(out.text, "{:15} {:3}  {}", r.dimension.keyword(), r.count, r.metrics.join(", "));
                if let Some(q) = r.question {
                    let _ = writeln!(out.text, "{:20}? {q}", "");
                }
            }
            out.analysis = to_value(&rows);
            out
        }
        MetricsCommand::Automation { catalog } => {
            let mut out = Outcome::new("metrics automation");
            let Some(c) = out.parse(&catalog, |s| parse_metric_catalog(s)) else { return out };
            let r = automation_report(&c.metrics);
            for (level, names) in &r.groups {
                let _ = writeln!(out.text, "{:12} {}", level.keyword(), names.join(", "));
            }
            if !r.unclassified.is_empty() {
                let _ = writeln!(out.text, "{:12} {}", "unclassified", r.unclassified.join(", "));
            }
            if let Some(n) = &r.note {
                let _ = writeln!(out.text, "note: {n}");
            }
            out.analysis = to_value(&r);
            out
        }
        MetricsCommand::Link { files, o } => {
            let mut out = Outcome::new("metrics link");
            let Some((m, c)) = model_and_catalog(&mut out, &files) else { return out };
            let (linked, d) = link_metrics(&m, &c.metrics);
            out.extend(d);
            if out.ok() {
                let text = print_model(&linked);
                out.analysis = json!({
                    "added": linked.elements().count() - m.elements().count(),
                    "model": text,
                });
                out.write_output(o.as_deref(), text);
            }
            out
        }
        MetricsCommand::Who { files } => {
            let mut out = Outcome::new("metrics who");
            let Some((m, c)) = model_and_catalog(&mut out, &files) else { return out };
            let rows = who_report(&m, &c.metrics);
            for r in &rows {
                let _ = writeln!(
                    out.text,
                    "{}\n  why: {}\n  who: {}\n  where: {}\n  actors: {}",
                    r.metric,
                    r.why,
                    r.who.join(", "),
                    r.sources.join(", "),
                    r.actors.join(", ")
                );
            }
            out.analysis = to_value(&rows);
            out
        }
        MetricsCommand::Hierarchy { model, scenario } => {
            let mut out = Outcome::new("metrics hierarchy");
            let m = out.parse(&model, |s| parse_goal_model(s));
            let s = out.parse(&scenario, |s| parse_scenario(s));
            let (Some(m), Some(s)) = (m, s) else { return out };
            let r = propagate_metric_hierarchy(&m, &s);
            out.extend(r.diagnostics.clone());
            if !has_errors(&r.diagnostics) {
                out.text = label_table(&r);
            }
            out.analysis = to_value(&r);
            out
        }
    }
}

fn model_and_catalog(out: &mut Outcome, files: &ModelAndCatalog) -> Option<(GoalModel, MetricCatalog)> {
    let m = out.parse(&files.model, |s| parse_goal_model(s));
    let c = out.parse(&files.catalog, |s| parse_metric_catalog(s));
    Some((m?, c?))
}

fn export(path: &Path, focus: Option<String>, cluster: bool, o: Option<&Path>) -> Outcome {
    let mut out = Outcome::new("export");
    let Some(text) = out.read(path) else { return out };
    let opts = DotOptions { cluster_by_actor: cluster, layer_bands: focus };
    let src = Source::new(path, &text);
    let dot = match Dialect::sniff(&text) {
        Some(Dialect::Value) => {
            let r = parse_value_model(src);
            out.extend(r.diagnostics);
            r.model.map(|m: ValueModel| value_to_dot(&m, &opts))
        }
        Some(Dialect::Goal) => {
            let r = parse_goal_model(src);
            out.extend(r.diagnostics);
            r.model.map(|m: GoalModel| goal_to_dot(&m, &opts))
        }
        _ => {
            out.diagnostics.push(Diagnostic::error(
                codes::E_SYNTAX,
                format!("{}: only value and goal models can be exported", path.display()),
            ));
            None
        }
    };
    if let Some(dot) = dot {
        out.analysis = json!({ "dot": dot });
        out.write_output(o, dot);
    }
    out
}
