//! Textual model formats.
//!
//! All dialects share one lexer: identifiers (`[A-Za-z_][A-Za-z0-9_-]*`),
//! double-quoted strings, numbers, punctuation and `//` comments. Each file is
//! a single top-level block:
//!
//! ```text
//! valuemodel <name> { ... }      .vm
//! goalmodel <name> [draft] { ... }  .gm
//! scenario <name> { ... }        .scn
//! api <name> { ... }             .api
//! metrics <name> { ... }         .metrics
//! ```
//!
//! Parsers never stop at the first problem. A malformed statement yields one
//! `E-SYNTAX` error and parsing resumes at the next statement; reference
//! errors are reported after the whole file has been read.

mod goal;
mod lexer;
mod misc;
mod parser;
mod print;
mod value;

use std::borrow::Cow;
use std::path::{Path, PathBuf};

pub use lexer::is_plain_ident;
pub use print::{print_model, Canonical};

use crate::diag::{has_errors, Diagnostic};
use crate::evaluate::Scenario;
use crate::govern::MetricCatalog;
use crate::lifecycle::ApiDescriptor;
use crate::model::{GoalModel, ValueModel};

/// Words that cannot be used as bare names; quote them instead.
pub const RESERVED: &[&str] = &[
    "actor",
    "activity",
    "and",
    "api",
    "as",
    "at",
    "bapo",
    "breaks",
    "closed",
    "depend",
    "draft",
    "flow",
    "from",
    "goal",
    "goalmodel",
    "group",
    "helps",
    "hurts",
    "in",
    "label",
    "layer",
    "link",
    "makes",
    "metric",
    "metrics",
    "or",
    "partof",
    "quality",
    "resource",
    "scenario",
    "segment",
    "status",
    "stimulus",
    "task",
    "to",
    "valuemodel",
];

/// Text to parse, with the file name used in spans.
#[derive(Debug, Clone)]
pub struct Source<'a> {
    pub name: PathBuf,
    pub text: &'a str,
}

impl<'a> Source<'a> {
    pub fn new(name: impl AsRef<Path>, text: &'a str) -> Self {
        Source { name: name.as_ref().to_path_buf(), text }
    }
}

impl<'a> From<&'a str> for Source<'a> {
    fn from(text: &'a str) -> Self {
        Source::new("<input>", text)
    }
}

impl<'a> From<&'a String> for Source<'a> {
    fn from(text: &'a String) -> Self {
        Source::new("<input>", text)
    }
}

/// A parsed model plus everything the parser had to say about it.
///
/// `model` is `None` exactly when `diagnostics` holds an error.
#[derive(Debug, Clone)]
pub struct ParseResult<T> {
    pub model: Option<T>,
    pub diagnostics: Vec<Diagnostic>,
}

impl<T> ParseResult<T> {
    pub(crate) fn from_parts(model: T, mut diagnostics: Vec<Diagnostic>) -> Self {
        crate::diag::sort_diagnostics(&mut diagnostics);
        let model = if has_errors(&diagnostics) { None } else { Some(model) };
        ParseResult { model, diagnostics }
    }

    pub fn is_ok(&self) -> bool {
        self.model.is_some()
    }

    pub fn into_result(self) -> Result<T, Vec<Diagnostic>> {
        match self.model {
            Some(m) => Ok(m),
            None => Err(self.diagnostics),
        }
    }

    /// The model, panicking with the diagnostics when parsing failed.
    pub fn unwrap(self) -> T {
        match self.model {
            Some(m) => m,
            None => panic!(
                "parse failed:\n{}",
                self.diagnostics.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("\n")
            ),
        }
    }
}

pub fn parse_value_model<'a>(src: impl Into<Source<'a>>) -> ParseResult<ValueModel> {
    let src = src.into();
    value::parse(&src.name, src.text)
}

pub fn parse_goal_model<'a>(src: impl Into<Source<'a>>) -> ParseResult<GoalModel> {
    let src = src.into();
    goal::parse(&src.name, src.text)
}

pub fn parse_scenario<'a>(src: impl Into<Source<'a>>) -> ParseResult<Scenario> {
    let src = src.into();
    misc::parse_scenario(&src.name, src.text)
}

pub fn parse_api_descriptor<'a>(src: impl Into<Source<'a>>) -> ParseResult<ApiDescriptor> {
    let src = src.into();
    misc::parse_api_descriptor(&src.name, src.text)
}

pub fn parse_metric_catalog<'a>(src: impl Into<Source<'a>>) -> ParseResult<MetricCatalog> {
    let src = src.into();
    misc::parse_metric_catalog(&src.name, src.text)
}

/// The dialect a file is written in, judged by its leading keyword.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dialect {
    Value,
    Goal,
    Scenario,
    Api,
    Metrics,
}

impl Dialect {
    pub fn sniff(text: &str) -> Option<Dialect> {
        let first = text.lines().map(|l| l.split("//").next().unwrap_or("").trim()).find(|l| !l.is_empty())?;
        let word = first.split(|c: char| !(c.is_ascii_alphanumeric())).next()?;
        match word {
            "valuemodel" => Some(Dialect::Value),
            "goalmodel" => Some(Dialect::Goal),
            "scenario" => Some(Dialect::Scenario),
            "api" => Some(Dialect::Api),
            "metrics" => Some(Dialect::Metrics),
            _ => None,
        }
    }
}

/// Quotes `s` unless it is a plain identifier and not reserved.
pub fn quote(s: &str) -> Cow<'_, str> {
    if is_plain_ident(s) && !RESERVED.contains(&s) {
        Cow::Borrowed(s)
    } else {
        Cow::Owned(quote_always(s))
    }
}

pub fn quote_always(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}
