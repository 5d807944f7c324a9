//! Source spans and diagnostics shared by every analysis.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::path::PathBuf;

use serde::Serialize;

/// A 1-based, inclusive-start / exclusive-end region of a source file.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SourceSpan {
    pub file: PathBuf,
    pub start_line: u32,
    pub start_col: u32,
    pub end_line: u32,
    pub end_col: u32,
}

impl SourceSpan {
    /// The whole of line `line` (for line-oriented inputs such as CSV).
    pub fn line(file: impl AsRef<std::path::Path>, line: u32) -> SourceSpan {
        SourceSpan { file: file.as_ref().to_path_buf(), start_line: line, start_col: 1, end_line: line + 1, end_col: 1 }
    }

    pub fn to(&self, end: &SourceSpan) -> SourceSpan {
        SourceSpan {
            file: self.file.clone(),
            start_line: self.start_line,
            start_col: self.start_col,
            end_line: end.end_line,
            end_col: end.end_col,
        }
    }

    pub fn contains(&self, other: &SourceSpan) -> bool {
        self.file == other.file
            && (self.start_line, self.start_col) <= (other.start_line, other.start_col)
            && (other.end_line, other.end_col) <= (self.end_line, self.end_col)
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file.display(), self.start_line, self.start_col)
    }
}

/// Location metadata attached to model nodes.
///
/// Equality and hashing ignore the wrapped span so that two models built from
/// differently formatted text compare equal when their structure matches.
#[derive(Debug, Clone, Default, Serialize)]
#[serde(transparent)]
pub struct Loc(pub Option<SourceSpan>);

impl Loc {
    pub const NONE: Loc = Loc(None);

    pub fn span(&self) -> Option<&SourceSpan> {
        self.0.as_ref()
    }
}

impl PartialEq for Loc {
    fn eq(&self, _: &Loc) -> bool {
        true
    }
}

impl Eq for Loc {}

impl Hash for Loc {
    fn hash<H: Hasher>(&self, _: &mut H) {}
}

impl From<SourceSpan> for Loc {
    fn from(span: SourceSpan) -> Self {
        Loc(Some(span))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
    Info,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
            Severity::Info => "info",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub span: Option<SourceSpan>,
}

impl Diagnostic {
    pub fn new(severity: Severity, code: &str, message: impl Into<String>) -> Self {
        Diagnostic { severity, code: code.to_string(), message: message.into(), span: None }
    }

    pub fn error(code: &str, message: impl Into<String>) -> Self {
        Self::new(Severity::Error, code, message)
    }

    pub fn warning(code: &str, message: impl Into<String>) -> Self {
        Self::new(Severity::Warning, code, message)
    }

    pub fn info(code: &str, message: impl Into<String>) -> Self {
        Self::new(Severity::Info, code, message)
    }

    pub fn at(mut self, loc: &Loc) -> Self {
        self.span = loc.0.clone();
        self
    }

    pub fn with_span(mut self, span: Option<SourceSpan>) -> Self {
        self.span = span;
        self
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(span) = &self.span {
            write!(f, "{span}: ")?;
        }
        write!(f, "{}[{}]: {}", self.severity, self.code, self.message)
    }
}

/// Orders diagnostics by file, span, code, then message.
pub fn sort_diagnostics(diags: &mut [Diagnostic]) {
    diags.sort_by(compare);
}

fn compare(a: &Diagnostic, b: &Diagnostic) -> Ordering {
    a.span.cmp(&b.span).then_with(|| a.code.cmp(&b.code)).then_with(|| a.message.cmp(&b.message))
}

pub fn has_errors(diags: &[Diagnostic]) -> bool {
    diags.iter().any(Diagnostic::is_error)
}

/// Diagnostic codes. One constant per rule.
pub mod codes {
    // parsing
    pub const E_SYNTAX: &str = "E-SYNTAX";
    pub const E_DUP: &str = "E-DUP";
    pub const E_REF: &str = "E-REF";
    pub const E_CONTRIB: &str = "E-CONTRIB";
    pub const E_MIXED: &str = "E-MIXED";
    pub const E_QREFINE: &str = "E-QREFINE";
    pub const E_REFINE: &str = "E-REFINE";
    pub const E_CLOSED: &str = "E-CLOSED";
    pub const E_VALUE: &str = "E-VALUE";
    pub const E_PARENT_CYCLE: &str = "E-PARENT-CYCLE";
    pub const E_IO: &str = "E-IO";

    // value model
    pub const W_RECIP: &str = "W-RECIP";
    pub const W_BACKFLOW: &str = "W-BACKFLOW";
    pub const W_ISOLATED: &str = "W-ISOLATED";
    pub const E_NOAPI: &str = "E-NOAPI";
    pub const W_NOSTIM: &str = "W-NOSTIM";

    // goal model
    pub const E_CYCLE: &str = "E-CYCLE";
    pub const W_FLOAT: &str = "W-FLOAT";
    pub const E_DANGLE: &str = "E-DANGLE";
    pub const E_SELFDEP: &str = "E-SELFDEP";

    // coverage
    pub const W_LAYER_MISSING: &str = "W-LAYER-MISSING";
    pub const W_UNASSIGNED: &str = "W-UNASSIGNED";
    pub const I_BAPO_MISSING: &str = "I-BAPO-MISSING";

    // transform / evaluate
    pub const E_PRE: &str = "E-PRE";
    pub const W_EXPAND: &str = "W-EXPAND";
    pub const W_CONFLICT: &str = "W-CONFLICT";
    pub const I_OVERRIDE: &str = "I-OVERRIDE";

    // lifecycle
    pub const W_CHAR: &str = "W-CHAR";
    pub const I_UNOBSERVED: &str = "I-UNOBSERVED";
    pub const E_EMPTY: &str = "E-EMPTY";
    pub const E_CURVE: &str = "E-CURVE";
    pub const M1: &str = "M1";
    pub const M2: &str = "M2";
    pub const M3: &str = "M3";
    pub const M4: &str = "M4";
    pub const M5: &str = "M5";

    // metrics
    pub const W_NOWHY: &str = "W-NOWHY";
    pub const W_NOWHO: &str = "W-NOWHO";
    pub const W_NOWHERE: &str = "W-NOWHERE";
    pub const W_NODIM: &str = "W-NODIM";
    pub const I_NOAUTO: &str = "I-NOAUTO";
    pub const I_AUTO_UNUSED: &str = "I-AUTO-UNUSED";
    pub const W_UNLINKED: &str = "W-UNLINKED";
}
