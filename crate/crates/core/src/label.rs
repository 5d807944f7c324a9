//! Qualitative satisfaction labels and the evidence pairs used to compute them.
//!
//! Labels form a chain `Denied < PartiallyDenied < Unknown < PartiallySatisfied
//! < Satisfied`. `Conflict` sits outside the chain and absorbs every min/max.
//! Propagation never rewrites labels directly: each node accumulates an
//! [`EvidencePair`] whose two sides only grow, and the label is a projection
//! of that pair.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Label {
    Satisfied,
    PartiallySatisfied,
    Unknown,
    PartiallyDenied,
    Denied,
    Conflict,
}

impl Label {
    /// Every label, strongest positive first.
    pub const ALL: [Label; 6] = [
        Label::Satisfied,
        Label::PartiallySatisfied,
        Label::Unknown,
        Label::PartiallyDenied,
        Label::Denied,
        Label::Conflict,
    ];

    /// The five labels a person may assign by hand.
    pub const ASSIGNABLE: [Label; 5] =
        [Label::Satisfied, Label::PartiallySatisfied, Label::Unknown, Label::PartiallyDenied, Label::Denied];

    /// Position in the chain, `None` for `Conflict`.
    fn rank(self) -> Option<u8> {
        match self {
            Label::Denied => Some(0),
            Label::PartiallyDenied => Some(1),
            Label::Unknown => Some(2),
            Label::PartiallySatisfied => Some(3),
            Label::Satisfied => Some(4),
            Label::Conflict => None,
        }
    }

    pub fn min(self, other: Label) -> Label {
        match (self.rank(), other.rank()) {
            (Some(a), Some(b)) => {
                if a <= b {
                    self
                } else {
                    other
                }
            }
            _ => Label::Conflict,
        }
    }

    pub fn max(self, other: Label) -> Label {
        match (self.rank(), other.rank()) {
            (Some(a), Some(b)) => {
                if a >= b {
                    self
                } else {
                    other
                }
            }
            _ => Label::Conflict,
        }
    }

    /// The keyword used for this label in scenario files.
    pub fn keyword(self) -> &'static str {
        match self {
            Label::Satisfied => "satisfied",
            Label::PartiallySatisfied => "partsat",
            Label::Unknown => "unknown",
            Label::PartiallyDenied => "partden",
            Label::Denied => "denied",
            Label::Conflict => "conflict",
        }
    }

    /// Short glyph for tables.
    pub fn symbol(self) -> &'static str {
        match self {
            Label::Satisfied => "S",
            Label::PartiallySatisfied => "PS",
            Label::Unknown => "?",
            Label::PartiallyDenied => "PD",
            Label::Denied => "D",
            Label::Conflict => "C",
        }
    }
}

/// Minimum under the label order; `Conflict` absorbs.
pub fn label_min(a: Label, b: Label) -> Label {
    a.min(b)
}

/// Maximum under the label order; `Conflict` absorbs.
pub fn label_max(a: Label, b: Label) -> Label {
    a.max(b)
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownLabel(pub String);

impl fmt::Display for UnknownLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown label `{}`", self.0)
    }
}

impl std::error::Error for UnknownLabel {}

impl FromStr for Label {
    type Err = UnknownLabel;

    /// Parses the assignable labels only; `conflict` is never user input.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Label::ASSIGNABLE.iter().copied().find(|l| l.keyword() == s).ok_or_else(|| UnknownLabel(s.to_string()))
    }
}

/// Strength of evidence on one side of a pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Evidence {
    #[default]
    None,
    Partial,
    Full,
}

/// Accumulated positive and negative evidence for one node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
pub struct EvidencePair {
    pub positive: Evidence,
    pub negative: Evidence,
}

impl EvidencePair {
    pub const NONE: EvidencePair = EvidencePair::new(Evidence::None, Evidence::None);

    pub const fn new(positive: Evidence, negative: Evidence) -> Self {
        EvidencePair { positive, negative }
    }

    /// The evidence a label stands for. `Conflict` maps to full evidence on
    /// both sides, the join of what `Satisfied` and `Denied` deliver.
    pub fn from_label(label: Label) -> Self {
        use Evidence::*;
        match label {
            Label::Satisfied => EvidencePair::new(Full, None),
            Label::PartiallySatisfied => EvidencePair::new(Partial, None),
            Label::Unknown => EvidencePair::NONE,
            Label::PartiallyDenied => EvidencePair::new(None, Partial),
            Label::Denied => EvidencePair::new(None, Full),
            Label::Conflict => EvidencePair::new(Full, Full),
        }
    }

    /// Side-wise maximum.
    pub fn join(self, other: EvidencePair) -> Self {
        EvidencePair { positive: self.positive.max(other.positive), negative: self.negative.max(other.negative) }
    }

    /// Joins `other` in place, returning whether anything changed.
    pub fn absorb(&mut self, other: EvidencePair) -> bool {
        let joined = self.join(other);
        let changed = joined != *self;
        *self = joined;
        changed
    }

    pub fn to_label(self) -> Label {
        use Evidence::*;
        match (self.positive, self.negative) {
            (None, None) => Label::Unknown,
            (Partial, None) => Label::PartiallySatisfied,
            (Full, None) => Label::Satisfied,
            (None, Partial) => Label::PartiallyDenied,
            (None, Full) => Label::Denied,
            _ => Label::Conflict,
        }
    }

    /// Number of single-step strengthenings taken from no evidence.
    pub fn height(self) -> u32 {
        self.positive as u32 + self.negative as u32
    }
}

/// Projection of an evidence pair onto a label.
pub fn evidence_to_label(e: EvidencePair) -> Label {
    e.to_label()
}
