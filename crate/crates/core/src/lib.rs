//! Modelling toolkit for API ecosystems: value and goal models, qualitative
//! evaluation, lifecycle stage checks, governance decision aids and metric
//! catalogs.

pub mod cli;
pub mod diag;
pub mod dsl;
pub mod evaluate;
pub mod govern;
pub mod label;
pub mod lifecycle;
pub mod link;
pub mod model;
pub mod report;
pub mod transform;
pub mod validate;

pub use diag::{Diagnostic, Loc, Severity, SourceSpan};
pub use label::{Evidence, EvidencePair, Label};
pub use model::{GoalModel, ValueModel};
