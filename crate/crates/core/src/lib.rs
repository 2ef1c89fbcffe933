//! Toolkit for statutory reasoning decomposed into argument identification,
//! argument coreference, structure extraction and argument instantiation.
//!
//! The crate is organised bottom-up:
//!
//! - [`model`]: spans, subsections, argument layers, typed values and cases.
//! - [`structure`]: the Horn-clause structure language, rule programs and
//!   dependency-tree unrolling.
//! - [`io`]: the canonical record format, corpus loading and statistics.
//! - [`baselines`]: deterministic coreference, identification and
//!   instantiation baselines.
//! - [`engine`]: single-subsection and tree-structured argument instantiation
//!   over a pluggable [`engine::Resolver`].
//! - [`metrics`]: span, coreference and accuracy metrics with report assembly.

pub mod baselines;
pub mod engine;
pub mod io;
pub mod metrics;
pub mod model;
pub mod structure;

pub use model::{ArgumentLayer, Case, CaseKind, Partition, Span, Subsection, Value, ValueMap, TRUTH};
