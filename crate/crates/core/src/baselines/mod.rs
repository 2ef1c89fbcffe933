//! Deterministic baselines for identification, coreference and
//! instantiation.

mod argid;
mod constant;
mod heuristic;

pub use argid::heuristic_argument_id;
pub use constant::{fit_constant_baseline, hinge_loss, ConstantBaselineParams, ConstantResolver, FitError};
pub use heuristic::{lexical_overlap, HeuristicResolver};

use crate::model::{Partition, Span};

/// Every mention is its own argument.
pub fn single_mention_coref(spans: &[Span]) -> Partition {
    Partition::singletons(spans.len())
}

/// Words dropped before comparing placeholders.
pub const IGNORED_WORDS: [&str; 7] = ["such", "a", "an", "the", "any", "his", "every"];

/// Lowercases, drops [`IGNORED_WORDS`] as whole tokens and collapses
/// whitespace.
pub fn normalize_placeholder(s: &str) -> String {
    s.split_whitespace()
        .map(str::to_lowercase)
        .filter(|w| !IGNORED_WORDS.contains(&w.as_str()))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Mentions whose normalized placeholder strings are identical corefer.
/// Spans outside the text normalize to the empty string.
pub fn string_match_coref(spans: &[Span], text: &str) -> Partition {
    let keys: Vec<String> = spans.iter().map(|s| normalize_placeholder(s.slice(text).unwrap_or(""))).collect();
    Partition::from_labels(&keys)
}
