//! Scoring for all four tasks and report assembly.

mod accuracy;
mod coref;
mod report;
mod tables;

use std::collections::BTreeSet;

pub use accuracy::{
    binary_accuracy, confidence_interval, numerical_accuracy, pair_consistency, relative_error, score_case,
    string_accuracy, unified_accuracy, ArgScore, Family, FamilyTally, PairReport,
};
pub use coref::{
    blanc, blanc_counts, ceaf_counts, ceaf_e, ceaf_m, ceaf_similarity, exact_match_coref, exact_match_counts,
    max_weight_matching, muc, muc_counts, BlancCounts, Ceaf, Counts, MetricError,
};
pub use report::{check_floors, parse_floor, Cell, Floor, MetricReport, ReportRow};
pub use tables::{cascade_report, coref_report, exact_match_sets, span_report};

use crate::model::Span;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Prf {
    pub fn new(precision: f64, recall: f64) -> Self {
        let f1 = if precision + recall > 0.0 { 2.0 * precision * recall / (precision + recall) } else { 0.0 };
        Prf { precision, recall, f1 }
    }

    pub const PERFECT: Prf = Prf { precision: 1.0, recall: 1.0, f1: 1.0 };
}

/// Exact-boundary span matching. Both sides empty is perfect; an empty
/// prediction against non-empty gold scores zero.
pub fn span_counts(gold: &[Span], pred: &[Span]) -> Counts {
    let g: BTreeSet<&Span> = gold.iter().collect();
    let p: BTreeSet<&Span> = pred.iter().collect();
    let matched = g.intersection(&p).count() as f64;
    Counts { p_num: matched, p_den: p.len() as f64, r_num: matched, r_den: g.len() as f64 }
}

pub fn span_prf(gold: &[Span], pred: &[Span]) -> Prf {
    span_counts(gold, pred).prf()
}

/// Mean and population standard deviation of a list of rates.
pub fn mean_stddev(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Per-unit scores together with their two aggregates: mean ± stddev over
/// units and the pooled corpus-level score.
#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub per_unit: Vec<Prf>,
    pub pooled: Prf,
}

impl Aggregate {
    pub fn from_counts(counts: &[Counts]) -> Self {
        Aggregate { per_unit: counts.iter().map(Counts::prf).collect(), pooled: counts.iter().copied().sum::<Counts>().prf() }
    }

    pub fn mean(&self, f: impl Fn(&Prf) -> f64) -> (f64, f64) {
        mean_stddev(&self.per_unit.iter().map(f).collect::<Vec<_>>())
    }
}
