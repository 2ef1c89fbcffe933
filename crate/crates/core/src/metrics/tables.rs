//! Report builders for identification and coreference runs.

use std::collections::BTreeSet;

use super::{
    blanc_counts, ceaf_counts, exact_match_counts, muc_counts, span_counts, Aggregate, BlancCounts, Cell, Ceaf,
    Counts, MetricError, MetricReport, Prf,
};
use crate::model::{Partition, Span};

fn mean_row(r: &mut MetricReport, label: &str, a: &Aggregate, extra: Cell) {
    let cells = [a.mean(|p| p.precision), a.mean(|p| p.recall), a.mean(|p| p.f1)];
    let mut row: Vec<Cell> = cells.into_iter().map(|(m, s)| Cell::MeanStd(m, s)).collect();
    row.push(extra);
    r.row(label, row);
}

fn prf_row(r: &mut MetricReport, label: &str, p: Prf, extra: Cell) {
    r.row(label, vec![Cell::Rate(p.precision), Cell::Rate(p.recall), Cell::Rate(p.f1), extra]);
}

fn value_row(r: &mut MetricReport, label: &str, v: Cell) {
    r.row(label, vec![Cell::Empty, Cell::Empty, Cell::Empty, v]);
}

const COLUMNS: [&str; 4] = ["P", "R", "F1", "value"];

/// Span identification: mean ± stddev over subsections and pooled counts.
pub fn span_report(items: &[(&[Span], &[Span])]) -> MetricReport {
    let counts: Vec<Counts> = items.iter().map(|(g, p)| span_counts(g, p)).collect();
    let agg = Aggregate::from_counts(&counts);
    let mut r = MetricReport::new("Argument identification", &COLUMNS);
    mean_row(&mut r, "avg", &agg, Cell::Empty);
    prf_row(&mut r, "pooled", agg.pooled, Cell::Empty);
    value_row(&mut r, "subsections", Cell::Count(items.len()));
    r
}

/// Exact-match scores with both aggregations, the share of subsections
/// resolved perfectly, and the standard metrics on pooled counts.
pub fn coref_report(items: &[(&Partition, &Partition)]) -> Result<MetricReport, MetricError> {
    let mut exact = Vec::new();
    let mut muc = Vec::new();
    let mut ceaf_m = Vec::new();
    let mut ceaf_e = Vec::new();
    let mut blanc = Vec::new();
    let mut perfect = 0;
    for &(g, p) in items {
        exact.push(exact_match_counts(g, p)?);
        muc.push(muc_counts(g, p)?);
        ceaf_m.push(ceaf_counts(g, p, Ceaf::Mention)?);
        ceaf_e.push(ceaf_counts(g, p, Ceaf::Entity)?);
        blanc.push(blanc_counts(g, p)?);
        perfect += usize::from(g == p);
    }
    let agg = Aggregate::from_counts(&exact);
    let mut r = MetricReport::new("Argument coreference", &COLUMNS);
    mean_row(&mut r, "exact avg", &agg, Cell::Empty);
    prf_row(&mut r, "exact macro", agg.pooled, Cell::Empty);
    let pooled = |c: &[Counts]| c.iter().copied().sum::<Counts>().prf();
    prf_row(&mut r, "MUC", pooled(&muc), Cell::Empty);
    prf_row(&mut r, "CEAF_m", pooled(&ceaf_m), Cell::Empty);
    prf_row(&mut r, "CEAF_e", pooled(&ceaf_e), Cell::Empty);
    prf_row(&mut r, "BLANC", blanc.iter().copied().sum::<BlancCounts>().prf(), Cell::Empty);
    value_row(&mut r, "perfectly resolved", rate(perfect, items.len()));
    value_row(&mut r, "subsections", Cell::Count(items.len()));
    r.note("exact macro pools cluster counts over all subsections; exact avg weighs subsections equally");
    Ok(r)
}

fn rate(k: usize, n: usize) -> Cell {
    if n == 0 {
        Cell::Empty
    } else {
        Cell::Rate(k as f64 / n as f64)
    }
}

/// Exact-match counts between clusterings given as sets of mentions,
/// which need not cover the same mentions.
pub fn exact_match_sets<T: Ord>(gold: &BTreeSet<BTreeSet<T>>, pred: &BTreeSet<BTreeSet<T>>) -> Counts {
    let correct = gold.intersection(pred).count() as f64;
    Counts { p_num: correct, p_den: pred.len() as f64, r_num: correct, r_den: gold.len() as f64 }
}

/// Coreference over predicted spans, scored against gold span clusters.
pub fn cascade_report(items: &[(BTreeSet<BTreeSet<Span>>, BTreeSet<BTreeSet<Span>>)]) -> MetricReport {
    let counts: Vec<Counts> = items.iter().map(|(g, p)| exact_match_sets(g, p)).collect();
    let perfect = items.iter().filter(|(g, p)| g == p).count();
    let agg = Aggregate::from_counts(&counts);
    let mut r = MetricReport::new("Identification followed by coreference", &COLUMNS);
    mean_row(&mut r, "exact avg", &agg, Cell::Empty);
    prf_row(&mut r, "exact macro", agg.pooled, Cell::Empty);
    value_row(&mut r, "perfectly resolved", rate(perfect, items.len()));
    value_row(&mut r, "subsections", Cell::Count(items.len()));
    r
}
