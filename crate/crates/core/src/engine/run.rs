use rayon::prelude::*;

use super::{instantiate_full, EngineConfig, EngineError, Instantiation, Resolver};
use crate::io::{Corpus, Literal, Record, SplitSel};
use crate::metrics::{
    confidence_interval, pair_consistency, score_case, unified_accuracy, ArgScore, Cell, Family, FamilyTally,
    MetricReport,
};
use crate::model::Case;

#[derive(Debug, Clone, PartialEq)]
pub struct CaseOutcome {
    pub case_id: String,
    pub result: Result<Instantiation, EngineError>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub outcomes: Vec<CaseOutcome>,
    pub scores: Vec<ArgScore>,
    pub report: MetricReport,
}

fn split_name(sel: SplitSel) -> &'static str {
    match sel {
        SplitSel::Train => "train",
        SplitSel::Test => "test",
        SplitSel::All => "all",
    }
}

/// Runs every case of the split, in parallel on the current rayon pool,
/// and scores the predictions. Output order follows the corpus order.
/// A case that fails is recorded and scored as having no prediction.
pub fn evaluate_run(resolver: &dyn Resolver, corpus: &Corpus, split: SplitSel, config: &EngineConfig) -> RunOutput {
    let cases = corpus.cases_in(split);
    let outcomes: Vec<CaseOutcome> = cases
        .par_iter()
        .map(|c| CaseOutcome { case_id: c.id.clone(), result: instantiate_full(resolver, corpus, c, config) })
        .collect();
    let scores: Vec<ArgScore> = cases
        .iter()
        .zip(&outcomes)
        .flat_map(|(c, o)| score_case(c, o.result.as_ref().ok().map(|i| &i.values), config.truth_threshold))
        .collect();
    let report = instantiation_report(&cases, &outcomes, &scores, config.truth_threshold)
        .config("resolver", resolver.name())
        .config("split", split_name(split))
        .config("depth_cap", config.depth_cap)
        .config("threshold", config.truth_threshold)
        .config("insert_gold", config.insert_gold)
        .config("corpus", corpus.hash());
    RunOutput { outcomes, scores, report }
}

/// Accuracy per family with 90% intervals, the unified score, and
/// pair-consistency counts as notes.
pub fn instantiation_report(cases: &[&Case], outcomes: &[CaseOutcome], scores: &[ArgScore], threshold: f64) -> MetricReport {
    let mut r = MetricReport::new("Argument instantiation", &["accuracy", "n"]);
    let tally = FamilyTally::from_scores(scores);
    for f in Family::ALL {
        let n = tally.total(f);
        let cell = match tally.rate(f) {
            Some(p) => Cell::RateCi(p, confidence_interval(p, n)),
            None => Cell::Empty,
        };
        r.row(f.name(), vec![cell, Cell::Count(n)]);
    }
    let n = scores.len();
    let unified = match unified_accuracy(scores) {
        Some(p) => Cell::RateCi(p, confidence_interval(p, n)),
        None => Cell::Empty,
    };
    r.row("unified", vec![unified, Cell::Count(n)]);
    let results: Vec<_> =
        cases.iter().zip(outcomes).map(|(c, o)| (*c, o.result.as_ref().ok().map(|i| &i.values))).collect();
    let pairs = pair_consistency(&results, threshold);
    r.note(format!(
        "pairs: {} scored, {} answered identically, {} both correct, {} both wrong",
        pairs.pairs, pairs.identical, pairs.both_correct, pairs.split
    ));
    let failed = outcomes.iter().filter(|o| o.result.is_err()).count();
    if failed > 0 {
        r.note(format!("{failed} case(s) failed and were scored as unanswered"));
    }
    r
}

/// A run header followed by one record per predicted (case, argument,
/// value) and one per failed case.
pub fn prediction_records(header: &MetricReport, outcomes: &[CaseOutcome]) -> Vec<Record> {
    let mut out = vec![Record::new("@run").with(
        "config",
        Literal::Map(header.config.iter().map(|(k, v)| (k.clone(), Literal::Str(v.clone()))).collect()),
    )];
    for o in outcomes {
        match &o.result {
            Ok(inst) => {
                for (arg, v) in inst.values.iter() {
                    out.push(
                        Record::new(o.case_id.clone())
                            .with("arg", Literal::Str(arg.to_string()))
                            .with("value", Literal::from_value(v)),
                    );
                }
            }
            Err(e) => out.push(Record::new(o.case_id.clone()).with("error", Literal::Str(e.to_string()))),
        }
    }
    out
}
