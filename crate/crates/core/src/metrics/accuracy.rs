//! Per-argument scoring of instantiation outputs.

use std::collections::BTreeMap;

use crate::model::{Case, Value, ValueMap, TRUTH};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    Truth,
    Dollar,
    String,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Truth, Family::Dollar, Family::String];

    pub fn of(arg: &str, gold: &Value) -> Family {
        if arg == TRUTH {
            Family::Truth
        } else if matches!(gold, Value::Money(_)) {
            Family::Dollar
        } else {
            Family::String
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Truth => "@truth",
            Family::Dollar => "dollar",
            Family::String => "string",
        }
    }
}

/// Relative error of a dollar prediction against gold `y`.
pub fn relative_error(y: i64, y_hat: i64) -> f64 {
    (y as f64 - y_hat as f64).abs() / (0.1 * (y as f64).abs()).max(5000.0)
}

/// 1 iff the relative error is strictly below 1. Evaluated in integers:
/// |y - ŷ| < max(|y|/10, 5000) ⇔ 10|y - ŷ| < max(|y|, 50000).
pub fn numerical_accuracy(y: i64, y_hat: i64) -> bool {
    let diff = (y as i128 - y_hat as i128).abs();
    10 * diff < (y as i128).abs().max(50_000)
}

/// Gold counts as positive when it is 1; a prediction counts as positive
/// when it reaches the threshold. Missing predictions are wrong.
pub fn binary_accuracy(gold: f64, pred: Option<f64>, threshold: f64) -> bool {
    match pred {
        Some(p) => (p >= threshold) == (gold >= 0.5),
        None => false,
    }
}

pub fn string_accuracy(gold: &Value, pred: Option<&Value>) -> bool {
    pred.is_some_and(|p| p.canonical() == gold.canonical())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArgScore {
    pub case_id: String,
    pub arg: String,
    pub family: Family,
    pub correct: bool,
}

/// Scores every expected argument of a case. A prediction of the wrong
/// type, or none at all, is wrong.
pub fn score_case(case: &Case, pred: Option<&ValueMap>, threshold: f64) -> Vec<ArgScore> {
    case.expected
        .iter()
        .map(|(arg, gold)| {
            let p = pred.and_then(|m| m.get(arg));
            let family = Family::of(arg, gold);
            let correct = match family {
                Family::Truth => binary_accuracy(gold.as_truth().unwrap_or(0.0), p.and_then(Value::as_truth), threshold),
                Family::Dollar => {
                    let Value::Money(y) = gold else { unreachable!() };
                    match p {
                        Some(Value::Money(v) | Value::Number(v)) => numerical_accuracy(*y, *v),
                        _ => false,
                    }
                }
                Family::String => string_accuracy(gold, p),
            };
            ArgScore { case_id: case.id.clone(), arg: arg.to_string(), family, correct }
        })
        .collect()
}

/// Fraction of all scored arguments that are correct, so each family
/// weighs in proportion to its number of samples.
pub fn unified_accuracy(scores: &[ArgScore]) -> Option<f64> {
    if scores.is_empty() {
        return None;
    }
    Some(scores.iter().filter(|s| s.correct).count() as f64 / scores.len() as f64)
}

/// Half-width of the normal-approximation 90% interval of a rate.
pub fn confidence_interval(p: f64, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    1.645 * (p * (1.0 - p) / n as f64).sqrt()
}

/// Correct and total counts per family.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FamilyTally {
    pub counts: BTreeMap<Family, (usize, usize)>,
}

impl FamilyTally {
    pub fn from_scores(scores: &[ArgScore]) -> Self {
        let mut counts = BTreeMap::new();
        for s in scores {
            let e = counts.entry(s.family).or_insert((0, 0));
            e.0 += usize::from(s.correct);
            e.1 += 1;
        }
        FamilyTally { counts }
    }

    pub fn total(&self, f: Family) -> usize {
        self.counts.get(&f).map_or(0, |c| c.1)
    }

    pub fn rate(&self, f: Family) -> Option<f64> {
        self.counts.get(&f).map(|&(c, n)| c as f64 / n as f64)
    }
}

/// How a system answers positive/negative case pairs. Golds of a pair
/// differ, so an identical answer gets exactly one case right, and
/// differing answers are either both right or both wrong (`split`).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PairReport {
    pub pairs: usize,
    pub identical: usize,
    pub both_correct: usize,
    pub split: usize,
    pub unpaired: Vec<String>,
}

impl PairReport {
    pub fn counts(&self) -> (usize, usize, usize) {
        (self.identical, self.both_correct, self.split)
    }
}

/// Groups binary cases by pair key; groups that are not exactly one
/// positive and one negative case are listed as unpaired.
pub fn pair_consistency(results: &[(&Case, Option<&ValueMap>)], threshold: f64) -> PairReport {
    let mut groups: BTreeMap<&str, Vec<(&Case, Option<&ValueMap>)>> = BTreeMap::new();
    let mut report = PairReport::default();
    for &(case, pred) in results {
        let gold = case.expected.truth();
        match (case.pair_key(), gold) {
            (Some(k), Some(_)) if case.expected.len() == 1 => groups.entry(k).or_default().push((case, pred)),
            _ => report.unpaired.push(case.id.clone()),
        }
    }
    for (_, members) in groups {
        let golds: Vec<bool> = members.iter().map(|(c, _)| c.expected.truth().unwrap() >= 0.5).collect();
        if members.len() != 2 || golds[0] == golds[1] {
            report.unpaired.extend(members.iter().map(|(c, _)| c.id.clone()));
            continue;
        }
        let answer = |m: Option<&ValueMap>| m.and_then(ValueMap::truth).map(|t| t >= threshold);
        let (a, b) = (answer(members[0].1), answer(members[1].1));
        let right = |ans: Option<bool>, gold: bool| ans == Some(gold);
        report.pairs += 1;
        if a == b {
            report.identical += 1;
        } else if right(a, golds[0]) && right(b, golds[1]) {
            report.both_correct += 1;
        } else {
            report.split += 1;
        }
    }
    report.unpaired.sort();
    report
}
