use std::collections::BTreeMap;

use thiserror::Error;

use crate::engine::{Query, Resolution, Resolver};
use crate::metrics::relative_error;
use crate::model::{Case, Value, ValueMap, TRUTH};

/// The three constants of the baseline.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantBaselineParams {
    pub majority_truth: f64,
    pub constant_dollars: i64,
    /// Most common gold answer outside `@truth` and dollar amounts, if
    /// the training set has any.
    pub majority_string: Option<Value>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FitError {
    #[error("cannot fit on an empty training set")]
    Empty,
}

/// Σ max(Δ(y, c) − 1, 0) over the targets.
pub fn hinge_loss(targets: &[i64], c: i64) -> f64 {
    targets.iter().map(|&y| (relative_error(y, c) - 1.0).max(0.0)).sum()
}

/// Integer minimizer of the hinge loss. The loss is convex and piecewise
/// linear with kinks at y and y ± max(0.1|y|, 5000), so its minimum is
/// attained next to a kink; a coarse grid over the target range is
/// searched as well. The set of minimizers is an interval and its
/// midpoint is returned, which keeps the constant away from the edges
/// where a prediction stops counting as correct.
fn fit_dollars(targets: &[i64]) -> i64 {
    let Some((&lo, &hi)) = targets.iter().min().zip(targets.iter().max()) else { return 0 };
    let mut candidates: Vec<i64> = Vec::new();
    for &y in targets {
        let m = (0.1 * (y as f64).abs()).max(5000.0);
        for k in [y as f64 - m, y as f64, y as f64 + m] {
            candidates.push(k.floor() as i64);
            candidates.push(k.ceil() as i64);
        }
    }
    const GRID: i64 = 1000;
    for i in 0..=GRID {
        candidates.push(lo + ((hi - lo) as i128 * i as i128 / GRID as i128) as i64);
    }
    candidates.sort_unstable();
    candidates.dedup();
    let losses: Vec<f64> = candidates.iter().map(|&c| hinge_loss(targets, c)).collect();
    let best = losses.iter().copied().fold(f64::INFINITY, f64::min);
    let tol = 1e-9 * best.max(1.0);
    let at_best: Vec<i64> = candidates.iter().zip(&losses).filter(|(_, &l)| l <= best + tol).map(|(&c, _)| c).collect();
    let (a, b) = (at_best[0], at_best[at_best.len() - 1]);
    a + (b - a) / 2
}

/// Most frequent item by key; ties go to the smallest key.
fn mode<K: Ord + Clone, V: Clone>(items: impl IntoIterator<Item = (K, V)>) -> Option<V> {
    let mut counts: BTreeMap<K, (usize, V)> = BTreeMap::new();
    for (k, v) in items {
        counts.entry(k).or_insert((0, v)).0 += 1;
    }
    let top = counts.values().map(|(n, _)| *n).max()?;
    counts.into_values().find(|(n, _)| *n == top).map(|(_, v)| v)
}

pub fn fit_constant_baseline(train: &[&Case]) -> Result<ConstantBaselineParams, FitError> {
    if train.is_empty() {
        return Err(FitError::Empty);
    }
    // Truth scores keyed by their bit pattern, larger score first on ties.
    let truths = train.iter().filter_map(|c| c.expected.truth());
    let majority_truth = mode(truths.map(|t| (std::cmp::Reverse(t.to_bits()), t))).unwrap_or(1.0);
    let dollars: Vec<i64> = train
        .iter()
        .flat_map(|c| c.expected.iter())
        .filter_map(|(k, v)| match v {
            Value::Money(m) if k != TRUTH => Some(*m),
            _ => None,
        })
        .collect();
    let strings = train
        .iter()
        .flat_map(|c| c.expected.iter())
        .filter(|(k, v)| *k != TRUTH && !matches!(v, Value::Money(_)))
        .map(|(_, v)| (v.canonical(), v.clone()));
    Ok(ConstantBaselineParams { majority_truth, constant_dollars: fit_dollars(&dollars), majority_string: mode(strings) })
}

/// Answers every query with the fitted constants. Whether an argument is
/// a dollar amount is read from the type of its expected value.
#[derive(Debug, Clone)]
pub struct ConstantResolver {
    pub params: ConstantBaselineParams,
}

impl ConstantResolver {
    pub fn answer(&self, case: &Case, required: &[String]) -> ValueMap {
        let mut out = ValueMap::new();
        for arg in required {
            if arg == TRUTH {
                out.set_truth(self.params.majority_truth);
            } else if matches!(case.expected.get(arg), Some(Value::Money(_))) {
                out.insert(arg.clone(), Value::Money(self.params.constant_dollars)).expect("non-truth key");
            } else if let Some(s) = &self.params.majority_string {
                out.insert(arg.clone(), s.clone()).expect("non-truth key");
            }
        }
        out
    }
}

impl Resolver for ConstantResolver {
    fn name(&self) -> String {
        "constant".into()
    }

    fn resolve(&self, q: &Query<'_>) -> Result<Resolution, String> {
        Ok(self.answer(q.case, q.required).into())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn case(expected: &[(&str, Value)]) -> Case {
        Case {
            id: "c".into(),
            description: String::new(),
            query: "Tax".into(),
            inputs: ValueMap::new(),
            expected: ValueMap::from_pairs(expected.iter().cloned()).unwrap(),
            origin: None,
        }
    }

    fn brute_force_best(targets: &[i64]) -> f64 {
        let top = targets.iter().copied().max().unwrap_or(0);
        (0..=2 * top).map(|c| hinge_loss(targets, c)).fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn single_target_has_zero_hinge() {
        let c = fit_dollars(&[100]);
        assert_eq!(hinge_loss(&[100], c), 0.0);
        assert!((0..=5100).contains(&c), "{c}");
        // A brute scan agrees that the zero region is |100 - c| <= 5000.
        assert!((0..=10_000).all(|c| (hinge_loss(&[100], c) == 0.0) == ((100i64 - c).abs() <= 5000)));
    }

    #[test]
    fn fit_reads_the_three_constants() {
        let t = Value::TruthScore;
        let cases = [
            case(&[(TRUTH, t(1.0)), ("Tax", Value::Money(116066))]),
            case(&[(TRUTH, t(1.0)), ("Employee", Value::text("Bob"))]),
            case(&[(TRUTH, t(0.0)), ("Employee", Value::text("Bob")), ("Tax", Value::Money(9000))]),
            case(&[(TRUTH, t(1.0)), ("Spouse", Value::text("Alice"))]),
        ];
        let refs: Vec<&Case> = cases.iter().collect();
        let p = fit_constant_baseline(&refs).unwrap();
        assert_eq!(p.majority_truth, 1.0);
        assert_eq!(p.majority_string, Some(Value::text("Bob")));
        assert!(hinge_loss(&[116066, 9000], p.constant_dollars) <= brute_force_best(&[116066, 9000]) + 1e-9);
        assert_eq!(fit_constant_baseline(&[]), Err(FitError::Empty));

        let r = ConstantResolver { params: p.clone() };
        let target = case(&[("Tax", Value::Money(1)), ("Spouse", Value::text("x"))]);
        let ask = |a: &str| r.answer(&target, &[a.to_string()]);
        assert_eq!(ask(TRUTH).truth(), Some(1.0));
        assert_eq!(ask("Tax").get("Tax"), Some(&Value::Money(p.constant_dollars)));
        assert_eq!(ask("Spouse").get("Spouse"), Some(&Value::text("Bob")));
        // The description plays no part.
        let mut other = target.clone();
        other.description = "something else entirely".into();
        assert_eq!(r.answer(&other, &["Tax".into()]), ask("Tax"));
    }

    #[test]
    fn truth_ties_prefer_true() {
        let t = Value::TruthScore;
        let cases = [case(&[(TRUTH, t(0.0))]), case(&[(TRUTH, t(1.0))])];
        let p = fit_constant_baseline(&cases.iter().collect::<Vec<_>>()).unwrap();
        assert_eq!(p.majority_truth, 1.0);
        assert_eq!(p.constant_dollars, 0);
        assert_eq!(p.majority_string, None);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn dollars_match_brute_force(targets in prop::collection::vec(0i64..40_000, 1..=20)) {
            let c = fit_dollars(&targets);
            let best = brute_force_best(&targets);
            prop_assert!((hinge_loss(&targets, c) - best).abs() <= 1e-9 * best.max(1.0), "{} vs {}", hinge_loss(&targets, c), best);
        }
    }
}
