//! Cluster-level scores between a gold and a predicted partition of the
//! same mentions.
//!
//! Every metric is computed from numerator/denominator counts so that
//! corpus-level scores can pool counts across subsections. A ratio with a
//! zero denominator is 1 when the numerator side is also empty on both
//! partitions (nothing to find, nothing found) and 0 otherwise.

use std::collections::BTreeSet;

use thiserror::Error;

use super::Prf;
use crate::model::Partition;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricError {
    #[error("gold has {gold} mentions but prediction has {pred}")]
    MentionMismatch { gold: usize, pred: usize },
}

fn same_mentions(gold: &Partition, pred: &Partition) -> Result<(), MetricError> {
    if gold.mention_count() != pred.mention_count() {
        return Err(MetricError::MentionMismatch { gold: gold.mention_count(), pred: pred.mention_count() });
    }
    Ok(())
}

/// Precision and recall as fractions, poolable by summing.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Counts {
    pub p_num: f64,
    pub p_den: f64,
    pub r_num: f64,
    pub r_den: f64,
}

impl Counts {
    pub fn prf(&self) -> Prf {
        let ratio = |num: f64, den: f64, other_den: f64| {
            if den > 0.0 {
                num / den
            } else if other_den == 0.0 {
                1.0
            } else {
                0.0
            }
        };
        Prf::new(ratio(self.p_num, self.p_den, self.r_den), ratio(self.r_num, self.r_den, self.p_den))
    }
}

impl std::ops::Add for Counts {
    type Output = Counts;
    fn add(self, o: Counts) -> Counts {
        Counts {
            p_num: self.p_num + o.p_num,
            p_den: self.p_den + o.p_den,
            r_num: self.r_num + o.r_num,
            r_den: self.r_den + o.r_den,
        }
    }
}

impl std::iter::Sum for Counts {
    fn sum<I: Iterator<Item = Counts>>(iter: I) -> Counts {
        iter.fold(Counts::default(), |a, b| a + b)
    }
}

/// A predicted cluster counts only if it equals a gold cluster as a set.
pub fn exact_match_counts(gold: &Partition, pred: &Partition) -> Result<Counts, MetricError> {
    same_mentions(gold, pred)?;
    let g = gold.cluster_sets();
    let correct = pred.cluster_sets().intersection(&g).count() as f64;
    Ok(Counts {
        p_num: correct,
        p_den: pred.cluster_count() as f64,
        r_num: correct,
        r_den: gold.cluster_count() as f64,
    })
}

pub fn exact_match_coref(gold: &Partition, pred: &Partition) -> Result<Prf, MetricError> {
    exact_match_counts(gold, pred).map(|c| c.prf())
}

/// Link-based MUC: for each key cluster K, |K| minus the number of
/// response clusters K is split into, over |K| - 1.
pub fn muc_counts(gold: &Partition, pred: &Partition) -> Result<Counts, MetricError> {
    same_mentions(gold, pred)?;
    let side = |key: &Partition, response: &Partition| {
        let labels = response.labels();
        let mut num = 0.0;
        let mut den = 0.0;
        for k in key.clusters() {
            let parts: BTreeSet<usize> = k.iter().map(|&m| labels[m]).collect();
            num += (k.len() - parts.len()) as f64;
            den += (k.len() - 1) as f64;
        }
        (num, den)
    };
    let (r_num, r_den) = side(gold, pred);
    let (p_num, p_den) = side(pred, gold);
    Ok(Counts { p_num, p_den, r_num, r_den })
}

pub fn muc(gold: &Partition, pred: &Partition) -> Result<Prf, MetricError> {
    muc_counts(gold, pred).map(|c| c.prf())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ceaf {
    /// Similarity |K ∩ R|; normalized by mention counts.
    Mention,
    /// Similarity 2|K ∩ R| / (|K| + |R|); normalized by cluster counts.
    Entity,
}

fn overlap(a: &[usize], b: &[usize]) -> usize {
    // Cluster members are sorted.
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// Pairwise similarity between gold clusters (rows) and predicted
/// clusters (columns).
pub fn ceaf_similarity(gold: &Partition, pred: &Partition, kind: Ceaf) -> Vec<Vec<f64>> {
    gold.clusters()
        .iter()
        .map(|k| {
            pred.clusters()
                .iter()
                .map(|r| {
                    let o = overlap(k, r) as f64;
                    match kind {
                        Ceaf::Mention => o,
                        Ceaf::Entity => 2.0 * o / (k.len() + r.len()) as f64,
                    }
                })
                .collect()
        })
        .collect()
}

pub fn ceaf_counts(gold: &Partition, pred: &Partition, kind: Ceaf) -> Result<Counts, MetricError> {
    same_mentions(gold, pred)?;
    let sim = ceaf_similarity(gold, pred, kind);
    let best = max_weight_matching(&sim).1;
    let (p_den, r_den) = match kind {
        Ceaf::Mention => (pred.mention_count() as f64, gold.mention_count() as f64),
        Ceaf::Entity => (pred.cluster_count() as f64, gold.cluster_count() as f64),
    };
    Ok(Counts { p_num: best, p_den, r_num: best, r_den })
}

pub fn ceaf_m(gold: &Partition, pred: &Partition) -> Result<Prf, MetricError> {
    ceaf_counts(gold, pred, Ceaf::Mention).map(|c| c.prf())
}

pub fn ceaf_e(gold: &Partition, pred: &Partition) -> Result<Prf, MetricError> {
    ceaf_counts(gold, pred, Ceaf::Entity).map(|c| c.prf())
}

/// Link counts for BLANC: coreference links and non-coreference links,
/// each as (shared, gold, predicted).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BlancCounts {
    pub coref: (f64, f64, f64),
    pub non_coref: (f64, f64, f64),
}

impl std::ops::Add for BlancCounts {
    type Output = BlancCounts;
    fn add(self, o: BlancCounts) -> BlancCounts {
        let add = |a: (f64, f64, f64), b: (f64, f64, f64)| (a.0 + b.0, a.1 + b.1, a.2 + b.2);
        BlancCounts { coref: add(self.coref, o.coref), non_coref: add(self.non_coref, o.non_coref) }
    }
}

impl std::iter::Sum for BlancCounts {
    fn sum<I: Iterator<Item = BlancCounts>>(iter: I) -> BlancCounts {
        iter.fold(BlancCounts::default(), |a, b| a + b)
    }
}

impl BlancCounts {
    /// Averages the coreference and non-coreference scores. When neither
    /// partition has links of one type, that type is left out and the
    /// other type's scores are used alone.
    pub fn prf(&self) -> Prf {
        let part = |(shared, g, p): (f64, f64, f64)| {
            Counts { p_num: shared, p_den: p, r_num: shared, r_den: g }.prf()
        };
        let c = part(self.coref);
        let n = part(self.non_coref);
        let no_coref = self.coref.1 == 0.0 && self.coref.2 == 0.0;
        let no_non = self.non_coref.1 == 0.0 && self.non_coref.2 == 0.0;
        match (no_coref, no_non) {
            (true, true) => Prf::new(1.0, 1.0),
            (true, false) => n,
            (false, true) => c,
            (false, false) => Prf {
                precision: (c.precision + n.precision) / 2.0,
                recall: (c.recall + n.recall) / 2.0,
                f1: (c.f1 + n.f1) / 2.0,
            },
        }
    }
}

pub fn blanc_counts(gold: &Partition, pred: &Partition) -> Result<BlancCounts, MetricError> {
    same_mentions(gold, pred)?;
    let (gl, pl) = (gold.labels(), pred.labels());
    let mut c = BlancCounts::default();
    let n = gl.len();
    for i in 0..n {
        for j in i + 1..n {
            let g = gl[i] == gl[j];
            let p = pl[i] == pl[j];
            let bucket = |b: &mut (f64, f64, f64), in_g: bool, in_p: bool| {
                if in_g {
                    b.1 += 1.0;
                }
                if in_p {
                    b.2 += 1.0;
                }
                if in_g && in_p {
                    b.0 += 1.0;
                }
            };
            bucket(&mut c.coref, g, p);
            bucket(&mut c.non_coref, !g, !p);
        }
    }
    Ok(c)
}

pub fn blanc(gold: &Partition, pred: &Partition) -> Result<Prf, MetricError> {
    blanc_counts(gold, pred).map(|c| c.prf())
}

/// Maximum-weight one-to-one assignment between rows and columns of a
/// non-negative weight matrix (Hungarian method, O(n³)). Returns the
/// column assigned to each row, if any, and the total weight.
pub fn max_weight_matching(weights: &[Vec<f64>]) -> (Vec<Option<usize>>, f64) {
    let rows = weights.len();
    let cols = weights.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 {
        return (vec![None; rows], 0.0);
    }
    // Square cost matrix for minimization; padding cells cost nothing.
    let n = rows.max(cols);
    let top = weights.iter().flatten().copied().fold(0.0, f64::max);
    let cost = |i: usize, j: usize| if i < rows && j < cols { top - weights[i][j] } else { top };
    // Potentials and matching, 1-based with column 0 as the sentinel.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut row_of = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        row_of[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![None; rows];
    let mut total = 0.0;
    for j in 1..=n {
        let i = row_of[j];
        if i >= 1 && i <= rows && j <= cols {
            assignment[i - 1] = Some(j - 1);
            total += weights[i - 1][j - 1];
        }
    }
    (assignment, total)
}
