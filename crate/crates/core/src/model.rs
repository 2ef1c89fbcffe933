//! Domain types shared by every other module: spans, subsections, argument
//! layers with their coreference partition, typed values, value maps and
//! cases. Nothing here does I/O.

use std::collections::BTreeSet;
use std::fmt;

use chrono::NaiveDate;
use indexmap::IndexMap;
use thiserror::Error;

/// Key of the distinguished applicability argument carried by every subsection.
pub const TRUTH: &str = "@truth";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("span [{start}, {end}) is empty or reversed")]
    EmptySpan { start: usize, end: usize },
    #[error("span [{start}, {end}) exceeds text of length {len}")]
    SpanOutOfRange { start: usize, end: usize, len: usize },
    #[error("span [{start}, {end}) covers only whitespace")]
    BlankSpan { start: usize, end: usize },
    #[error("mention index {index} out of range for {len} spans")]
    MentionOutOfRange { index: usize, len: usize },
    #[error("mention {0} appears in more than one cluster")]
    DuplicateMention(usize),
    #[error("mention {0} is not covered by any cluster")]
    UncoveredMention(usize),
    #[error("cluster {0} is empty")]
    EmptyCluster(usize),
    #[error("{names} cluster names given for {clusters} clusters")]
    NameCount { names: usize, clusters: usize },
    #[error("argument name {0:?} is used by two clusters")]
    DuplicateName(String),
    #[error("matrix is not square")]
    NotSquare,
    #[error("matrix is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("matrix diagonal entry {0} is zero")]
    ZeroDiagonal(usize),
    #[error("truth score {0} is outside [0, 1]")]
    TruthOutOfRange(f64),
    #[error("@truth must hold a truth score, got {0}")]
    TruthNotScore(String),
    #[error("list mixes {0} and {1} values")]
    MixedList(ValueKind, ValueKind),
}

/// Half-open character range `[start, end)` relative to a subsection's text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Result<Self, ModelError> {
        if start >= end {
            return Err(ModelError::EmptySpan { start, end });
        }
        Ok(Span { start, end })
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start >= self.end
    }

    pub fn overlaps(&self, other: &Span) -> bool {
        self.start < other.end && other.start < self.end
    }

    /// Text covered by the span; `None` when it runs past the end of `text`.
    pub fn slice<'t>(&self, text: &'t str) -> Option<&'t str> {
        let (a, b) = char_range_to_bytes(text, self.start, self.end)?;
        Some(&text[a..b])
    }

    /// Checks the span against the owning subsection text.
    pub fn check(&self, text: &str) -> Result<(), ModelError> {
        let len = text.chars().count();
        if self.end > len {
            return Err(ModelError::SpanOutOfRange { start: self.start, end: self.end, len });
        }
        match self.slice(text) {
            Some(s) if !s.trim().is_empty() => Ok(()),
            _ => Err(ModelError::BlankSpan { start: self.start, end: self.end }),
        }
    }
}

/// Converts a half-open character range to byte offsets.
pub fn char_range_to_bytes(text: &str, start: usize, end: usize) -> Option<(usize, usize)> {
    if start > end {
        return None;
    }
    let boundary = |n: usize| text.char_indices().map(|(b, _)| b).chain(std::iter::once(text.len())).nth(n);
    Some((boundary(start)?, boundary(end)?))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subsection {
    pub id: String,
    pub text: String,
    pub parent_id: Option<String>,
}

impl Subsection {
    /// Top-level section of an identifier: `§63(c)(5)` → `§63`.
    pub fn section_of(id: &str) -> &str {
        match id.find('(') {
            Some(i) => &id[..i],
            None => id,
        }
    }

    /// Identifier with its last parenthesized group removed, if any.
    pub fn enclosing_id(id: &str) -> Option<&str> {
        if !id.ends_with(')') {
            return None;
        }
        let open = id.rfind('(')?;
        if open == 0 {
            return None;
        }
        Some(&id[..open])
    }
}

/// Exact partition of mention indices `0..n` into clusters.
///
/// Stored canonically: members ascending inside each cluster, clusters ordered
/// by their first member. Two partitions are equal iff they group mentions the
/// same way.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Partition {
    clusters: Vec<Vec<usize>>,
    len: usize,
}

impl Partition {
    pub fn new(clusters: Vec<Vec<usize>>, len: usize) -> Result<Self, ModelError> {
        let mut seen = vec![false; len];
        for (ci, cluster) in clusters.iter().enumerate() {
            if cluster.is_empty() {
                return Err(ModelError::EmptyCluster(ci));
            }
            for &m in cluster {
                if m >= len {
                    return Err(ModelError::MentionOutOfRange { index: m, len });
                }
                if seen[m] {
                    return Err(ModelError::DuplicateMention(m));
                }
                seen[m] = true;
            }
        }
        if let Some(m) = seen.iter().position(|s| !s) {
            return Err(ModelError::UncoveredMention(m));
        }
        let mut clusters = clusters;
        for c in &mut clusters {
            c.sort_unstable();
        }
        clusters.sort_unstable_by_key(|c| c[0]);
        Ok(Partition { clusters, len })
    }

    pub fn singletons(len: usize) -> Self {
        Partition { clusters: (0..len).map(|i| vec![i]).collect(), len }
    }

    /// Builds a partition from cluster labels, one per mention.
    pub fn from_labels<L: Ord + Clone>(labels: &[L]) -> Self {
        let mut by_label: std::collections::BTreeMap<L, Vec<usize>> = Default::default();
        for (i, l) in labels.iter().enumerate() {
            by_label.entry(l.clone()).or_default().push(i);
        }
        Partition::new(by_label.into_values().collect(), labels.len())
            .expect("labels always induce a partition")
    }

    pub fn clusters(&self) -> &[Vec<usize>] {
        &self.clusters
    }

    /// Number of mentions partitioned.
    pub fn mention_count(&self) -> usize {
        self.len
    }

    pub fn cluster_count(&self) -> usize {
        self.clusters.len()
    }

    /// Cluster index of every mention.
    pub fn labels(&self) -> Vec<usize> {
        let mut labels = vec![0; self.len];
        for (ci, c) in self.clusters.iter().enumerate() {
            for &m in c {
                labels[m] = ci;
            }
        }
        labels
    }

    /// Clusters as sets, for set-level comparisons.
    pub fn cluster_sets(&self) -> BTreeSet<BTreeSet<usize>> {
        self.clusters.iter().map(|c| c.iter().copied().collect()).collect()
    }

    pub fn to_matrix(&self) -> Vec<Vec<u8>> {
        let labels = self.labels();
        (0..self.len)
            .map(|i| (0..self.len).map(|j| u8::from(labels[i] == labels[j])).collect())
            .collect()
    }

    /// Connected components of a symmetric matrix with unit diagonal.
    /// Non-transitive inputs are closed transitively.
    pub fn from_matrix(matrix: &[Vec<u8>]) -> Result<Self, ModelError> {
        let n = matrix.len();
        if matrix.iter().any(|row| row.len() != n) {
            return Err(ModelError::NotSquare);
        }
        for i in 0..n {
            if matrix[i][i] == 0 {
                return Err(ModelError::ZeroDiagonal(i));
            }
            for j in (i + 1)..n {
                if (matrix[i][j] != 0) != (matrix[j][i] != 0) {
                    return Err(ModelError::NotSymmetric(i, j));
                }
            }
        }
        let mut label: Vec<Option<usize>> = vec![None; n];
        let mut next = 0;
        for s in 0..n {
            if label[s].is_some() {
                continue;
            }
            let mut stack = vec![s];
            label[s] = Some(next);
            while let Some(i) = stack.pop() {
                for j in 0..n {
                    if matrix[i][j] != 0 && label[j].is_none() {
                        label[j] = Some(next);
                        stack.push(j);
                    }
                }
            }
            next += 1;
        }
        let labels: Vec<usize> = label.into_iter().map(|l| l.unwrap()).collect();
        Ok(Partition::from_labels(&labels))
    }
}

pub fn clusters_to_matrix(layer: &ArgumentLayer) -> Vec<Vec<u8>> {
    layer.partition.to_matrix()
}

pub fn matrix_to_clusters(matrix: &[Vec<u8>]) -> Result<Partition, ModelError> {
    Partition::from_matrix(matrix)
}

/// Placeholder spans of one subsection and their grouping into arguments.
///
/// `names[k]` is the structure-annotation parameter name of cluster `k`
/// (canonical cluster order), when the cluster is linked to one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArgumentLayer {
    pub subsection_id: String,
    pub spans: Vec<Span>,
    pub partition: Partition,
    pub names: Vec<Option<String>>,
}

impl ArgumentLayer {
    pub fn new(
        subsection_id: impl Into<String>,
        spans: Vec<Span>,
        clusters: Vec<Vec<usize>>,
        names: Vec<Option<String>>,
    ) -> Result<Self, ModelError> {
        if names.len() != clusters.len() {
            return Err(ModelError::NameCount { names: names.len(), clusters: clusters.len() });
        }
        let mut seen = BTreeSet::new();
        for name in names.iter().flatten() {
            if !seen.insert(name.clone()) {
                return Err(ModelError::DuplicateName(name.clone()));
            }
        }
        let mut paired: Vec<(Vec<usize>, Option<String>)> = clusters
            .into_iter()
            .map(|mut c| {
                c.sort_unstable();
                c
            })
            .zip(names)
            .collect();
        paired.sort_by_key(|(c, _)| c.first().copied().unwrap_or(usize::MAX));
        let (clusters, names): (Vec<_>, Vec<_>) = paired.into_iter().unzip();
        let partition = Partition::new(clusters, spans.len())?;
        Ok(ArgumentLayer { subsection_id: subsection_id.into(), spans, partition, names })
    }

    /// A layer whose every span is its own unnamed argument.
    pub fn unlinked(subsection_id: impl Into<String>, spans: Vec<Span>) -> Self {
        let n = spans.len();
        ArgumentLayer {
            subsection_id: subsection_id.into(),
            spans,
            partition: Partition::singletons(n),
            names: vec![None; n],
        }
    }

    pub fn with_partition(&self, partition: Partition) -> Self {
        let names = vec![None; partition.cluster_count()];
        ArgumentLayer { subsection_id: self.subsection_id.clone(), spans: self.spans.clone(), partition, names }
    }

    /// Named arguments in order of first mention, with their mention spans.
    pub fn arguments(&self) -> impl Iterator<Item = (&str, Vec<Span>)> + '_ {
        self.partition
            .clusters()
            .iter()
            .zip(&self.names)
            .filter_map(|(c, n)| n.as_deref().map(|n| (n, c.iter().map(|&i| self.spans[i]).collect())))
    }

    pub fn mentions_of(&self, name: &str) -> Vec<Span> {
        self.arguments().find(|(n, _)| *n == name).map(|(_, m)| m).unwrap_or_default()
    }

    /// Clusters as sets of spans rather than indices.
    pub fn span_clusters(&self) -> BTreeSet<BTreeSet<Span>> {
        self.partition
            .clusters()
            .iter()
            .map(|c| c.iter().map(|&i| self.spans[i]).collect())
            .collect()
    }

    pub fn check(&self, text: &str) -> Result<(), ModelError> {
        for s in &self.spans {
            s.check(text)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ValueKind {
    Text,
    Money,
    Number,
    Date,
    Truth,
    List,
}

impl fmt::Display for ValueKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ValueKind::Text => "text",
            ValueKind::Money => "money",
            ValueKind::Number => "number",
            ValueKind::Date => "date",
            ValueKind::Truth => "truth",
            ValueKind::List => "list",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Text(String),
    /// Whole dollars.
    Money(i64),
    Number(i64),
    Date(NaiveDate),
    /// Applicability score in `[0, 1]`.
    TruthScore(f64),
    List(Vec<Value>),
}

impl Value {
    pub fn text(s: impl Into<String>) -> Self {
        Value::Text(s.into())
    }

    pub fn truth(score: f64) -> Result<Self, ModelError> {
        if !(0.0..=1.0).contains(&score) {
            return Err(ModelError::TruthOutOfRange(score));
        }
        Ok(Value::TruthScore(score))
    }

    pub fn list(items: Vec<Value>) -> Result<Self, ModelError> {
        if let Some(first) = items.first() {
            let k = first.kind();
            if let Some(other) = items.iter().find(|v| v.kind() != k) {
                return Err(ModelError::MixedList(k, other.kind()));
            }
        }
        Ok(Value::List(items))
    }

    pub fn kind(&self) -> ValueKind {
        match self {
            Value::Text(_) => ValueKind::Text,
            Value::Money(_) => ValueKind::Money,
            Value::Number(_) => ValueKind::Number,
            Value::Date(_) => ValueKind::Date,
            Value::TruthScore(_) => ValueKind::Truth,
            Value::List(_) => ValueKind::List,
        }
    }

    pub fn as_truth(&self) -> Option<f64> {
        match self {
            Value::TruthScore(t) => Some(*t),
            _ => None,
        }
    }

    /// Form substituted into subsection text for a placeholder.
    pub fn surface(&self) -> String {
        match self {
            Value::Text(s) => s.clone(),
            Value::Money(m) => format!("${m}"),
            Value::Number(n) => n.to_string(),
            Value::Date(d) => d.format("%B %-d, %Y").to_string(),
            Value::TruthScore(t) => if *t >= 0.5 { "True" } else { "False" }.to_string(),
            Value::List(items) => items.iter().map(Value::surface).collect::<Vec<_>>().join(", "),
        }
    }

    /// Comparison key for exact-match scoring: whitespace collapsed, dates as
    /// ISO strings (also when written as text), lists as sorted multisets.
    pub fn canonical(&self) -> String {
        match self {
            Value::Text(s) => {
                let collapsed = s.split_whitespace().collect::<Vec<_>>().join(" ");
                match parse_date(&collapsed) {
                    Some(d) => d.format("%Y-%m-%d").to_string(),
                    None => collapsed,
                }
            }
            Value::Money(m) => m.to_string(),
            Value::Number(n) => n.to_string(),
            Value::Date(d) => d.format("%Y-%m-%d").to_string(),
            Value::TruthScore(t) => t.to_string(),
            Value::List(items) => {
                let mut keys: Vec<String> = items.iter().map(Value::canonical).collect();
                keys.sort();
                format!("[{}]", keys.join("\u{1f}"))
            }
        }
    }
}

/// Parses ISO `YYYY-MM-DD` or month-name dates such as `Feb 3rd, 2017`.
/// Dates without a year are not dates for this purpose.
pub fn parse_date(s: &str) -> Option<NaiveDate> {
    let s = s.trim();
    if let Ok(d) = NaiveDate::parse_from_str(s, "%Y-%m-%d") {
        return Some(d);
    }
    let cleaned: String = {
        let mut out = String::with_capacity(s.len());
        for word in s.split_whitespace() {
            let w = word.trim_end_matches(',');
            let w = if w.chars().next().is_some_and(|c| c.is_ascii_digit()) {
                w.trim_end_matches(|c: char| c.is_ascii_alphabetic())
            } else {
                w.trim_end_matches('.')
            };
            if !out.is_empty() {
                out.push(' ');
            }
            out.push_str(w);
        }
        out
    };
    for fmt in ["%b %d %Y", "%B %d %Y"] {
        if let Ok(d) = NaiveDate::parse_from_str(&cleaned, fmt) {
            return Some(d);
        }
    }
    None
}

/// Ordered argument-name → value bindings. Names are unique and `@truth`
/// only ever holds a truth score.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValueMap {
    entries: IndexMap<String, Value>,
}

impl ValueMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<K: Into<String>>(
        pairs: impl IntoIterator<Item = (K, Value)>,
    ) -> Result<Self, ModelError> {
        let mut map = ValueMap::new();
        for (k, v) in pairs {
            map.insert(k, v)?;
        }
        Ok(map)
    }

    /// Inserts or replaces a binding, returning the previous value.
    pub fn insert(&mut self, key: impl Into<String>, value: Value) -> Result<Option<Value>, ModelError> {
        let key = key.into();
        if key == TRUTH {
            match value {
                Value::TruthScore(t) if (0.0..=1.0).contains(&t) => {}
                Value::TruthScore(t) => return Err(ModelError::TruthOutOfRange(t)),
                other => return Err(ModelError::TruthNotScore(other.kind().to_string())),
            }
        }
        Ok(self.entries.insert(key, value))
    }

    /// Sets `@truth`, clamping into `[0, 1]`.
    pub fn set_truth(&mut self, score: f64) {
        let t = if score.is_nan() { 0.0 } else { score.clamp(0.0, 1.0) };
        self.entries.insert(TRUTH.to_string(), Value::TruthScore(t));
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.entries.get(key)
    }

    pub fn contains_key(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn remove(&mut self, key: &str) -> Option<Value> {
        self.entries.shift_remove(key)
    }

    pub fn truth(&self) -> Option<f64> {
        self.entries.get(TRUTH).and_then(Value::as_truth)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Value)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Copy without the `@truth` entry.
    pub fn without_truth(&self) -> ValueMap {
        ValueMap {
            entries: self.entries.iter().filter(|(k, _)| *k != TRUTH).map(|(k, v)| (k.clone(), v.clone())).collect(),
        }
    }
}

pub fn truth_of(values: &ValueMap) -> Option<f64> {
    values.truth()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseKind {
    Binary,
    Numerical,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Case {
    pub id: String,
    pub description: String,
    /// Section identifier of the subsection to apply.
    pub query: String,
    pub inputs: ValueMap,
    pub expected: ValueMap,
    /// For machine-generated annotations, the case they were derived from.
    pub origin: Option<String>,
}

impl Case {
    pub fn kind(&self) -> CaseKind {
        let numerical = self
            .expected
            .iter()
            .any(|(k, v)| k != TRUTH && matches!(v, Value::Money(_)));
        if numerical {
            CaseKind::Numerical
        } else {
            CaseKind::Binary
        }
    }

    /// Key shared by the positive and negative case of a pair, if the id
    /// carries a polarity suffix.
    pub fn pair_key(&self) -> Option<&str> {
        const SUFFIXES: [&str; 4] = ["-positive", "-negative", "_pos", "_neg"];
        SUFFIXES.iter().find_map(|s| self.id.strip_suffix(s))
    }

    /// Case whose gold annotations the oracle should consult.
    pub fn origin_id(&self) -> &str {
        self.origin.as_deref().unwrap_or(&self.id)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vm(pairs: &[(&str, Value)]) -> ValueMap {
        ValueMap::from_pairs(pairs.iter().cloned()).unwrap()
    }

    #[test]
    fn truth_of_reads_truth_entry() {
        let m = vm(&[(TRUTH, Value::TruthScore(1.0)), ("Tax", Value::Money(116066))]);
        assert_eq!(truth_of(&m), Some(1.0));
        assert_eq!(truth_of(&ValueMap::new()), None);
        assert_eq!(truth_of(&vm(&[(TRUTH, Value::TruthScore(0.0))])), Some(0.0));
    }

    #[test]
    fn truth_entry_must_be_a_score() {
        let mut m = ValueMap::new();
        assert!(m.insert(TRUTH, Value::text("yes")).is_err());
        assert!(m.insert(TRUTH, Value::TruthScore(1.5)).is_err());
        assert!(m.insert(TRUTH, Value::TruthScore(0.25)).is_ok());
    }

    #[test]
    fn clusters_to_matrix_examples() {
        let layer = ArgumentLayer::unlinked("x", vec![Span::new(0, 1).unwrap(), Span::new(2, 3).unwrap()]);
        assert_eq!(clusters_to_matrix(&layer), vec![vec![1, 0], vec![0, 1]]);

        let spans: Vec<Span> = (0..8).map(|i| Span::new(i * 2, i * 2 + 1).unwrap()).collect();
        let clusters = vec![vec![0, 3], vec![1], vec![2], vec![4], vec![5], vec![6], vec![7]];
        let layer = ArgumentLayer::new("§3306(a)(1)(B)", spans, clusters, vec![None; 7]).unwrap();
        let m = clusters_to_matrix(&layer);
        for i in 0..8 {
            for j in 0..8 {
                let linked = i == j || (i == 0 && j == 3) || (i == 3 && j == 0);
                assert_eq!(m[i][j], u8::from(linked), "({i},{j})");
            }
        }

        let one = ArgumentLayer::unlinked("x", vec![Span::new(0, 1).unwrap()]);
        assert_eq!(clusters_to_matrix(&one), vec![vec![1]]);
    }

    #[test]
    fn matrix_to_clusters_examples() {
        assert_eq!(matrix_to_clusters(&[vec![1, 0], vec![0, 1]]).unwrap().clusters(), &[vec![0], vec![1]]);
        assert_eq!(matrix_to_clusters(&[vec![1, 1], vec![1, 1]]).unwrap().clusters(), &[vec![0, 1]]);

        // 12-mention coreference matrix with clusters {0,5,8,9} and {6,10}.
        let rows = [
            "100001001100", "010000000000", "001000000000", "000100000000", "000010000000",
            "100001001100", "000000100010", "000000010000", "100001001100", "100001001100",
            "000000100010", "000000000001",
        ];
        let m: Vec<Vec<u8>> = rows.iter().map(|r| r.bytes().map(|b| b - b'0').collect()).collect();
        let p = matrix_to_clusters(&m).unwrap();
        let expected = Partition::new(
            vec![vec![0, 5, 8, 9], vec![6, 10], vec![1], vec![2], vec![3], vec![4], vec![7], vec![11]],
            12,
        )
        .unwrap();
        assert_eq!(p, expected);
    }

    #[test]
    fn matrix_to_clusters_rejects_bad_input() {
        assert_eq!(matrix_to_clusters(&[vec![1, 1], vec![0, 1]]), Err(ModelError::NotSymmetric(0, 1)));
        assert_eq!(matrix_to_clusters(&[vec![0]]), Err(ModelError::ZeroDiagonal(0)));
        assert_eq!(matrix_to_clusters(&[vec![1, 0]]), Err(ModelError::NotSquare));
    }

    #[test]
    fn matrix_to_clusters_closes_transitively() {
        let m = vec![vec![1, 1, 0], vec![1, 1, 1], vec![0, 1, 1]];
        assert_eq!(matrix_to_clusters(&m).unwrap().clusters(), &[vec![0, 1, 2]]);
    }

    #[test]
    fn partition_rejects_non_partitions() {
        assert_eq!(Partition::new(vec![vec![0], vec![0, 1]], 2), Err(ModelError::DuplicateMention(0)));
        assert_eq!(Partition::new(vec![vec![0]], 2), Err(ModelError::UncoveredMention(1)));
        assert_eq!(Partition::new(vec![vec![2]], 2), Err(ModelError::MentionOutOfRange { index: 2, len: 2 }));
        assert_eq!(Partition::new(vec![vec![0, 1], vec![]], 2), Err(ModelError::EmptyCluster(1)));
    }

    #[test]
    fn layer_names_follow_canonical_cluster_order() {
        let spans: Vec<Span> = (0..3).map(|i| Span::new(i * 3, i * 3 + 2).unwrap()).collect();
        let layer = ArgumentLayer::new(
            "s",
            spans,
            vec![vec![2], vec![1, 0]],
            vec![Some("B".into()), Some("A".into())],
        )
        .unwrap();
        let names: Vec<&str> = layer.arguments().map(|(n, _)| n).collect();
        assert_eq!(names, ["A", "B"]);
        assert_eq!(layer.mentions_of("A").len(), 2);
    }

    #[test]
    fn span_checks_against_text() {
        let text = "§1 the taxpayer";
        let s = Span::new(3, 15).unwrap();
        assert_eq!(s.slice(text), Some("the taxpayer"));
        assert!(s.check(text).is_ok());
        assert!(Span::new(3, 16).unwrap().check(text).is_err());
        assert!(Span::new(2, 3).unwrap().check(text).is_err());
        assert!(Span::new(4, 4).is_err());
    }

    #[test]
    fn case_kind_and_pairs() {
        let case = Case {
            id: "tax_case_5".into(),
            description: String::new(),
            query: "Tax".into(),
            inputs: ValueMap::new(),
            expected: vm(&[("Tax", Value::Money(116066)), (TRUTH, Value::TruthScore(1.0))]),
            origin: None,
        };
        assert_eq!(case.kind(), CaseKind::Numerical);
        assert_eq!(case.pair_key(), None);
        let pos = Case { id: "63(c)(5)-positive".into(), expected: vm(&[(TRUTH, Value::TruthScore(1.0))]), ..case };
        assert_eq!(pos.kind(), CaseKind::Binary);
        assert_eq!(pos.pair_key(), Some("63(c)(5)"));
    }

    #[test]
    fn dates_parse_in_both_styles() {
        let d = NaiveDate::from_ymd_opt(2017, 2, 3).unwrap();
        assert_eq!(parse_date("2017-02-03"), Some(d));
        assert_eq!(parse_date("Feb 3rd, 2017"), Some(d));
        assert_eq!(parse_date("February 3, 2017"), Some(d));
        assert_eq!(parse_date("Jan 24"), None);
        assert_eq!(Value::text("Feb 3rd, 2017").canonical(), Value::Date(d).canonical());
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        fn labels() -> impl Strategy<Value = Vec<u8>> {
            prop::collection::vec(0u8..6, 0..16)
        }

        proptest! {
            #[test]
            fn matrix_roundtrip(labels in labels()) {
                let p = Partition::from_labels(&labels);
                let m = p.to_matrix();
                let n = m.len();
                for i in 0..n {
                    prop_assert_eq!(m[i][i], 1);
                    for j in 0..n {
                        prop_assert_eq!(m[i][j], m[j][i]);
                        for k in 0..n {
                            if m[i][j] == 1 && m[j][k] == 1 {
                                prop_assert_eq!(m[i][k], 1);
                            }
                        }
                    }
                }
                prop_assert_eq!(Partition::from_matrix(&m).unwrap(), p);
            }
        }
    }
}
