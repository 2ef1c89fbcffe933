use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{Corpus, Literal, Record, SplitSel};
use crate::model::Case;

/// Histogram and summary statistics of a list of counts. The standard
/// deviation is the population one and the median averages the two middle
/// values of an even-length list.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    pub counts: BTreeMap<usize, usize>,
    pub total: usize,
    pub mean: f64,
    pub stddev: f64,
    pub median: f64,
}

impl Distribution {
    pub fn of(values: &[usize]) -> Self {
        let mut counts = BTreeMap::new();
        for &v in values {
            *counts.entry(v).or_insert(0) += 1;
        }
        let n = values.len();
        if n == 0 {
            return Distribution { counts, total: 0, mean: 0.0, stddev: 0.0, median: 0.0 };
        }
        let mean = values.iter().sum::<usize>() as f64 / n as f64;
        let var = values.iter().map(|&v| (v as f64 - mean).powi(2)).sum::<f64>() / n as f64;
        let mut sorted = values.to_vec();
        sorted.sort_unstable();
        let median = if n % 2 == 1 {
            sorted[n / 2] as f64
        } else {
            (sorted[n / 2 - 1] + sorted[n / 2]) as f64 / 2.0
        };
        Distribution { counts, total: n, mean, stddev: var.sqrt(), median }
    }

    pub fn count(&self, v: usize) -> usize {
        self.counts.get(&v).copied().unwrap_or(0)
    }

    /// Sum of all observed values.
    pub fn sum(&self) -> usize {
        self.counts.iter().map(|(v, c)| v * c).sum()
    }

    fn max_value(&self) -> usize {
        self.counts.keys().next_back().copied().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitColumns {
    pub train: Distribution,
    pub test: Distribution,
    pub all: Distribution,
    pub silver: Distribution,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusStatistics {
    pub sections: usize,
    /// Placeholder spans per subsection.
    pub placeholders: Distribution,
    /// Arguments (coreference clusters) per subsection.
    pub arguments: Distribution,
    /// Mentions per argument.
    pub mentions: Distribution,
    /// Parameters per structure rule.
    pub rule_arguments: Distribution,
    /// Subsection references per structure rule.
    pub rule_dependencies: Distribution,
    /// Input argument-value pairs per case.
    pub inputs: SplitColumns,
    /// Expected argument-value pairs per case, `@truth` included.
    pub outputs: SplitColumns,
}

fn columns(corpus: &Corpus, f: impl Fn(&Case) -> usize) -> SplitColumns {
    let of = |cases: Vec<&Case>| Distribution::of(&cases.into_iter().map(&f).collect::<Vec<_>>());
    SplitColumns {
        train: of(corpus.cases_in(SplitSel::Train)),
        test: of(corpus.cases_in(SplitSel::Test)),
        all: of(corpus.cases_in(SplitSel::All)),
        silver: of(corpus.silver.iter().collect()),
    }
}

pub fn corpus_statistics(corpus: &Corpus) -> CorpusStatistics {
    let layers = &corpus.layers;
    let rules: Vec<_> = corpus.program.rules().collect();
    CorpusStatistics {
        sections: corpus.section_count(),
        placeholders: Distribution::of(&layers.iter().map(|l| l.spans.len()).collect::<Vec<_>>()),
        arguments: Distribution::of(&layers.iter().map(|l| l.partition.cluster_count()).collect::<Vec<_>>()),
        mentions: Distribution::of(
            &layers.iter().flat_map(|l| l.partition.clusters().iter().map(Vec::len)).collect::<Vec<_>>(),
        ),
        rule_arguments: Distribution::of(&rules.iter().map(|r| r.params.len()).collect::<Vec<_>>()),
        rule_dependencies: Distribution::of(&rules.iter().map(|r| r.dependency_count()).collect::<Vec<_>>()),
        inputs: columns(corpus, |c| c.inputs.len()),
        outputs: columns(corpus, |c| c.expected.len()),
    }
}

fn table(out: &mut String, title: &str, from: usize, cols: &[(&str, &Distribution)]) {
    let _ = writeln!(out, "{title}");
    let _ = write!(out, "{:<10}", "count");
    for (name, _) in cols {
        let _ = write!(out, "{name:>10}");
    }
    out.push('\n');
    let top = cols.iter().map(|(_, d)| d.max_value()).max().unwrap_or(0).max(from);
    for v in from..=top {
        let _ = write!(out, "{v:<10}");
        for (_, d) in cols {
            let _ = write!(out, "{:>10}", d.count(v));
        }
        out.push('\n');
    }
    let rows: [(&str, fn(&Distribution) -> String); 4] = [
        ("total", |d| d.total.to_string()),
        ("average", |d| format!("{:.1}", d.mean)),
        ("stddev", |d| format!("{:.1}", d.stddev)),
        ("median", |d| format!("{}", d.median)),
    ];
    for (label, f) in rows {
        let _ = write!(out, "{label:<10}");
        for (_, d) in cols {
            let _ = write!(out, "{:>10}", f(d));
        }
        out.push('\n');
    }
    out.push('\n');
}

impl CorpusStatistics {
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "sections: {}\n", self.sections);
        table(&mut out, "Placeholders per subsection", 0, &[("subsecs", &self.placeholders)]);
        table(&mut out, "Arguments per subsection", 0, &[("subsecs", &self.arguments)]);
        table(&mut out, "Mentions per argument", 1, &[("args", &self.mentions)]);
        table(
            &mut out,
            "Structure annotations per rule",
            0,
            &[("args", &self.rule_arguments), ("deps", &self.rule_dependencies)],
        );
        for (title, c, from) in [
            ("Input argument-value pairs per case", &self.inputs, 0),
            ("Output argument-value pairs per case", &self.outputs, 1),
        ] {
            table(
                &mut out,
                title,
                from,
                &[("train", &c.train), ("test", &c.test), ("all", &c.all), ("silver", &c.silver)],
            );
        }
        out
    }

    /// One record per distribution, for machine consumption.
    pub fn records(&self) -> Vec<Record> {
        let rec = |id: &str, d: &Distribution| {
            Record::new(id)
                .with(
                    "counts",
                    Literal::Map(d.counts.iter().map(|(k, v)| (k.to_string(), Literal::Int(*v as i64))).collect()),
                )
                .with("total", Literal::Int(d.total as i64))
                .with("mean", Literal::Float(d.mean))
                .with("stddev", Literal::Float(d.stddev))
                .with("median", Literal::Float(d.median))
        };
        let mut out = vec![
            Record::new("sections").with("count", Literal::Int(self.sections as i64)),
            rec("placeholders", &self.placeholders),
            rec("arguments", &self.arguments),
            rec("mentions", &self.mentions),
            rec("rule_arguments", &self.rule_arguments),
            rec("rule_dependencies", &self.rule_dependencies),
        ];
        for (name, c) in [("inputs", &self.inputs), ("outputs", &self.outputs)] {
            for (col, d) in [("train", &c.train), ("test", &c.test), ("all", &c.all), ("silver", &c.silver)] {
                out.push(rec(&format!("{name}.{col}"), d));
            }
        }
        out
    }
}
