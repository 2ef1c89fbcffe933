//! `sara`: corpus validation, statistics and evaluation runs.
//!
//! Exit status is 0 on success, 1 when the corpus fails validation or a
//! report misses a configured floor, and 2 on any other error.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use sara_core::baselines::{
    fit_constant_baseline, heuristic_argument_id, single_mention_coref, string_match_coref, ConstantResolver,
    HeuristicResolver,
};
use sara_core::engine::{evaluate_run, prediction_records, EngineConfig, OracleResolver, Resolver};
use sara_core::io::{
    corpus_statistics, import_jsonl, load_corpus, load_coref_predictions, load_span_predictions, validate_corpus,
    write_records, Corpus, Diagnostic, ImportKind, Manifest, Record, SplitSel,
};
use sara_core::metrics::{cascade_report, check_floors, coref_report, parse_floor, span_report, MetricReport};
use sara_core::{Partition, Span};

#[derive(Parser)]
#[command(name = "sara", version, about = "Statutory reasoning corpus tools and evaluation runs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Corpus manifest file.
    #[arg(long)]
    manifest: PathBuf,
    /// Directory for the text report and record files.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Minimum value of a report cell, as ROW:COLUMN=MIN (rates in percent).
    #[arg(long = "floor", value_name = "ROW:COLUMN=MIN")]
    floors: Vec<String>,
    /// Worker threads; defaults to one per core.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SplitArg {
    Train,
    Test,
    All,
}

impl From<SplitArg> for SplitSel {
    fn from(s: SplitArg) -> Self {
        match s {
            SplitArg::Train => SplitSel::Train,
            SplitArg::Test => SplitSel::Test,
            SplitArg::All => SplitSel::All,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CorefArg {
    Single,
    String,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Spans,
    Coref,
    Cases,
    Split,
}

#[derive(Subcommand)]
enum Command {
    /// Load the corpus and report every problem found.
    Validate {
        #[arg(long)]
        manifest: PathBuf,
    },
    /// Corpus statistics tables.
    Stats(Common),
    /// Score a coreference baseline or imported partitions against gold.
    EvalCoref {
        #[command(flatten)]
        common: Common,
        /// single, string or import:PATH.
        #[arg(long, default_value = "string")]
        baseline: String,
        /// Same as --baseline import:PATH.
        #[arg(long)]
        import: Option<PathBuf>,
    },
    /// Score placeholder spans against gold.
    EvalArgid {
        #[command(flatten)]
        common: Common,
        /// heuristic or import:PATH.
        #[arg(long, default_value = "heuristic")]
        source: String,
        #[arg(long)]
        import: Option<PathBuf>,
    },
    /// Coreference over predicted spans, scored against gold clusters.
    Cascade {
        #[command(flatten)]
        common: Common,
        /// gold, heuristic or import:PATH.
        #[arg(long, default_value = "heuristic")]
        source: String,
        #[arg(long)]
        import: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "string")]
        coref: CorefArg,
    },
    /// Run argument instantiation over the cases of a split and score it.
    EvalInstantiation {
        #[command(flatten)]
        common: Common,
        /// oracle, heuristic or constant.
        #[arg(long, default_value = "constant")]
        resolver: String,
        #[arg(long, value_enum, default_value = "test")]
        split: SplitArg,
        #[arg(long, default_value_t = 3)]
        depth_cap: usize,
        #[arg(long, default_value_t = 0.5)]
        threshold: f64,
        /// Resolve the queried subsection alone.
        #[arg(long)]
        no_structure: bool,
        /// Ground later predictions on gold values.
        #[arg(long)]
        insert_gold: bool,
        /// Fit the constant baseline on gold training cases only.
        #[arg(long)]
        no_silver: bool,
    },
    /// Convert a JSON-lines dump into a canonical record file.
    Import {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        input: PathBuf,
        /// Output file; standard output if absent.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

enum Failure {
    /// Corpus diagnostics or missed floors.
    Check(Vec<String>),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

fn diagnostics(ds: Vec<Diagnostic>) -> Failure {
    Failure::Check(ds.iter().map(ToString::to_string).collect())
}

fn load(manifest: &Path) -> Result<Corpus, Failure> {
    let m = Manifest::load(manifest).map_err(diagnostics)?;
    let corpus = load_corpus(&m).map_err(diagnostics)?;
    let problems = validate_corpus(&corpus);
    if !problems.is_empty() {
        return Err(diagnostics(problems));
    }
    Ok(corpus)
}

/// `import:PATH` or the `--import` flag.
fn import_path(source: &str, flag: &Option<PathBuf>) -> Option<PathBuf> {
    flag.clone().or_else(|| source.strip_prefix("import:").map(PathBuf::from))
}

fn set_jobs(jobs: Option<usize>) -> anyhow::Result<()> {
    if let Some(n) = jobs {
        rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global().context("configuring worker threads")?;
    }
    Ok(())
}

fn write_outputs(out: &Option<PathBuf>, files: &[(&str, String)]) -> anyhow::Result<()> {
    if let Some(dir) = out {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        for (name, body) in files {
            let path = dir.join(name);
            fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
        }
    }
    Ok(())
}

/// Prints and saves a report, then applies the floors.
fn emit(report: MetricReport, common: &Common, extra: Vec<(&str, Vec<Record>)>) -> Result<(), Failure> {
    let report = report.config("manifest", common.manifest.display());
    let text = report.render();
    print!("{text}");
    let mut files = vec![("report.txt", text), ("report.records", write_records(&report.records()))];
    for (name, recs) in extra {
        files.push((name, write_records(&recs)));
    }
    write_outputs(&common.out, &files)?;
    let floors = common.floors.iter().map(|f| parse_floor(f)).collect::<Result<Vec<_>, _>>().map_err(anyhow::Error::msg)?;
    let missed = check_floors(&report, &floors);
    if missed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(missed))
    }
}

fn text_of<'a>(corpus: &'a Corpus, id: &str) -> &'a str {
    corpus.subsection(id).map_or("", |s| s.text.as_str())
}

fn eval_coref(common: &Common, baseline: &str, import: &Option<PathBuf>) -> Result<(), Failure> {
    let corpus = load(&common.manifest)?;
    let (name, preds): (String, Vec<Partition>) = match (import_path(baseline, import), baseline) {
        (Some(path), _) => {
            let map = load_coref_predictions(&path, &corpus.layers).map_err(diagnostics)?;
            let preds = corpus
                .layers
                .iter()
                .map(|l| map.get(&l.subsection_id).cloned().unwrap_or_else(|| single_mention_coref(&l.spans)))
                .collect();
            (format!("import:{}", path.display()), preds)
        }
        (None, "single") => ("single".into(), corpus.layers.iter().map(|l| single_mention_coref(&l.spans)).collect()),
        (None, "string") => (
            "string".into(),
            corpus.layers.iter().map(|l| string_match_coref(&l.spans, text_of(&corpus, &l.subsection_id))).collect(),
        ),
        (None, other) => return Err(anyhow::anyhow!("unknown baseline {other:?}; use single, string or import:PATH").into()),
    };
    let items: Vec<(&Partition, &Partition)> = corpus.layers.iter().map(|l| &l.partition).zip(&preds).collect();
    let report = coref_report(&items).map_err(anyhow::Error::from)?.config("baseline", name).config("corpus", corpus.hash());
    emit(report, common, vec![])
}

fn predicted_spans(corpus: &Corpus, source: &str, import: &Option<PathBuf>) -> Result<(String, Vec<Vec<Span>>), Failure> {
    Ok(match (import_path(source, import), source) {
        (Some(path), _) => {
            let mut map = load_span_predictions(&path, &corpus.subsections).map_err(diagnostics)?;
            let spans = corpus.layers.iter().map(|l| map.remove(&l.subsection_id).unwrap_or_default()).collect();
            (format!("import:{}", path.display()), spans)
        }
        (None, "heuristic") => (
            "heuristic".into(),
            corpus.layers.iter().map(|l| heuristic_argument_id(text_of(corpus, &l.subsection_id))).collect(),
        ),
        (None, "gold") => ("gold".into(), corpus.layers.iter().map(|l| l.spans.clone()).collect()),
        (None, other) => return Err(anyhow::anyhow!("unknown span source {other:?}").into()),
    })
}

fn eval_argid(common: &Common, source: &str, import: &Option<PathBuf>) -> Result<(), Failure> {
    let corpus = load(&common.manifest)?;
    let (name, preds) = predicted_spans(&corpus, source, import)?;
    let items: Vec<(&[Span], &[Span])> = corpus.layers.iter().map(|l| l.spans.as_slice()).zip(preds.iter().map(Vec::as_slice)).collect();
    emit(span_report(&items).config("source", name).config("corpus", corpus.hash()), common, vec![])
}

fn cascade(common: &Common, source: &str, import: &Option<PathBuf>, coref: CorefArg) -> Result<(), Failure> {
    let corpus = load(&common.manifest)?;
    let (name, preds) = predicted_spans(&corpus, source, import)?;
    let items: Vec<_> = corpus
        .layers
        .iter()
        .zip(&preds)
        .map(|(l, spans)| {
            let p = match coref {
                CorefArg::Single => single_mention_coref(spans),
                CorefArg::String => string_match_coref(spans, text_of(&corpus, &l.subsection_id)),
            };
            let pred: BTreeSet<BTreeSet<Span>> =
                p.clusters().iter().map(|c| c.iter().map(|&i| spans[i]).collect()).collect();
            (l.span_clusters(), pred)
        })
        .collect();
    let coref_name = match coref {
        CorefArg::Single => "single",
        CorefArg::String => "string",
    };
    let report = cascade_report(&items).config("source", name).config("coref", coref_name).config("corpus", corpus.hash());
    emit(report, common, vec![])
}

#[allow(clippy::too_many_arguments)]
fn eval_instantiation(
    common: &Common,
    resolver: &str,
    split: SplitArg,
    depth_cap: usize,
    threshold: f64,
    no_structure: bool,
    insert_gold: bool,
    no_silver: bool,
) -> Result<(), Failure> {
    let corpus = load(&common.manifest)?;
    let config = EngineConfig { depth_cap: if no_structure { 1 } else { depth_cap }, truth_threshold: threshold, insert_gold };
    config.check().map_err(anyhow::Error::from)?;
    let mut constant = None;
    let r: &dyn Resolver = match resolver {
        "oracle" => &OracleResolver,
        "heuristic" => &HeuristicResolver,
        "constant" => {
            let mut train = corpus.cases_in(SplitSel::Train);
            if !no_silver {
                train.extend(corpus.silver.iter());
            }
            let params = fit_constant_baseline(&train).context("fitting the constant baseline on the training split")?;
            &*constant.insert(ConstantResolver { params })
        }
        other => return Err(anyhow::anyhow!("unknown resolver {other:?}; use oracle, heuristic or constant").into()),
    };
    let run = evaluate_run(r, &corpus, split.into(), &config);
    let mut report = run.report.config("structure", !no_structure);
    if let Some(c) = &constant {
        report = report
            .config("majority_truth", c.params.majority_truth)
            .config("constant_dollars", c.params.constant_dollars)
            .config("majority_string", c.params.majority_string.as_ref().map_or("-".into(), |v| v.surface()));
        report = report.config("silver", !no_silver && !corpus.silver.is_empty());
    }
    let preds = prediction_records(&report, &run.outcomes);
    emit(report, common, vec![("predictions.records", preds)])
}

fn stats(common: &Common) -> Result<(), Failure> {
    let corpus = load(&common.manifest)?;
    let s = corpus_statistics(&corpus);
    let text = s.render();
    print!("{text}");
    write_outputs(&common.out, &[("stats.txt", text), ("stats.records", write_records(&s.records()))])?;
    Ok(())
}

fn import(kind: KindArg, input: &Path, output: &Option<PathBuf>) -> Result<(), Failure> {
    let text = fs::read_to_string(input).with_context(|| format!("reading {}", input.display()))?;
    let kind = match kind {
        KindArg::Spans => ImportKind::Spans,
        KindArg::Coref => ImportKind::Coref,
        KindArg::Cases => ImportKind::Cases,
        KindArg::Split => ImportKind::Split,
    };
    let report = import_jsonl(kind, &text);
    for (line, reason) in &report.skipped {
        eprintln!("{}:{line}: skipped: {reason}", input.display());
    }
    let body = write_records(&report.records);
    match output {
        Some(p) => fs::write(p, body).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{body}"),
    }
    eprintln!("{} record(s) imported, {} skipped", report.records.len(), report.skipped.len());
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Validate { manifest } => {
            let corpus = load(manifest)?;
            println!(
                "ok: {} subsections, {} rules, {} cases, {} silver cases",
                corpus.subsections.len(),
                corpus.program.len(),
                corpus.cases.len(),
                corpus.silver.len()
            );
            Ok(())
        }
        Command::Stats(common) => {
            set_jobs(common.jobs)?;
            stats(common)
        }
        Command::EvalCoref { common, baseline, import } => {
            set_jobs(common.jobs)?;
            eval_coref(common, baseline, import)
        }
        Command::EvalArgid { common, source, import } => {
            set_jobs(common.jobs)?;
            eval_argid(common, source, import)
        }
        Command::Cascade { common, source, import, coref } => {
            set_jobs(common.jobs)?;
            cascade(common, source, import, *coref)
        }
        Command::EvalInstantiation { common, resolver, split, depth_cap, threshold, no_structure, insert_gold, no_silver } => {
            set_jobs(common.jobs)?;
            eval_instantiation(common, resolver, *split, *depth_cap, *threshold, *no_structure, *insert_gold, *no_silver)
        }
        Command::Import { kind, input, output } => import(*kind, input, output),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msgs)) => {
            for m in msgs {
                eprintln!("{m}");
            }
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
