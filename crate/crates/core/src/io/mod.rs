//! Corpus files: manifest, statutes, argument layers, structure, cases and
//! splits, all in the record format of [`record`] except the structure file.
//!
//! | manifest key | contents                                                  |
//! |--------------|-----------------------------------------------------------|
//! | `statutes`   | directory of statute texts plus `offsets.txt`             |
//! | `spans`      | `id spans=[[start, end], ...]` per subsection             |
//! | `coref`      | `id clusters=[[0, 3], [1], ...] names=["Taxp", "", ...]`  |
//! | `structure`  | Horn-clause rules                                         |
//! | `cases`      | directory of `*.cases` files                              |
//! | `split`      | `id split="train"` or `"test"` (optional)                 |
//! | `silver`     | directory of machine-generated `*.cases` files (optional) |
//!
//! Offsets and spans are 0-based, end-exclusive character offsets.

mod import;
pub mod record;
mod stats;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use regex::Regex;
use sha2::{Digest, Sha256};

pub use import::{import_jsonl, ImportKind, ImportReport};
pub use record::{parse_record, parse_records, write_records, Literal, Record, RecordError};
pub use stats::{corpus_statistics, CorpusStatistics, Distribution, SplitColumns};

use crate::model::{ArgumentLayer, Case, CaseKind, Partition, Span, Subsection, TRUTH};
use crate::structure::{check_references, parse_program, Program, ProgramErrorKind};
use record::{literal_to_value_map, value_map_to_literal};

/// A problem found while loading or validating, with its location when known.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub file: Option<PathBuf>,
    pub line: Option<usize>,
    pub message: String,
}

impl Diagnostic {
    pub fn new(message: impl Into<String>) -> Self {
        Diagnostic { file: None, line: None, message: message.into() }
    }

    pub fn at(file: &Path, line: Option<usize>, message: impl Into<String>) -> Self {
        Diagnostic { file: Some(file.to_path_buf()), line, message: message.into() }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.file, self.line) {
            (Some(p), Some(l)) => write!(f, "{}:{l}: {}", p.display(), self.message),
            (Some(p), None) => write!(f, "{}: {}", p.display(), self.message),
            _ => f.write_str(&self.message),
        }
    }
}

pub type Loaded<T> = Result<T, Vec<Diagnostic>>;

fn read(path: &Path) -> Loaded<String> {
    fs::read_to_string(path).map_err(|e| vec![Diagnostic::at(path, None, format!("cannot read: {e}"))])
}

fn records(path: &Path) -> Loaded<Vec<(usize, Record)>> {
    let text = read(path)?;
    parse_records(&text).map_err(|errs| {
        errs.into_iter().map(|e| Diagnostic::at(path, Some(e.line), format!("column {}: {}", e.column, e.message))).collect()
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Manifest {
    pub path: PathBuf,
    pub statutes: PathBuf,
    pub spans: PathBuf,
    pub coref: PathBuf,
    pub structure: PathBuf,
    pub cases: PathBuf,
    pub split: Option<PathBuf>,
    pub silver: Option<PathBuf>,
}

impl Manifest {
    /// Reads `key = value` lines; relative paths resolve against the
    /// manifest's directory.
    pub fn load(path: &Path) -> Loaded<Manifest> {
        let text = read(path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        let mut entries: BTreeMap<String, PathBuf> = BTreeMap::new();
        let mut errors = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                errors.push(Diagnostic::at(path, Some(i + 1), "expected key = value"));
                continue;
            };
            let k = k.trim().to_string();
            const KEYS: [&str; 7] = ["statutes", "spans", "coref", "structure", "cases", "split", "silver"];
            if !KEYS.contains(&k.as_str()) {
                errors.push(Diagnostic::at(path, Some(i + 1), format!("unknown key {k}")));
            } else if entries.insert(k.clone(), base.join(v.trim())).is_some() {
                errors.push(Diagnostic::at(path, Some(i + 1), format!("duplicate key {k}")));
            }
        }
        let mut take = |k: &str, required: bool| -> Option<PathBuf> {
            let p = entries.remove(k);
            match &p {
                None if required => errors.push(Diagnostic::at(path, None, format!("missing key {k}"))),
                Some(p) if !p.exists() => {
                    errors.push(Diagnostic::at(path, None, format!("{k}: {} does not exist", p.display())))
                }
                _ => {}
            }
            p
        };
        let m = (
            take("statutes", true),
            take("spans", true),
            take("coref", true),
            take("structure", true),
            take("cases", true),
            take("split", false),
            take("silver", false),
        );
        match m {
            (Some(statutes), Some(spans), Some(coref), Some(structure), Some(cases), split, silver)
                if errors.is_empty() =>
            {
                Ok(Manifest { path: path.to_path_buf(), statutes, spans, coref, structure, cases, split, silver })
            }
            _ => Err(errors),
        }
    }
}

fn section_id_pattern() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^§[0-9]+[A-Za-z]?(\([0-9A-Za-z]+\))*$").unwrap())
}

pub const OFFSETS_FILE: &str = "offsets.txt";

/// Subsections sliced out of the statute files in `dir` by `offsets.txt`.
/// Each subsection's parent is the nearest enclosing id that is also
/// listed.
pub fn load_statutes(dir: &Path) -> Loaded<Vec<Subsection>> {
    let index = dir.join(OFFSETS_FILE);
    if !index.exists() {
        let empty = fs::read_dir(dir).map(|mut d| d.next().is_none()).unwrap_or(false);
        return if empty {
            Ok(Vec::new())
        } else {
            Err(vec![Diagnostic::at(dir, None, format!("missing {OFFSETS_FILE}"))])
        };
    }
    let mut errors = Vec::new();
    let mut files: HashMap<String, Option<Vec<char>>> = HashMap::new();
    let mut out: Vec<Subsection> = Vec::new();
    let mut seen = BTreeSet::new();
    for (line, r) in records(&index)? {
        let mut err = |m: String| errors.push(Diagnostic::at(&index, Some(line), m));
        if !section_id_pattern().is_match(&r.id) {
            err(format!("malformed section id {:?}", r.id));
            continue;
        }
        if !seen.insert(r.id.clone()) {
            err(format!("duplicate subsection {}", r.id));
            continue;
        }
        let (Some(file), Some(start), Some(end)) = (
            r.get("file").and_then(Literal::as_str),
            r.get("start").and_then(Literal::as_usize),
            r.get("end").and_then(Literal::as_usize),
        ) else {
            err("expected file=\"...\" start=N end=N".into());
            continue;
        };
        let chars = files
            .entry(file.to_string())
            .or_insert_with(|| fs::read_to_string(dir.join(file)).ok().map(|t| t.chars().collect()));
        let Some(chars) = chars else {
            err(format!("cannot read statute file {file}"));
            continue;
        };
        if start >= end || end > chars.len() {
            err(format!("{}: offsets {start}..{end} out of bounds for {file} ({} characters)", r.id, chars.len()));
            continue;
        }
        out.push(Subsection { id: r.id, text: chars[start..end].iter().collect(), parent_id: None });
    }
    if !errors.is_empty() {
        return Err(errors);
    }
    let ids: BTreeSet<String> = out.iter().map(|s| s.id.clone()).collect();
    for s in &mut out {
        let mut cur = Subsection::enclosing_id(&s.id);
        while let Some(p) = cur {
            if ids.contains(p) {
                s.parent_id = Some(p.to_string());
                break;
            }
            cur = Subsection::enclosing_id(p);
        }
    }
    Ok(out)
}

fn parse_span_list(lit: Option<&Literal>) -> Result<Vec<(usize, usize)>, String> {
    let items = lit.and_then(Literal::as_list).ok_or("expected spans=[[start, end], ...]")?;
    items
        .iter()
        .map(|pair| match pair.as_list() {
            Some([a, b]) => a.as_usize().zip(b.as_usize()).ok_or_else(|| "span bounds must be integers".to_string()),
            _ => Err("each span is [start, end]".to_string()),
        })
        .collect()
}

/// Sorted spans of one subsection, with `order[k]` the file position of
/// the k-th sorted span.
fn checked_spans(id: &str, raw: &[(usize, usize)], text: &str, allow_overlap: bool) -> Result<(Vec<Span>, Vec<usize>), String> {
    let mut spans = Vec::with_capacity(raw.len());
    for &(s, e) in raw {
        let span = Span::new(s, e).map_err(|e| format!("{id}: {e}"))?;
        span.check(text).map_err(|e| format!("{id}: {e}"))?;
        spans.push(span);
    }
    let mut order: Vec<usize> = (0..spans.len()).collect();
    order.sort_by_key(|&i| (spans[i].start, spans[i].end));
    let sorted: Vec<Span> = order.iter().map(|&i| spans[i]).collect();
    if !allow_overlap {
        if let Some(w) = sorted.windows(2).find(|w| w[0].overlaps(&w[1])) {
            return Err(format!(
                "{id}: spans [{}, {}) and [{}, {}) overlap",
                w[0].start, w[0].end, w[1].start, w[1].end
            ));
        }
    }
    Ok((sorted, order))
}

fn texts(statutes: &[Subsection]) -> HashMap<&str, &str> {
    statutes.iter().map(|s| (s.id.as_str(), s.text.as_str())).collect()
}

/// Joins the spans and coreference files into validated layers, in the
/// order of the spans file. Spans are sorted by start offset and cluster
/// indices remapped to match.
pub fn load_argument_layers(spans_path: &Path, coref_path: &Path, statutes: &[Subsection]) -> Loaded<Vec<ArgumentLayer>> {
    let text_of = texts(statutes);
    let span_recs = records(spans_path)?;
    let coref_recs = records(coref_path)?;
    let mut errors = Vec::new();
    let mut coref: BTreeMap<String, (usize, Record)> = BTreeMap::new();
    for (line, r) in coref_recs {
        if coref.contains_key(&r.id) {
            errors.push(Diagnostic::at(coref_path, Some(line), format!("duplicate record for {}", r.id)));
        } else {
            coref.insert(r.id.clone(), (line, r));
        }
    }
    let mut layers = Vec::new();
    let mut seen = BTreeSet::new();
    for (line, r) in span_recs {
        let mut err = |p: &Path, l: usize, m: String| errors.push(Diagnostic::at(p, Some(l), m));
        if !seen.insert(r.id.clone()) {
            err(spans_path, line, format!("duplicate record for {}", r.id));
            continue;
        }
        let Some(text) = text_of.get(r.id.as_str()) else {
            err(spans_path, line, format!("unknown subsection {}", r.id));
            continue;
        };
        let (spans, order) = match parse_span_list(r.get("spans")).and_then(|raw| checked_spans(&r.id, &raw, text, false)) {
            Ok(x) => x,
            Err(m) => {
                err(spans_path, line, m);
                continue;
            }
        };
        let Some((cline, c)) = coref.remove(&r.id) else {
            err(coref_path, 0, format!("no coreference record for {}", r.id));
            continue;
        };
        match layer_from_coref(&r.id, spans, &order, &c) {
            Ok(layer) => layers.push(layer),
            Err(m) => err(coref_path, cline, m),
        }
    }
    for (id, (line, _)) in coref {
        errors.push(Diagnostic::at(coref_path, Some(line), format!("no spans record for {id}")));
    }
    for d in &mut errors {
        if d.line == Some(0) {
            d.line = None;
        }
    }
    if errors.is_empty() {
        Ok(layers)
    } else {
        Err(errors)
    }
}

fn parse_clusters(lit: Option<&Literal>, n: usize, order: &[usize]) -> Result<Vec<Vec<usize>>, String> {
    // File index -> sorted index.
    let mut rank = vec![0; n];
    for (k, &i) in order.iter().enumerate() {
        rank[i] = k;
    }
    let clusters = lit.and_then(Literal::as_list).ok_or("expected clusters=[[i, ...], ...]")?;
    clusters
        .iter()
        .map(|c| {
            let c = c.as_list().ok_or("each cluster is a list of span indices")?;
            c.iter()
                .map(|i| {
                    let i = i.as_usize().ok_or("cluster entries must be span indices")?;
                    rank.get(i).copied().ok_or_else(|| format!("cluster index {i} out of range for {n} spans"))
                })
                .collect()
        })
        .collect()
}

fn layer_from_coref(id: &str, spans: Vec<Span>, order: &[usize], r: &Record) -> Result<ArgumentLayer, String> {
    let clusters = parse_clusters(r.get("clusters"), spans.len(), order)?;
    let names = match r.get("names") {
        None => vec![None; clusters.len()],
        Some(lit) => lit
            .as_list()
            .ok_or("expected names=[\"...\", ...]")?
            .iter()
            .map(|n| match n.as_str() {
                Some("") => Ok(None),
                Some(s) => Ok(Some(s.to_string())),
                None => Err("argument names are strings".to_string()),
            })
            .collect::<Result<_, _>>()?,
    };
    ArgumentLayer::new(id, spans, clusters, names).map_err(|e| format!("{id}: {e}"))
}

/// Externally produced span predictions, keyed by subsection. Overlapping
/// predictions are accepted; out-of-range ones are not.
pub fn load_span_predictions(path: &Path, statutes: &[Subsection]) -> Loaded<BTreeMap<String, Vec<Span>>> {
    let text_of = texts(statutes);
    let mut out = BTreeMap::new();
    let mut errors = Vec::new();
    for (line, r) in records(path)? {
        let res = match text_of.get(r.id.as_str()) {
            None => Err(format!("unknown subsection {}", r.id)),
            Some(text) => parse_span_list(r.get("spans")).and_then(|raw| checked_spans(&r.id, &raw, text, true)),
        };
        match res {
            Ok((spans, _)) => {
                if out.insert(r.id.clone(), spans).is_some() {
                    errors.push(Diagnostic::at(path, Some(line), format!("duplicate record for {}", r.id)));
                }
            }
            Err(m) => errors.push(Diagnostic::at(path, Some(line), m)),
        }
    }
    if errors.is_empty() {
        Ok(out)
    } else {
        Err(errors)
    }
}

/// Externally produced coreference partitions over the gold spans, with
/// cluster indices in gold span order.
pub fn load_coref_predictions(path: &Path, layers: &[ArgumentLayer]) -> Loaded<BTreeMap<String, Partition>> {
    let sizes: HashMap<&str, usize> = layers.iter().map(|l| (l.subsection_id.as_str(), l.spans.len())).collect();
    let mut out = BTreeMap::new();
    let mut errors = Vec::new();
    for (line, r) in records(path)? {
        let res = match sizes.get(r.id.as_str()) {
            None => Err(format!("unknown subsection {}", r.id)),
            Some(&n) => {
                let identity: Vec<usize> = (0..n).collect();
                parse_clusters(r.get("clusters"), n, &identity)
                    .and_then(|c| Partition::new(c, n).map_err(|e| format!("{}: {e}", r.id)))
            }
        };
        match res {
            Ok(p) => {
                if out.insert(r.id.clone(), p).is_some() {
                    errors.push(Diagnostic::at(path, Some(line), format!("duplicate record for {}", r.id)));
                }
            }
            Err(m) => errors.push(Diagnostic::at(path, Some(line), m)),
        }
    }
    if errors.is_empty() {
        Ok(out)
    } else {
        Err(errors)
    }
}

fn case_from_record(r: &Record) -> Result<Case, String> {
    const FIELDS: [&str; 5] = ["query", "description", "inputs", "expected", "origin"];
    if let Some((k, _)) = r.fields.iter().find(|(k, _)| !FIELDS.contains(&k.as_str())) {
        return Err(format!("{}: unknown field {k}", r.id));
    }
    let text = |k: &str| -> Result<String, String> {
        r.get(k).and_then(Literal::as_str).map(str::to_string).ok_or_else(|| format!("{}: missing {k}=\"...\"", r.id))
    };
    let map = |k: &str| -> Result<crate::ValueMap, String> {
        match r.get(k) {
            None => Ok(crate::ValueMap::new()),
            Some(l) => literal_to_value_map(l).map_err(|e| format!("{}: {k}: {e}", r.id)),
        }
    };
    let expected = map("expected")?;
    if expected.is_empty() {
        return Err(format!("{}: expected must not be empty", r.id));
    }
    let origin = match r.get("origin") {
        None => None,
        Some(_) => Some(text("origin")?),
    };
    Ok(Case {
        id: r.id.clone(),
        description: text("description")?,
        query: text("query")?,
        inputs: map("inputs")?,
        expected,
        origin,
    })
}

pub fn case_to_record(c: &Case) -> Record {
    let mut r = Record::new(&c.id)
        .with("query", Literal::Str(c.query.clone()))
        .with("description", Literal::Str(c.description.clone()))
        .with("inputs", value_map_to_literal(&c.inputs))
        .with("expected", value_map_to_literal(&c.expected));
    if let Some(o) = &c.origin {
        r = r.with("origin", Literal::Str(o.clone()));
    }
    r
}

fn case_files(dir: &Path) -> Loaded<Vec<PathBuf>> {
    let entries = fs::read_dir(dir).map_err(|e| vec![Diagnostic::at(dir, None, format!("cannot list: {e}"))])?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "cases"))
        .collect();
    files.sort();
    Ok(files)
}

/// Every case in the `*.cases` files of `dir`, files in name order. Query
/// ids are checked later against the structure file.
pub fn load_cases(dir: &Path) -> Loaded<Vec<Case>> {
    let mut out = Vec::new();
    let mut errors = Vec::new();
    let mut ids = BTreeSet::new();
    for file in case_files(dir)? {
        let recs = match records(&file) {
            Ok(r) => r,
            Err(e) => {
                errors.extend(e);
                continue;
            }
        };
        for (line, r) in recs {
            match case_from_record(&r) {
                Ok(c) if !ids.insert(c.id.clone()) => {
                    errors.push(Diagnostic::at(&file, Some(line), format!("duplicate case {}", c.id)))
                }
                Ok(c) => out.push(c),
                Err(m) => errors.push(Diagnostic::at(&file, Some(line), m)),
            }
        }
    }
    if errors.is_empty() {
        Ok(out)
    } else {
        Err(errors)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Split {
    Train,
    Test,
}

impl Split {
    pub fn name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Test => "test",
        }
    }
}

pub fn load_split(path: &Path) -> Loaded<BTreeMap<String, Split>> {
    let mut out = BTreeMap::new();
    let mut errors = Vec::new();
    for (line, r) in records(path)? {
        let s = match r.get("split").and_then(Literal::as_str) {
            Some("train") => Split::Train,
            Some("test") => Split::Test,
            _ => {
                errors.push(Diagnostic::at(path, Some(line), "expected split=\"train\" or split=\"test\""));
                continue;
            }
        };
        if out.insert(r.id.clone(), s).is_some() {
            errors.push(Diagnostic::at(path, Some(line), format!("duplicate entry for {}", r.id)));
        }
    }
    if errors.is_empty() {
        Ok(out)
    } else {
        Err(errors)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    pub manifest: Option<Manifest>,
    pub subsections: Vec<Subsection>,
    pub layers: Vec<ArgumentLayer>,
    pub program: Program,
    pub cases: Vec<Case>,
    pub silver: Vec<Case>,
    pub split: BTreeMap<String, Split>,
}

/// Which gold cases a command runs on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitSel {
    Train,
    Test,
    All,
}

impl Corpus {
    pub fn empty() -> Self {
        Corpus {
            manifest: None,
            subsections: Vec::new(),
            layers: Vec::new(),
            program: Program::new(),
            cases: Vec::new(),
            silver: Vec::new(),
            split: BTreeMap::new(),
        }
    }

    pub fn subsection(&self, id: &str) -> Option<&Subsection> {
        self.subsections.iter().find(|s| s.id == id)
    }

    pub fn layer(&self, id: &str) -> Option<&ArgumentLayer> {
        self.layers.iter().find(|l| l.subsection_id == id)
    }

    /// Gold cases in file order.
    pub fn cases_in(&self, sel: SplitSel) -> Vec<&Case> {
        self.cases
            .iter()
            .filter(|c| match sel {
                SplitSel::All => true,
                SplitSel::Train => self.split.get(&c.id) == Some(&Split::Train),
                SplitSel::Test => self.split.get(&c.id) == Some(&Split::Test),
            })
            .collect()
    }

    /// Distinct top-level sections among the subsections.
    pub fn section_count(&self) -> usize {
        self.subsections.iter().map(|s| Subsection::section_of(&s.id)).collect::<BTreeSet<_>>().len()
    }

    /// SHA-256 over the canonical serialization of every component.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        for s in &self.subsections {
            h.update(format!("{}\u{0}{}\u{0}", s.id, s.text));
        }
        for part in [
            write_spans(&self.layers),
            write_coref(&self.layers),
            self.program.rules().map(|r| format!("{r}\n")).collect(),
            write_cases(&self.cases),
            write_cases(&self.silver),
            write_split(&self.split),
        ] {
            h.update(part);
            h.update([0u8]);
        }
        hex::encode(h.finalize())
    }
}

/// Loads every component named by the manifest, reporting all problems
/// found rather than stopping at the first.
pub fn load_corpus(manifest: &Manifest) -> Loaded<Corpus> {
    fn keep<T>(errors: &mut Vec<Diagnostic>, r: Loaded<T>) -> Option<T> {
        r.map_err(|e| errors.extend(e)).ok()
    }
    let mut errors = Vec::new();
    let subsections = keep(&mut errors, load_statutes(&manifest.statutes));
    let layers = match &subsections {
        Some(s) => keep(&mut errors, load_argument_layers(&manifest.spans, &manifest.coref, s)),
        None => None,
    };
    let program = keep(&mut errors, read(&manifest.structure).and_then(|t| {
        parse_program(&t).map_err(|e| {
            e.errors
                .iter()
                .map(|(clause, kind)| {
                    let (line, msg) = match kind {
                        ProgramErrorKind::Syntax(p) => {
                            (Some(p.line), format!("clause {clause}, column {}: {}", p.column, p.message))
                        }
                        ProgramErrorKind::DuplicateHead(h) => {
                            (None, format!("clause {clause}: duplicate definition of {h}"))
                        }
                    };
                    Diagnostic::at(&manifest.structure, line, msg)
                })
                .collect()
        })
    }));
    let cases = keep(&mut errors, load_cases(&manifest.cases));
    let silver = match &manifest.silver {
        Some(dir) => keep(&mut errors, load_cases(dir)),
        None => Some(Vec::new()),
    };
    let split = match &manifest.split {
        Some(p) => keep(&mut errors, load_split(p)),
        None => Some(BTreeMap::new()),
    };
    match (subsections, layers, program, cases, silver, split) {
        (Some(subsections), Some(layers), Some(program), Some(cases), Some(silver), Some(split)) if errors.is_empty() => {
            Ok(Corpus { manifest: Some(manifest.clone()), subsections, layers, program, cases, silver, split })
        }
        _ => Err(errors),
    }
}

/// Cross-file checks: structure references, case queries and keys, split
/// entries and layer argument names.
pub fn validate_corpus(corpus: &Corpus) -> Vec<Diagnostic> {
    let file = |f: fn(&Manifest) -> &Path| corpus.manifest.as_ref().map(|m| f(m).to_path_buf());
    let structure = file(|m| &m.structure);
    let cases_dir = file(|m| &m.cases);
    let mut out: Vec<Diagnostic> = check_references(&corpus.program)
        .into_iter()
        .map(|d| Diagnostic { file: structure.clone(), line: None, message: d.to_string() })
        .collect();
    let mut case_diag = |m: String| out.push(Diagnostic { file: cases_dir.clone(), line: None, message: m });
    for c in corpus.cases.iter().chain(&corpus.silver) {
        let Some(rule) = corpus.program.get(&c.query) else {
            case_diag(format!("{}: query {} has no rule", c.id, c.query));
            continue;
        };
        if c.kind() == CaseKind::Binary && !c.expected.contains_key(TRUTH) {
            case_diag(format!("{}: binary case without {TRUTH}", c.id));
        }
        for (what, map) in [("input", &c.inputs), ("expected", &c.expected)] {
            for k in map.keys().filter(|k| *k != TRUTH && !rule.params.iter().any(|p| p == k)) {
                case_diag(format!("{}: {what} argument {k} is not a parameter of {}", c.id, c.query));
            }
        }
    }
    let ids: BTreeSet<&str> = corpus.cases.iter().map(|c| c.id.as_str()).collect();
    let split_file = file(|m| m.split.as_deref().unwrap_or(&m.cases));
    for id in corpus.split.keys().filter(|id| !ids.contains(id.as_str())) {
        out.push(Diagnostic { file: split_file.clone(), line: None, message: format!("split lists unknown case {id}") });
    }
    let coref = file(|m| &m.coref);
    for l in &corpus.layers {
        let Some(rule) = corpus.program.get(&l.subsection_id) else { continue };
        for name in l.names.iter().flatten().filter(|n| !rule.params.contains(n)) {
            out.push(Diagnostic {
                file: coref.clone(),
                line: None,
                message: format!("{}: argument {name} is not a parameter of the rule", l.subsection_id),
            });
        }
    }
    out
}

fn span_list(spans: &[Span]) -> Literal {
    Literal::List(
        spans.iter().map(|s| Literal::List(vec![Literal::Int(s.start as i64), Literal::Int(s.end as i64)])).collect(),
    )
}

pub fn span_records<'a>(items: impl IntoIterator<Item = (&'a str, &'a [Span])>) -> String {
    let recs: Vec<Record> = items.into_iter().map(|(id, spans)| Record::new(id).with("spans", span_list(spans))).collect();
    write_records(&recs)
}

pub fn write_spans(layers: &[ArgumentLayer]) -> String {
    span_records(layers.iter().map(|l| (l.subsection_id.as_str(), l.spans.as_slice())))
}

fn cluster_list(p: &Partition) -> Literal {
    Literal::List(
        p.clusters().iter().map(|c| Literal::List(c.iter().map(|&i| Literal::Int(i as i64)).collect())).collect(),
    )
}

pub fn partition_records<'a>(items: impl IntoIterator<Item = (&'a str, &'a Partition)>) -> String {
    let recs: Vec<Record> = items.into_iter().map(|(id, p)| Record::new(id).with("clusters", cluster_list(p))).collect();
    write_records(&recs)
}

pub fn write_coref(layers: &[ArgumentLayer]) -> String {
    let recs: Vec<Record> = layers
        .iter()
        .map(|l| {
            let names = l.names.iter().map(|n| Literal::Str(n.clone().unwrap_or_default())).collect();
            Record::new(&l.subsection_id).with("clusters", cluster_list(&l.partition)).with("names", Literal::List(names))
        })
        .collect();
    write_records(&recs)
}

pub fn write_cases(cases: &[Case]) -> String {
    let recs: Vec<Record> = cases.iter().map(case_to_record).collect();
    write_records(&recs)
}

pub fn write_split(split: &BTreeMap<String, Split>) -> String {
    let recs: Vec<Record> =
        split.iter().map(|(id, s)| Record::new(id).with("split", Literal::Str(s.name().into()))).collect();
    write_records(&recs)
}
