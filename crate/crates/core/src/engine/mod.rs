//! Argument instantiation over single subsections and dependency trees.
//!
//! A [`Resolver`] predicts one value at a time. [`instantiate_single`]
//! walks the arguments of a subsection in order of first mention,
//! re-grounding the text after every prediction, and finishes with
//! `@truth`. [`instantiate_full`] unrolls the structure rules into a
//! dependency tree and resolves it bottom-up, combining children with the
//! logical operators of the rule bodies.

mod run;

use thiserror::Error;

use crate::io::Corpus;
use crate::model::{char_range_to_bytes, ArgumentLayer, Case, ValueMap, TRUTH};
use crate::structure::{build_dependency_tree, Binding, DepNode, OpKind, SubsectionNode, TreeError};

pub use run::{evaluate_run, instantiation_report, prediction_records, CaseOutcome, RunOutput};

#[derive(Debug, Clone, PartialEq)]
pub struct EngineConfig {
    /// Deepest subsection level expanded; the root is level 1.
    pub depth_cap: usize,
    pub truth_threshold: f64,
    /// Ground later predictions on gold values where the case has them.
    pub insert_gold: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig { depth_cap: 3, truth_threshold: 0.5, insert_gold: false }
    }
}

impl EngineConfig {
    pub fn check(&self) -> Result<(), EngineError> {
        if self.depth_cap == 0 {
            return Err(EngineError::Config("depth cap must be at least 1".into()));
        }
        if !(self.truth_threshold > 0.0 && self.truth_threshold < 1.0) {
            return Err(EngineError::Config(format!("threshold {} is not in (0, 1)", self.truth_threshold)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error("resolver failed on {subsection} for {arg}: {message}")]
    Resolver { subsection: String, arg: String, message: String },
    #[error("{kind} expects {expected} children, got {got}")]
    Arity { kind: OpKind, expected: &'static str, got: usize },
}

/// Everything a resolver may look at when asked for values.
#[derive(Debug, Clone, Copy)]
pub struct Query<'a> {
    pub subsection_id: &'a str,
    pub layer: Option<&'a ArgumentLayer>,
    /// Subsection text as written.
    pub text: &'a str,
    /// Text with every value known so far substituted in.
    pub grounded_text: &'a str,
    pub values: &'a ValueMap,
    pub case: &'a Case,
    /// Arguments to predict: a single argument, or `@truth`.
    pub required: &'a [String],
    /// Whether this subsection is the one the case asks about.
    pub is_root: bool,
}

/// Predicted values plus free-form remarks for the run log.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Resolution {
    pub values: ValueMap,
    pub notes: Vec<String>,
}

impl From<ValueMap> for Resolution {
    fn from(values: ValueMap) -> Self {
        Resolution { values, notes: Vec::new() }
    }
}

/// Value predictor. Must be deterministic; keys outside `required` are
/// ignored by the engine.
pub trait Resolver: Sync {
    fn name(&self) -> String;
    fn resolve(&self, query: &Query<'_>) -> Result<Resolution, String>;
}

/// Answers from the gold expected values of the case, at the root only.
/// Nodes below the root get nothing, so their results never override
/// what the root reports.
#[derive(Debug, Clone, Copy, Default)]
pub struct OracleResolver;

impl Resolver for OracleResolver {
    fn name(&self) -> String {
        "oracle".into()
    }

    fn resolve(&self, q: &Query<'_>) -> Result<Resolution, String> {
        let mut out = ValueMap::new();
        if q.is_root {
            for arg in q.required {
                if let Some(v) = q.case.expected.get(arg) {
                    out.insert(arg.clone(), v.clone()).map_err(|e| e.to_string())?;
                }
            }
        }
        Ok(out.into())
    }
}

/// Replaces every mention of every valued argument by the value's surface
/// form. Text outside mentions is untouched.
pub fn insert_values(text: &str, layer: &ArgumentLayer, values: &ValueMap) -> String {
    let mut edits: Vec<(usize, usize, String)> = Vec::new();
    for (name, mentions) in layer.arguments() {
        if name == TRUTH {
            continue;
        }
        if let Some(v) = values.get(name) {
            let surface = v.surface();
            for m in mentions {
                if let Some((a, b)) = char_range_to_bytes(text, m.start, m.end) {
                    edits.push((a, b, surface.clone()));
                }
            }
        }
    }
    // Right to left, so byte offsets of earlier mentions stay valid.
    edits.sort_by_key(|x| std::cmp::Reverse(x.0));
    let mut out = text.to_string();
    for (a, b, s) in edits {
        out.replace_range(a..b, &s);
    }
    out
}

/// Where a subsection comes from and what it declares.
#[derive(Debug, Clone, Copy)]
pub struct SubsectionView<'a> {
    pub id: &'a str,
    pub text: &'a str,
    pub layer: Option<&'a ArgumentLayer>,
    pub params: &'a [String],
}

/// Arguments in prediction order: named arguments of the layer by first
/// mention, then parameters that have no mention.
pub fn argument_order(view: &SubsectionView<'_>) -> Vec<String> {
    let mut order: Vec<String> = view.layer.map(|l| l.arguments().map(|(n, _)| n.to_string()).collect()).unwrap_or_default();
    for p in view.params {
        if !order.contains(p) {
            order.push(p.clone());
        }
    }
    order.retain(|a| a != TRUTH);
    order
}

/// Output of an instantiation with the remarks collected on the way.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Instantiation {
    pub values: ValueMap,
    pub notes: Vec<String>,
}

fn ground(view: &SubsectionView<'_>, values: &ValueMap) -> String {
    match view.layer {
        Some(l) => insert_values(view.text, l, values),
        None => view.text.to_string(),
    }
}

/// Single-subsection instantiation. Arguments present in `inputs` are
/// kept as given; the rest are predicted one at a time, then `@truth` on
/// the fully grounded text. A missing `@truth` defaults to 0.
pub fn instantiate_single(
    resolver: &dyn Resolver,
    view: &SubsectionView<'_>,
    inputs: &ValueMap,
    case: &Case,
    is_root: bool,
    config: &EngineConfig,
) -> Result<Instantiation, EngineError> {
    let mut out = inputs.without_truth();
    // What the text is grounded with; differs from `out` under teacher forcing.
    let mut grounding = out.clone();
    let mut notes = Vec::new();
    let ask = |arg: &str, values: &ValueMap, notes: &mut Vec<String>| -> Result<Option<crate::Value>, EngineError> {
        let grounded = ground(view, values);
        let required = [arg.to_string()];
        let q = Query {
            subsection_id: view.id,
            layer: view.layer,
            text: view.text,
            grounded_text: &grounded,
            values,
            case,
            required: &required,
            is_root,
        };
        let r = resolver.resolve(&q).map_err(|message| EngineError::Resolver {
            subsection: view.id.to_string(),
            arg: arg.to_string(),
            message,
        })?;
        notes.extend(r.notes.into_iter().map(|n| format!("{} {arg}: {n}", view.id)));
        Ok(r.values.get(arg).cloned())
    };
    for arg in argument_order(view) {
        if out.contains_key(&arg) {
            continue;
        }
        let Some(v) = ask(&arg, &grounding, &mut notes)? else { continue };
        let gold = if config.insert_gold && is_root { case.expected.get(&arg) } else { None };
        // Keys are non-@truth parameters, so insertion cannot fail.
        grounding.insert(arg.clone(), gold.cloned().unwrap_or_else(|| v.clone())).expect("non-truth key");
        out.insert(arg, v).expect("non-truth key");
    }
    match ask(TRUTH, &grounding, &mut notes)?.and_then(|v| v.as_truth()) {
        Some(t) => out.set_truth(t),
        None => {
            notes.push(format!("{}: no @truth predicted, using 0", view.id));
            out.set_truth(0.0);
        }
    }
    Ok(Instantiation { values: out, notes })
}

fn truth(m: &ValueMap) -> f64 {
    m.truth().unwrap_or(0.0)
}

/// Combines the results of an operator's children.
///
/// NOT negates `@truth` and keeps nothing else. OR adopts the whole map
/// of the child with the highest `@truth`. AND unions the children, takes
/// the lowest `@truth`, and on conflicting values keeps the one from the
/// child with lower `@truth`. Ties go to the earlier child.
pub fn do_operation(kind: OpKind, children: &[ValueMap]) -> Result<ValueMap, EngineError> {
    match kind {
        OpKind::Not => {
            let [child] = children else {
                return Err(EngineError::Arity { kind, expected: "exactly 1", got: children.len() });
            };
            let mut out = ValueMap::new();
            out.set_truth(1.0 - truth(child));
            Ok(out)
        }
        _ if children.len() < 2 => Err(EngineError::Arity { kind, expected: "at least 2", got: children.len() }),
        OpKind::Or => {
            let mut best = &children[0];
            for c in &children[1..] {
                if truth(c) > truth(best) {
                    best = c;
                }
            }
            Ok(best.clone())
        }
        OpKind::And => {
            let mut out = ValueMap::new();
            let mut owner: std::collections::HashMap<String, f64> = Default::default();
            for c in children {
                let t = truth(c);
                for (k, v) in c.iter().filter(|(k, _)| *k != TRUTH) {
                    match owner.get(k) {
                        Some(&held) if held <= t => {}
                        _ => {
                            owner.insert(k.to_string(), t);
                            out.insert(k, v.clone()).expect("non-truth key");
                        }
                    }
                }
            }
            out.set_truth(children.iter().map(truth).fold(1.0, f64::min));
            Ok(out)
        }
    }
}

/// Values of the caller passed down into the callee's parameters.
fn bind_down(bindings: &[Binding], caller: &ValueMap) -> ValueMap {
    let mut out = ValueMap::new();
    for b in bindings {
        if b.callee_param == TRUTH {
            continue;
        }
        if let Some(v) = caller.get(&b.caller_var) {
            out.insert(b.callee_param.clone(), v.clone()).expect("non-truth key");
        }
    }
    out
}

/// Callee results renamed into the caller's variables, `@truth` kept.
fn bind_up(bindings: &[Binding], callee: &ValueMap) -> ValueMap {
    let mut out = ValueMap::new();
    for b in bindings {
        if b.caller_var == TRUTH || out.contains_key(&b.caller_var) {
            continue;
        }
        if let Some(v) = callee.get(&b.callee_param) {
            out.insert(b.caller_var.clone(), v.clone()).expect("non-truth key");
        }
    }
    out.set_truth(truth(callee));
    out
}

struct TreeRun<'a> {
    resolver: &'a dyn Resolver,
    corpus: &'a Corpus,
    case: &'a Case,
    config: &'a EngineConfig,
    notes: Vec<String>,
}

impl TreeRun<'_> {
    fn subsection(&mut self, node: &SubsectionNode, inputs: ValueMap, is_root: bool) -> Result<ValueMap, EngineError> {
        let mut values = inputs;
        if let Some(child) = &node.child {
            let below = self.node(child, &values)?;
            for (k, v) in below.iter() {
                if k != TRUTH && !values.contains_key(k) && node.params.iter().any(|p| p == k) {
                    values.insert(k, v.clone()).expect("non-truth key");
                }
            }
        }
        let view = SubsectionView {
            id: &node.id,
            text: self.corpus.subsection(&node.id).map_or("", |s| s.text.as_str()),
            layer: self.corpus.layer(&node.id),
            params: &node.params,
        };
        let r = instantiate_single(self.resolver, &view, &values, self.case, is_root, self.config)?;
        self.notes.extend(r.notes);
        Ok(r.values)
    }

    /// Result of a body node, in the variables of the enclosing subsection.
    fn node(&mut self, node: &DepNode, caller: &ValueMap) -> Result<ValueMap, EngineError> {
        match node {
            DepNode::Subsection(s) => {
                let r = self.subsection(s, bind_down(&s.bindings, caller), false)?;
                Ok(bind_up(&s.bindings, &r))
            }
            DepNode::Op(op) => {
                let results = op.children.iter().map(|c| self.node(c, caller)).collect::<Result<Vec<_>, _>>()?;
                do_operation(op.kind, &results)
            }
        }
    }
}

/// Tree-structured instantiation of `case.query`: inputs flow down
/// through bindings to every branch, results are combined bottom-up, and
/// each subsection absorbs its body's values before predicting its own.
pub fn instantiate_full(
    resolver: &dyn Resolver,
    corpus: &Corpus,
    case: &Case,
    config: &EngineConfig,
) -> Result<Instantiation, EngineError> {
    config.check()?;
    let tree = build_dependency_tree(&corpus.program, &case.query, config.depth_cap)?;
    let mut run = TreeRun { resolver, corpus, case, config, notes: Vec::new() };
    let values = run.subsection(&tree.root, case.inputs.without_truth(), true)?;
    Ok(Instantiation { values, notes: run.notes })
}

#[cfg(test)]
mod tests;
