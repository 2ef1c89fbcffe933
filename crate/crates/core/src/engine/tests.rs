use std::path::Path;
use std::sync::Mutex;

use super::*;
use crate::io::{load_corpus, Manifest, SplitSel};
use crate::model::Value;
use crate::structure::parse_program;

fn fixture() -> Corpus {
    let m = Manifest::load(&Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/mini/corpus.manifest")).unwrap();
    load_corpus(&m).unwrap()
}

fn case<'a>(c: &'a Corpus, id: &str) -> &'a Case {
    c.cases.iter().find(|x| x.id == id).unwrap()
}

fn vm(pairs: &[(&str, Value)]) -> ValueMap {
    ValueMap::from_pairs(pairs.iter().cloned()).unwrap()
}

fn t(x: f64) -> Value {
    Value::TruthScore(x)
}

fn view<'a>(c: &'a Corpus, id: &'a str) -> SubsectionView<'a> {
    SubsectionView {
        id,
        text: &c.subsection(id).unwrap().text,
        layer: c.layer(id),
        params: &c.program.get(id).unwrap().params,
    }
}

/// Records every query and answers from a fixed table keyed by
/// (subsection, argument).
#[derive(Default)]
struct Script {
    answers: Vec<(&'static str, &'static str, Value)>,
    log: Mutex<Vec<(String, String, String, ValueMap)>>,
}

impl Resolver for Script {
    fn name(&self) -> String {
        "script".into()
    }

    fn resolve(&self, q: &Query<'_>) -> Result<Resolution, String> {
        let arg = &q.required[0];
        self.log.lock().unwrap().push((q.subsection_id.into(), arg.clone(), q.grounded_text.into(), q.values.clone()));
        let mut out = ValueMap::new();
        for (s, a, v) in &self.answers {
            if *s == q.subsection_id && a == arg {
                out.insert(*a, v.clone()).unwrap();
            }
        }
        Ok(out.into())
    }
}

impl Script {
    fn asked(&self) -> Vec<(String, String)> {
        self.log.lock().unwrap().iter().map(|(s, a, _, _)| (s.clone(), a.clone())).collect()
    }
}

#[test]
fn insert_values_grounds_mentions() {
    let c = fixture();
    let v = view(&c, "§2(a)(1)(A)");
    let values = vm(&[("Taxp", Value::text("Alice")), ("Taxy", Value::text("2017"))]);
    assert_eq!(
        insert_values(v.text, v.layer.unwrap(), &values),
        "(A) Alice spouse died during either of the two years immediately preceding 2017"
    );
    assert_eq!(insert_values(v.text, v.layer.unwrap(), &ValueMap::new()), v.text);
    // Both mentions of a coreferent argument are replaced.
    let b = view(&c, "§2(a)(1)(B)");
    let out = insert_values(b.text, b.layer.unwrap(), &vm(&[("Taxp", Value::text("Bob"))]));
    assert!(out.starts_with("(B) Bob maintains as Bob home"), "{out}");
}

#[test]
fn inputs_are_never_repredicted() {
    let c = fixture();
    let v = view(&c, "§2(a)(1)(A)");
    let mut k = case(&c, "2(a)(1)-positive").clone();
    k.query = "§2(a)(1)(A)".into();
    let inputs = vm(&[
        ("Taxp", Value::text("Alice")),
        ("Taxy", Value::text("2017")),
        ("Spouse", Value::text("Bob")),
        ("Years", Value::text("2015, 2016")),
    ]);
    let r = instantiate_single(&OracleResolver, &v, &inputs, &k, true, &EngineConfig::default()).unwrap();
    let mut want = inputs.clone();
    want.set_truth(1.0);
    assert_eq!(r.values, want);

    let s = Script::default();
    instantiate_single(&s, &v, &inputs, &k, true, &EngineConfig::default()).unwrap();
    assert_eq!(s.asked(), [("§2(a)(1)(A)".to_string(), TRUTH.to_string())]);
}

#[test]
fn arguments_follow_first_mention_and_regrounding() {
    let c = fixture();
    let v = view(&c, "§2(a)(1)(A)");
    let k = case(&c, "2(a)(1)-positive");
    let s = Script {
        answers: vec![("§2(a)(1)(A)", "Spouse", Value::text("Bob")), ("§2(a)(1)(A)", TRUTH, t(0.7))],
        ..Default::default()
    };
    let inputs = vm(&[("Taxp", Value::text("Alice"))]);
    let r = instantiate_single(&s, &v, &inputs, k, false, &EngineConfig::default()).unwrap();
    let asked: Vec<String> = s.asked().into_iter().map(|(_, a)| a).collect();
    // Parameters are declared Taxp, Taxy, Spouse, Years; mentions come Taxp, Spouse, Years, Taxy.
    assert_eq!(asked, ["Spouse", "Years", "Taxy", TRUTH]);
    let log = s.log.lock().unwrap();
    assert!(log[0].2.starts_with("(A) Alice spouse"));
    assert!(log[1].2.starts_with("(A) Alice Bob died"));
    // Unanswered arguments stay absent.
    assert_eq!(r.values, vm(&[("Taxp", Value::text("Alice")), ("Spouse", Value::text("Bob")), (TRUTH, t(0.7))]));
}

#[test]
fn teacher_forcing_grounds_on_gold() {
    let c = fixture();
    let v = view(&c, "§2(a)(1)(A)");
    let mut k = case(&c, "2(a)(1)-positive").clone();
    k.expected.insert("Spouse", Value::text("Bob")).unwrap();
    let s = Script { answers: vec![("§2(a)(1)(A)", "Spouse", Value::text("Zed"))], ..Default::default() };
    let cfg = EngineConfig { insert_gold: true, ..Default::default() };
    let r = instantiate_single(&s, &v, &ValueMap::new(), &k, true, &cfg).unwrap();
    assert_eq!(r.values.get("Spouse"), Some(&Value::text("Zed")));
    // Taxp is asked first, then Spouse; the third query sees the gold spouse.
    assert!(s.log.lock().unwrap()[2].2.contains("whose Bob died"));
}

#[test]
fn missing_truth_defaults_to_zero() {
    let c = fixture();
    let v = view(&c, "§2(a)(1)(A)");
    let s = Script::default();
    let r = instantiate_single(&s, &v, &ValueMap::new(), case(&c, "2(a)(1)-positive"), false, &EngineConfig::default())
        .unwrap();
    assert_eq!(r.values.truth(), Some(0.0));
    assert!(r.notes.iter().any(|n| n.contains("no @truth")));
}

#[test]
fn resolver_errors_name_the_argument() {
    struct Broken;
    impl Resolver for Broken {
        fn name(&self) -> String {
            "broken".into()
        }
        fn resolve(&self, _: &Query<'_>) -> Result<Resolution, String> {
            Err("no model".into())
        }
    }
    let c = fixture();
    let e = instantiate_single(&Broken, &view(&c, "§2(a)(1)(A)"), &ValueMap::new(), &c.cases[0], false, &EngineConfig::default())
        .unwrap_err();
    assert_eq!(
        e,
        EngineError::Resolver { subsection: "§2(a)(1)(A)".into(), arg: "Taxp".into(), message: "no model".into() }
    );
}

#[test]
fn operator_examples() {
    let not = do_operation(OpKind::Not, &[vm(&[(TRUTH, t(0.0)), ("X", Value::text("a"))])]).unwrap();
    assert_eq!(not, vm(&[(TRUTH, t(1.0))]));
    let a = vm(&[(TRUTH, t(0.3)), ("X", Value::text("a"))]);
    let b = vm(&[(TRUTH, t(0.8)), ("X", Value::text("b"))]);
    assert_eq!(do_operation(OpKind::Or, &[a.clone(), b.clone()]).unwrap(), b);
    let a = vm(&[(TRUTH, t(0.9)), ("X", Value::text("a")), ("Y", Value::text("y"))]);
    let b = vm(&[(TRUTH, t(0.4)), ("X", Value::text("b"))]);
    let and = do_operation(OpKind::And, &[a, b]).unwrap();
    assert_eq!(and.truth(), Some(0.4));
    assert_eq!(and.get("X"), Some(&Value::text("b")));
    assert_eq!(and.get("Y"), Some(&Value::text("y")));
    assert!(matches!(do_operation(OpKind::Not, &[]), Err(EngineError::Arity { .. })));
    assert!(matches!(do_operation(OpKind::And, &[ValueMap::new()]), Err(EngineError::Arity { .. })));
}

#[test]
fn oracle_reproduces_appendix_outputs() {
    let c = fixture();
    let cfg = EngineConfig::default();
    let neg = instantiate_full(&OracleResolver, &c, case(&c, "63(c)(5)-negative"), &cfg).unwrap();
    assert_eq!(neg.values.truth(), Some(0.0));
    let pos = instantiate_full(&OracleResolver, &c, case(&c, "3306(a)(1)(B)-positive"), &cfg).unwrap();
    assert_eq!(pos.values.get("Employee"), Some(&Value::text("Bob")));
    assert_eq!(pos.values.truth(), Some(1.0));
    let alice = instantiate_full(&OracleResolver, &c, case(&c, "2(a)(1)-positive"), &cfg).unwrap();
    assert_eq!(alice.values.truth(), Some(1.0));
}

#[test]
fn tree_nodes_resolve_once_children_first() {
    let c = fixture();
    let k = case(&c, "63(c)(5)-positive");
    let s = Script {
        answers: vec![("§63(c)(5)(B)", "Grossinc", Value::Money(10)), ("§151(b)", TRUTH, t(0.2)), ("§151(c)", TRUTH, t(0.9))],
        ..Default::default()
    };
    let r = instantiate_full(&s, &c, k, &EngineConfig::default()).unwrap();
    let truths: Vec<String> = s.asked().into_iter().filter(|(_, a)| a == TRUTH).map(|(s, _)| s).collect();
    assert_eq!(truths, ["§151(b)", "§151(c)", "§63(c)(5)(A)", "§63(c)(5)(B)", "§63(c)(5)"]);
    let log = s.log.lock().unwrap();
    // Inputs reach §151(b) through Spouse=Taxp.
    let b = log.iter().find(|(s, _, _, _)| s == "§151(b)").unwrap();
    assert_eq!(b.3.get("Spouse"), Some(&Value::text("Bob")));
    assert_eq!(b.3.get("Taxy"), Some(&Value::text("2017")));
    assert!(b.3.get("Taxp").is_none());
    // The root absorbs Grossinc from its body and does not ask for it.
    assert!(!log.iter().any(|(s, a, _, _)| s == "§63(c)(5)" && a == "Grossinc"));
    assert_eq!(r.values.get("Grossinc"), Some(&Value::Money(10)));
    // No root @truth answer: default 0.
    assert_eq!(r.values.truth(), Some(0.0));
}

#[test]
fn cap_one_and_bodyless_rules_match_single_runs() {
    let c = fixture();
    let k = case(&c, "63(c)(5)-positive");
    let s1 = Script { answers: vec![("§63(c)(5)", TRUTH, t(0.6))], ..Default::default() };
    let capped = instantiate_full(&s1, &c, k, &EngineConfig { depth_cap: 1, ..Default::default() }).unwrap();
    let s2 = Script { answers: vec![("§63(c)(5)", TRUTH, t(0.6))], ..Default::default() };
    let single = instantiate_single(&s2, &view(&c, "§63(c)(5)"), &k.inputs, k, true, &EngineConfig::default()).unwrap();
    assert_eq!(capped.values, single.values);
    assert_eq!(s1.asked(), s2.asked());

    let mut leaf = k.clone();
    leaf.query = "§151(c)".into();
    let full = instantiate_full(&OracleResolver, &c, &leaf, &EngineConfig::default()).unwrap();
    let single = instantiate_single(&OracleResolver, &view(&c, "§151(c)"), &leaf.inputs, &leaf, true, &EngineConfig::default())
        .unwrap();
    assert_eq!(full.values, single.values);
}

#[test]
fn unknown_query_and_bad_config() {
    let c = fixture();
    let mut k = c.cases[0].clone();
    k.query = "§999".into();
    assert!(matches!(
        instantiate_full(&OracleResolver, &c, &k, &EngineConfig::default()),
        Err(EngineError::Tree(TreeError::UnknownRoot(_)))
    ));
    for cfg in [
        EngineConfig { depth_cap: 0, ..Default::default() },
        EngineConfig { truth_threshold: 1.0, ..Default::default() },
    ] {
        assert!(matches!(instantiate_full(&OracleResolver, &c, &c.cases[0], &cfg), Err(EngineError::Config(_))));
    }
}

#[test]
fn not_body_negates_child() {
    let mut c = fixture();
    c.program = parse_program("§2(a)(1)(Taxp, Taxy) :- NOT §2(a)(1)(A)(Taxp, Taxy).\n§2(a)(1)(A)(Taxp, Taxy).").unwrap();
    // The root absorbs nothing from a NOT node.
    let s = Script { answers: vec![("§2(a)(1)(A)", TRUTH, t(0.25)), ("§2(a)(1)(A)", "Spouse", Value::text("x"))], ..Default::default() };
    let r = instantiate_full(&s, &c, case(&c, "2(a)(1)-positive"), &EngineConfig::default()).unwrap();
    assert!(r.values.get("Spouse").is_none());
}

#[test]
fn oracle_run_scores_perfectly_and_deterministically() {
    let c = fixture();
    let cfg = EngineConfig::default();
    let a = evaluate_run(&OracleResolver, &c, SplitSel::All, &cfg);
    assert_eq!(a.outcomes.len(), c.cases.len());
    assert!(a.scores.iter().all(|s| s.correct));
    assert_eq!(a.report.cell("unified", "n"), Some(&crate::metrics::Cell::Count(a.scores.len())));
    let b = evaluate_run(&OracleResolver, &c, SplitSel::All, &cfg);
    let dump = |r: &RunOutput| crate::io::write_records(&prediction_records(&r.report, &r.outcomes));
    assert_eq!(dump(&a), dump(&b));
    assert_eq!(a.report.render(), b.report.render());
    assert!(dump(&a).starts_with("@run config={resolver=\"oracle\", split=\"all\""));

    let empty = evaluate_run(&OracleResolver, &Corpus::empty(), SplitSel::Test, &cfg);
    assert!(empty.outcomes.is_empty());
    assert_eq!(empty.report.cell("unified", "accuracy"), Some(&crate::metrics::Cell::Empty));
}
