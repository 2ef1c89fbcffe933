use std::collections::BTreeMap;

use proptest::prelude::*;
use sara_core::engine::{do_operation, instantiate_full, EngineConfig, Query, Resolution, Resolver};
use sara_core::io::Corpus;
use sara_core::structure::{
    build_dependency_tree, parse_program, Binding, BodyExpr, DepNode, OpKind, Program, Rule, SubsectionNode,
};
use sara_core::{Case, Value, ValueMap, TRUTH};

const TRUTHS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

#[derive(Debug, Clone)]
enum Tree {
    Leaf { truth: f64, value: Option<u8> },
    And(Vec<Tree>),
    Or(Vec<Tree>),
    Not(Box<Tree>),
}

fn tree() -> impl Strategy<Value = Tree> {
    let leaf = (0..TRUTHS.len(), prop::option::of(0u8..4)).prop_map(|(t, value)| Tree::Leaf { truth: TRUTHS[t], value });
    leaf.prop_recursive(4, 40, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..=3).prop_map(Tree::And),
            prop::collection::vec(inner.clone(), 2..=3).prop_map(Tree::Or),
            inner.prop_map(|x| Tree::Not(Box::new(x))),
        ]
    })
}

/// Reference semantics, written independently of the engine.
fn reference(t: &Tree) -> (f64, Option<String>) {
    match t {
        Tree::Leaf { truth, value } => (*truth, value.map(|v| format!("v{v}"))),
        Tree::Not(x) => (1.0 - reference(x).0, None),
        Tree::Or(xs) => {
            let rs: Vec<_> = xs.iter().map(reference).collect();
            let max = rs.iter().map(|r| r.0).fold(f64::MIN, f64::max);
            rs.into_iter().find(|r| r.0 == max).unwrap()
        }
        Tree::And(xs) => {
            let rs: Vec<_> = xs.iter().map(reference).collect();
            let min = rs.iter().map(|r| r.0).fold(f64::MAX, f64::min);
            let mut holders: Vec<&(f64, Option<String>)> = rs.iter().filter(|r| r.1.is_some()).collect();
            // Stable sort keeps the earlier child first among equal truths.
            holders.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            (min, holders.first().and_then(|r| r.1.clone()))
        }
    }
}

fn leaf_map(truth: f64, value: Option<u8>) -> ValueMap {
    let mut m = ValueMap::new();
    if let Some(v) = value {
        m.insert("X", Value::text(format!("v{v}"))).unwrap();
    }
    m.set_truth(truth);
    m
}

fn operate(t: &Tree) -> ValueMap {
    match t {
        Tree::Leaf { truth, value } => leaf_map(*truth, *value),
        Tree::Not(x) => do_operation(OpKind::Not, &[operate(x)]).unwrap(),
        Tree::And(xs) => do_operation(OpKind::And, &xs.iter().map(operate).collect::<Vec<_>>()).unwrap(),
        Tree::Or(xs) => do_operation(OpKind::Or, &xs.iter().map(operate).collect::<Vec<_>>()).unwrap(),
    }
}

/// Rule bodies over distinct leaf subsections, each answered by a table.
struct Leaves(BTreeMap<String, (f64, Option<u8>)>);

impl Resolver for Leaves {
    fn name(&self) -> String {
        "leaves".into()
    }

    fn resolve(&self, q: &Query<'_>) -> Result<Resolution, String> {
        let mut out = ValueMap::new();
        let (truth, value) = self.0.get(q.subsection_id).copied().unwrap_or((1.0, None));
        for arg in q.required {
            if arg == TRUTH {
                out.set_truth(truth);
            } else if q.is_root {
                out.insert(arg.clone(), Value::text("root")).unwrap();
            } else if let Some(v) = value {
                out.insert(arg.clone(), Value::text(format!("v{v}"))).unwrap();
            }
        }
        Ok(out.into())
    }
}

fn body_of(t: &Tree, leaves: &mut BTreeMap<String, (f64, Option<u8>)>) -> BodyExpr {
    match t {
        Tree::Leaf { truth, value } => {
            let id = format!("L{}", leaves.len());
            leaves.insert(id.clone(), (*truth, *value));
            BodyExpr::reference(id, vec![Binding::same("X")])
        }
        Tree::Not(x) => BodyExpr::Not(Box::new(body_of(x, leaves))),
        Tree::And(xs) => BodyExpr::And(xs.iter().map(|x| body_of(x, leaves)).collect()),
        Tree::Or(xs) => BodyExpr::Or(xs.iter().map(|x| body_of(x, leaves)).collect()),
    }
}

fn corpus(program: Program) -> Corpus {
    Corpus {
        manifest: None,
        subsections: Vec::new(),
        layers: Vec::new(),
        program,
        cases: Vec::new(),
        silver: Vec::new(),
        split: BTreeMap::new(),
    }
}

fn case(query: &str) -> Case {
    Case {
        id: "c".into(),
        description: String::new(),
        query: query.into(),
        inputs: ValueMap::new(),
        expected: ValueMap::new(),
        origin: None,
    }
}

fn engine_root_value(t: &Tree, cap: usize) -> Value {
    let mut leaves = BTreeMap::new();
    let body = body_of(t, &mut leaves);
    let mut program: Program = leaves.keys().map(|id| Rule { head: id.clone(), params: vec!["X".into()], body: None }).collect();
    program.insert(Rule { head: "R".into(), params: vec!["X".into()], body: Some(body) }).unwrap();
    let cfg = EngineConfig { depth_cap: cap, ..Default::default() };
    let out = instantiate_full(&Leaves(leaves), &corpus(program), &case("R"), &cfg).unwrap();
    out.values.get("X").unwrap().clone()
}

fn prune(node: &SubsectionNode, cap: usize) -> SubsectionNode {
    fn walk(n: &DepNode, cap: usize) -> DepNode {
        match n {
            DepNode::Subsection(s) => DepNode::Subsection(prune(s, cap)),
            DepNode::Op(o) => {
                let mut o = o.clone();
                o.children = o.children.iter().map(|c| walk(c, cap)).collect();
                DepNode::Op(o)
            }
        }
    }
    let mut s = node.clone();
    s.child = if s.depth >= cap { None } else { s.child.as_ref().map(|c| Box::new(walk(c, cap))) };
    s
}

/// Rules `N0..Nn` where each body references only later rules.
fn layered_program() -> impl Strategy<Value = Program> {
    (2usize..7).prop_flat_map(|n| {
        prop::collection::vec(prop::option::of((any::<bool>(), prop::collection::vec(0usize..100, 1..=3))), n).prop_map(
            move |bodies| {
                bodies
                    .into_iter()
                    .enumerate()
                    .map(|(i, b)| {
                        let later = n - i - 1;
                        let body = b.filter(|_| later > 0).map(|(is_and, picks)| {
                            let refs: Vec<BodyExpr> = picks
                                .iter()
                                .map(|p| BodyExpr::reference(format!("N{}", i + 1 + p % later), vec![Binding::same("X")]))
                                .collect();
                            match (refs.len(), is_and) {
                                (1, true) => BodyExpr::Not(Box::new(refs.into_iter().next().unwrap())),
                                (1, false) => refs.into_iter().next().unwrap(),
                                (_, true) => BodyExpr::And(refs),
                                (_, false) => BodyExpr::Or(refs),
                            }
                        });
                        Rule { head: format!("N{i}"), params: vec!["X".into()], body }
                    })
                    .collect()
            },
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn operators_match_reference(t in tree()) {
        let (truth, value) = reference(&t);
        let got = operate(&t);
        prop_assert!((got.truth().unwrap() - truth).abs() < 1e-12);
        prop_assert_eq!(got.get("X").cloned(), value.map(Value::text));
    }

    #[test]
    fn engine_follows_operator_semantics(t in tree()) {
        let expected = reference(&t).1.unwrap_or_else(|| "root".into());
        prop_assert_eq!(engine_root_value(&t, 2), Value::text(expected));
        // Without structure the root answers for itself.
        prop_assert_eq!(engine_root_value(&t, 1), Value::text("root"));
    }

    #[test]
    fn not_is_an_involution(t in 0..TRUTHS.len(), v in prop::option::of(0u8..4)) {
        let m = leaf_map(TRUTHS[t], v);
        let twice = do_operation(OpKind::Not, &[do_operation(OpKind::Not, &[m.clone()]).unwrap()]).unwrap();
        prop_assert_eq!(twice.truth(), m.truth());
        prop_assert!(twice.get("X").is_none());
    }

    #[test]
    fn depth_cap_is_monotone(p in layered_program()) {
        let mut prev = 0;
        for cap in 1..=8 {
            let t = build_dependency_tree(&p, "N0", cap).unwrap();
            prop_assert!(t.depth() <= cap);
            prop_assert!(t.depth() >= prev);
            prev = t.depth();
            let next = build_dependency_tree(&p, "N0", cap + 1).unwrap();
            prop_assert_eq!(prune(&next.root, cap), t.root.clone());
        }
        // Past the program's depth a larger cap changes nothing.
        prop_assert_eq!(build_dependency_tree(&p, "N0", 8).unwrap(), build_dependency_tree(&p, "N0", 20).unwrap());
    }
}

#[test]
fn operator_examples_by_hand() {
    let a = leaf_map(0.2, Some(1));
    let b = leaf_map(0.7, Some(2));
    assert_eq!(do_operation(OpKind::Or, &[a.clone(), b.clone()]).unwrap(), b);
    let and = do_operation(OpKind::And, &[a.clone(), b.clone()]).unwrap();
    assert_eq!(and.truth(), Some(0.2));
    assert_eq!(and.get("X"), Some(&Value::text("v1")));
    assert!(do_operation(OpKind::Not, &[a.clone(), b]).is_err());
    assert!(do_operation(OpKind::And, &[a]).is_err());
    let p = parse_program("R(X) :- NOT L0(X).\nL0(X).").unwrap();
    assert_eq!(build_dependency_tree(&p, "R", 2).unwrap().depth(), 2);
}
