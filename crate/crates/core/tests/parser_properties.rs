use proptest::prelude::*;
use sara_core::structure::{parse_program, parse_rule, Binding, BodyExpr, Rule};

fn name() -> impl Strategy<Value = String> {
    prop_oneof![
        "[A-Z][a-z]{0,6}",
        "S[0-9]{1,2}[A-C]?",
    ]
}

fn section() -> impl Strategy<Value = String> {
    ("[0-9]{1,4}", prop::collection::vec("[a-z]{1,3}|[0-9]{1,2}|[A-H]", 0..4))
        .prop_map(|(n, groups)| {
            let mut id = format!("§{n}");
            for g in groups {
                id.push_str(&format!("({g})"));
            }
            id
        })
}

fn reference() -> impl Strategy<Value = BodyExpr> {
    (section(), prop::collection::vec((name(), prop::option::of(name())), 0..4)).prop_map(|(callee, args)| {
        let bindings = args
            .into_iter()
            .map(|(p, v)| match v {
                Some(v) => Binding::new(p, v),
                None => Binding::same(p),
            })
            .collect();
        BodyExpr::reference(callee, bindings)
    })
}

fn body() -> impl Strategy<Value = BodyExpr> {
    reference().prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..=3).prop_map(BodyExpr::And),
            prop::collection::vec(inner.clone(), 2..=3).prop_map(BodyExpr::Or),
            inner.prop_map(|x| BodyExpr::Not(Box::new(x))),
        ]
    })
}

fn rule() -> impl Strategy<Value = Rule> {
    (section(), prop::collection::btree_set(name(), 0..6), prop::option::of(body())).prop_map(|(head, params, body)| Rule {
        head,
        params: params.into_iter().collect(),
        body,
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn print_parse_print_is_a_fixpoint(r in rule()) {
        let printed = r.to_string();
        let back = parse_rule(&printed).unwrap();
        prop_assert_eq!(&back, &r);
        prop_assert_eq!(back.to_string(), printed);
    }

    #[test]
    fn programs_round_trip(rules in prop::collection::vec(rule(), 0..6)) {
        let mut text = String::new();
        let mut heads = std::collections::BTreeSet::new();
        for r in rules.iter().filter(|r| heads.insert(r.head.clone())) {
            text.push_str(&r.to_string());
            text.push('\n');
        }
        let p = parse_program(&text).unwrap();
        prop_assert_eq!(p.len(), heads.len());
        for r in p.rules() {
            prop_assert_eq!(parse_rule(&r.to_string()).unwrap(), r.clone());
        }
    }
}

#[test]
fn fixture_clauses_round_trip() {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/mini/structure.pl")).unwrap();
    let program = parse_program(&text).unwrap();
    assert_eq!(program.len(), 12);
    for r in program.rules() {
        let printed = r.to_string();
        assert_eq!(parse_rule(&printed).unwrap().to_string(), printed);
    }
}
