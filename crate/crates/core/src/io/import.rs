//! Conversion of JSON-lines annotation dumps into canonical record files.
//!
//! Each input line is one JSON object with an `"id"` member; the remaining
//! members become record fields unchanged in name. JSON values map to
//! literals as follows: strings shaped like `$1,000` become dollar amounts,
//! other strings stay strings, integers stay integers, other numbers become
//! decimals, booleans stay booleans, arrays become lists and objects become
//! maps. Every converted record is then checked with the loader for its
//! kind; lines that fail are skipped and reported, never patched.

use serde_json::Value as Json;

use super::record::{Literal, Record};
use super::{case_from_record, case_to_record, parse_span_list};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImportKind {
    Spans,
    Coref,
    Cases,
    Split,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ImportReport {
    pub records: Vec<Record>,
    /// Line number and reason for every skipped line.
    pub skipped: Vec<(usize, String)>,
}

fn literal(v: &Json) -> Result<Literal, String> {
    Ok(match v {
        Json::Null => return Err("null values are not supported".into()),
        Json::Bool(b) => Literal::Bool(*b),
        Json::Number(n) => match n.as_i64() {
            Some(i) => Literal::Int(i),
            None => Literal::Float(n.as_f64().ok_or("number out of range")?),
        },
        Json::String(s) => match money(s) {
            Some(m) => Literal::Money(m),
            None => Literal::Str(s.clone()),
        },
        Json::Array(xs) => Literal::List(xs.iter().map(literal).collect::<Result<_, _>>()?),
        Json::Object(kvs) => {
            Literal::Map(kvs.iter().map(|(k, v)| Ok((k.clone(), literal(v)?))).collect::<Result<_, String>>()?)
        }
    })
}

fn money(s: &str) -> Option<i64> {
    let (neg, rest) = match s.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, s),
    };
    let digits = rest.strip_prefix('$')?;
    if digits.is_empty() || !digits.starts_with(|c: char| c.is_ascii_digit()) {
        return None;
    }
    if !digits.chars().all(|c| c.is_ascii_digit() || c == ',') {
        return None;
    }
    let n: i64 = digits.replace(',', "").parse().ok()?;
    Some(if neg { -n } else { n })
}

fn check(kind: ImportKind, r: &Record) -> Result<(), String> {
    match kind {
        ImportKind::Spans => parse_span_list(r.get("spans")).map(|_| ()),
        ImportKind::Coref => {
            let ok = r.get("clusters").and_then(Literal::as_list).is_some_and(|cs| {
                cs.iter().all(|c| c.as_list().is_some_and(|c| c.iter().all(|i| i.as_usize().is_some())))
            });
            if !ok {
                return Err("clusters must be a list of lists of span indices".into());
            }
            match r.get("names") {
                Some(n) if !n.as_list().is_some_and(|xs| xs.iter().all(|x| x.as_str().is_some())) => {
                    Err("names must be a list of strings".into())
                }
                _ => Ok(()),
            }
        }
        ImportKind::Cases => case_from_record(r).map(|_| ()),
        ImportKind::Split => match r.get("split").and_then(Literal::as_str) {
            Some("train" | "test") => Ok(()),
            _ => Err("split must be \"train\" or \"test\"".into()),
        },
    }
}

pub fn import_jsonl(kind: ImportKind, text: &str) -> ImportReport {
    let mut report = ImportReport::default();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let converted = serde_json::from_str::<Json>(line)
            .map_err(|e| format!("invalid JSON: {e}"))
            .and_then(|j| {
                let Json::Object(obj) = j else { return Err("expected a JSON object".to_string()) };
                let id = match obj.get("id") {
                    Some(Json::String(s)) if !s.is_empty() => s.clone(),
                    _ => return Err("missing string member \"id\"".to_string()),
                };
                let mut r = Record::new(id);
                for (k, v) in obj.iter().filter(|(k, _)| *k != "id") {
                    r.fields.push((k.clone(), literal(v).map_err(|e| format!("{k}: {e}"))?));
                }
                check(kind, &r)?;
                // Cases are rewritten in canonical field order.
                match kind {
                    ImportKind::Cases => Ok(case_to_record(&case_from_record(&r)?)),
                    _ => Ok(r),
                }
            });
        match converted {
            Ok(r) => report.records.push(r),
            Err(e) => report.skipped.push((i + 1, e)),
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Value;

    #[test]
    fn cases_convert_and_type() {
        let text = r#"{"id": "tax_case_5", "query": "Tax", "description": "...", "inputs": {"Taxy": "2017"}, "expected": {"Tax": "$116,066", "@truth": true}}
{"id": "bad", "query": "Tax"}
not json
"#;
        let rep = import_jsonl(ImportKind::Cases, text);
        assert_eq!(rep.records.len(), 1);
        let c = case_from_record(&rep.records[0]).unwrap();
        assert_eq!(c.expected.get("Tax"), Some(&Value::Money(116066)));
        assert_eq!(rep.skipped.iter().map(|(l, _)| *l).collect::<Vec<_>>(), [2, 3]);
        assert!(rep.records[0].to_string().contains("expected={Tax=$116066, @truth=true}"));
    }

    #[test]
    fn layers_and_split() {
        let rep = import_jsonl(ImportKind::Spans, r#"{"id": "§1(a)", "spans": [[0, 3], [5, 9]]}"#);
        assert_eq!(rep.records[0].to_string(), "§1(a) spans=[[0, 3], [5, 9]]");
        let rep = import_jsonl(ImportKind::Coref, r#"{"id": "§1(a)", "clusters": [[0, "x"]]}"#);
        assert_eq!(rep.skipped.len(), 1);
        let rep = import_jsonl(ImportKind::Split, "{\"id\": \"a\", \"split\": \"dev\"}\n{\"id\": \"b\", \"split\": \"test\"}");
        assert_eq!((rep.records.len(), rep.skipped.len()), (1, 1));
    }
}
