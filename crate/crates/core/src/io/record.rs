//! Line-oriented record format shared by every annotation file.
//!
//! ```text
//! tax_case_5 query="Tax" inputs={Taxy="2017", Taxp="Alice"} expected={Tax=$116066, @truth=true}
//! ```
//!
//! A record is an identifier followed by `key=value` fields. Values are
//! quoted strings, `$`-prefixed dollar amounts, integers, decimals,
//! `true`/`false`, ISO dates, `[...]` lists and `{key=value, ...}` maps.
//! Blank lines and lines starting with `#` are skipped.

use std::fmt::{self, Write as _};

use chrono::NaiveDate;
use thiserror::Error;

use crate::model::{ModelError, Value, TRUTH};

#[derive(Debug, Clone, PartialEq)]
pub enum Literal {
    Str(String),
    Money(i64),
    Int(i64),
    Float(f64),
    Bool(bool),
    Date(NaiveDate),
    List(Vec<Literal>),
    Map(Vec<(String, Literal)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub id: String,
    pub fields: Vec<(String, Literal)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct RecordError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl Record {
    pub fn new(id: impl Into<String>) -> Self {
        Record { id: id.into(), fields: Vec::new() }
    }

    pub fn with(mut self, key: impl Into<String>, value: Literal) -> Self {
        self.fields.push((key.into(), value));
        self
    }

    pub fn get(&self, key: &str) -> Option<&Literal> {
        self.fields.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }
}

impl fmt::Display for Record {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if needs_quotes(&self.id) {
            write_quoted(f, &self.id)?;
        } else {
            f.write_str(&self.id)?;
        }
        for (k, v) in &self.fields {
            write!(f, " {k}={v}")?;
        }
        Ok(())
    }
}

fn needs_quotes(id: &str) -> bool {
    id.is_empty() || id.starts_with(['"', '#']) || id.chars().any(char::is_whitespace)
}

fn write_quoted(f: &mut impl fmt::Write, s: &str) -> fmt::Result {
    f.write_char('"')?;
    for c in s.chars() {
        match c {
            '"' => f.write_str("\\\"")?,
            '\\' => f.write_str("\\\\")?,
            '\n' => f.write_str("\\n")?,
            '\t' => f.write_str("\\t")?,
            c => f.write_char(c)?,
        }
    }
    f.write_char('"')
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Str(s) => write_quoted(f, s),
            Literal::Money(m) if *m < 0 => write!(f, "-${}", m.unsigned_abs()),
            Literal::Money(m) => write!(f, "${m}"),
            Literal::Int(n) => write!(f, "{n}"),
            Literal::Float(x) if x.fract() == 0.0 && x.is_finite() => write!(f, "{x:.1}"),
            Literal::Float(x) => write!(f, "{x}"),
            Literal::Bool(b) => write!(f, "{b}"),
            Literal::Date(d) => write!(f, "{}", d.format("%Y-%m-%d")),
            Literal::List(xs) => {
                f.write_char('[')?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_char(']')
            }
            Literal::Map(kvs) => {
                f.write_char('{')?;
                for (i, (k, v)) in kvs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{k}={v}")?;
                }
                f.write_char('}')
            }
        }
    }
}

struct Cursor {
    chars: Vec<char>,
    pos: usize,
    line: usize,
}

impl Cursor {
    fn new(src: &str, line: usize) -> Self {
        Cursor { chars: src.chars().collect(), pos: 0, line }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, RecordError> {
        Err(RecordError { line: self.line, column: self.pos + 1, message: message.into() })
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn quoted(&mut self) -> Result<String, RecordError> {
        let start = self.pos;
        self.pos += 1;
        let mut out = String::new();
        loop {
            match self.peek() {
                None => {
                    self.pos = start;
                    return self.err("unterminated string");
                }
                Some('"') => {
                    self.pos += 1;
                    return Ok(out);
                }
                Some('\\') => {
                    self.pos += 1;
                    let c = match self.peek() {
                        Some('"') => '"',
                        Some('\\') => '\\',
                        Some('n') => '\n',
                        Some('t') => '\t',
                        _ => return self.err("unknown escape"),
                    };
                    out.push(c);
                    self.pos += 1;
                }
                Some(c) => {
                    out.push(c);
                    self.pos += 1;
                }
            }
        }
    }

    fn bare(&mut self, stop: impl Fn(char) -> bool) -> String {
        let start = self.pos;
        while self.peek().is_some_and(|c| !c.is_whitespace() && !stop(c)) {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    fn key(&mut self) -> Result<String, RecordError> {
        let k = self.bare(|c| matches!(c, '=' | ',' | '[' | ']' | '{' | '}' | '"'));
        if k.is_empty() {
            return self.err("expected a key");
        }
        Ok(k)
    }

    fn value(&mut self) -> Result<Literal, RecordError> {
        match self.peek() {
            Some('"') => Ok(Literal::Str(self.quoted()?)),
            Some('[') => {
                self.pos += 1;
                let mut items = Vec::new();
                self.skip_ws();
                if self.eat(']') {
                    return Ok(Literal::List(items));
                }
                loop {
                    self.skip_ws();
                    items.push(self.value()?);
                    self.skip_ws();
                    if self.eat(']') {
                        return Ok(Literal::List(items));
                    }
                    if !self.eat(',') {
                        return self.err("expected ',' or ']'");
                    }
                }
            }
            Some('{') => {
                self.pos += 1;
                let mut items: Vec<(String, Literal)> = Vec::new();
                self.skip_ws();
                if self.eat('}') {
                    return Ok(Literal::Map(items));
                }
                loop {
                    self.skip_ws();
                    let at = self.pos;
                    let k = self.key()?;
                    if items.iter().any(|(x, _)| *x == k) {
                        self.pos = at;
                        return self.err(format!("duplicate key {k}"));
                    }
                    if !self.eat('=') {
                        return self.err("expected '='");
                    }
                    items.push((k, self.value()?));
                    self.skip_ws();
                    if self.eat('}') {
                        return Ok(Literal::Map(items));
                    }
                    if !self.eat(',') {
                        return self.err("expected ',' or '}'");
                    }
                }
            }
            Some(_) => {
                let at = self.pos;
                let word = self.bare(|c| matches!(c, ',' | ']' | '}'));
                match scalar(&word) {
                    Some(lit) => Ok(lit),
                    None => {
                        self.pos = at;
                        self.err(format!("untypable value literal {word:?}"))
                    }
                }
            }
            None => self.err("expected a value"),
        }
    }
}

fn scalar(word: &str) -> Option<Literal> {
    match word {
        "true" => return Some(Literal::Bool(true)),
        "false" => return Some(Literal::Bool(false)),
        _ => {}
    }
    let (neg, rest) = match word.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, word),
    };
    let (money, digits) = match rest.strip_prefix('$') {
        Some(r) => (true, r),
        None => (false, rest),
    };
    let is_grouped = !digits.is_empty()
        && digits.starts_with(|c: char| c.is_ascii_digit())
        && digits.chars().all(|c| c.is_ascii_digit() || c == ',');
    if is_grouped {
        let n: i64 = digits.replace(',', "").parse().ok()?;
        let n = if neg { -n } else { n };
        return Some(if money { Literal::Money(n) } else { Literal::Int(n) });
    }
    if money {
        return None;
    }
    if let Ok(d) = NaiveDate::parse_from_str(word, "%Y-%m-%d") {
        return Some(Literal::Date(d));
    }
    if word.contains('.') && word.chars().all(|c| c.is_ascii_digit() || c == '.' || c == '-') {
        return word.parse().ok().map(Literal::Float);
    }
    None
}

/// Parses a single non-blank, non-comment line.
pub fn parse_record(line: &str, line_no: usize) -> Result<Record, RecordError> {
    let mut c = Cursor::new(line, line_no);
    c.skip_ws();
    let id = if c.peek() == Some('"') { c.quoted()? } else { c.bare(|_| false) };
    if id.is_empty() {
        return c.err("missing record id");
    }
    let mut fields: Vec<(String, Literal)> = Vec::new();
    loop {
        let had_ws = c.peek().is_some_and(char::is_whitespace);
        c.skip_ws();
        if c.peek().is_none() {
            break;
        }
        if !had_ws {
            return c.err("expected whitespace between fields");
        }
        let at = c.pos;
        let k = c.key()?;
        if fields.iter().any(|(x, _)| *x == k) {
            c.pos = at;
            return c.err(format!("duplicate field {k}"));
        }
        if !c.eat('=') {
            return c.err("expected '='");
        }
        fields.push((k, c.value()?));
    }
    Ok(Record { id, fields })
}

/// Every record of a file with its 1-based line number.
pub fn parse_records(text: &str) -> Result<Vec<(usize, Record)>, Vec<RecordError>> {
    let mut out = Vec::new();
    let mut errors = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim_start();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        match parse_record(line, i + 1) {
            Ok(r) => out.push((i + 1, r)),
            Err(e) => errors.push(e),
        }
    }
    if errors.is_empty() {
        Ok(out)
    } else {
        Err(errors)
    }
}

pub fn write_records<'a>(records: impl IntoIterator<Item = &'a Record>) -> String {
    let mut out = String::new();
    for r in records {
        let _ = writeln!(out, "{r}");
    }
    out
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TypeError {
    #[error("a map cannot be used as a value")]
    Map,
    #[error("{0} is not a truth score in [0, 1]")]
    Float(f64),
    #[error(transparent)]
    Model(#[from] ModelError),
}

impl Literal {
    pub fn to_value(&self) -> Result<Value, TypeError> {
        Ok(match self {
            Literal::Str(s) => Value::Text(s.clone()),
            Literal::Money(m) => Value::Money(*m),
            Literal::Int(n) => Value::Number(*n),
            Literal::Float(x) if (0.0..=1.0).contains(x) => Value::TruthScore(*x),
            Literal::Float(x) => return Err(TypeError::Float(*x)),
            Literal::Bool(b) => Value::TruthScore(if *b { 1.0 } else { 0.0 }),
            Literal::Date(d) => Value::Date(*d),
            Literal::List(xs) => Value::list(xs.iter().map(Literal::to_value).collect::<Result<_, _>>()?)?,
            Literal::Map(_) => return Err(TypeError::Map),
        })
    }

    pub fn from_value(v: &Value) -> Literal {
        match v {
            Value::Text(s) => Literal::Str(s.clone()),
            Value::Money(m) => Literal::Money(*m),
            Value::Number(n) => Literal::Int(*n),
            Value::Date(d) => Literal::Date(*d),
            Value::TruthScore(t) if *t == 1.0 => Literal::Bool(true),
            Value::TruthScore(t) if *t == 0.0 => Literal::Bool(false),
            Value::TruthScore(t) => Literal::Float(*t),
            Value::List(xs) => Literal::List(xs.iter().map(Literal::from_value).collect()),
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Literal::Str(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_usize(&self) -> Option<usize> {
        match self {
            Literal::Int(n) => usize::try_from(*n).ok(),
            _ => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Literal]> {
        match self {
            Literal::List(xs) => Some(xs),
            _ => None,
        }
    }

    pub fn as_map(&self) -> Option<&[(String, Literal)]> {
        match self {
            Literal::Map(kvs) => Some(kvs),
            _ => None,
        }
    }
}

/// A map literal as a typed value map.
pub fn literal_to_value_map(lit: &Literal) -> Result<crate::ValueMap, String> {
    let kvs = lit.as_map().ok_or("expected a {key=value, ...} map")?;
    let mut out = crate::ValueMap::new();
    for (k, v) in kvs {
        let v = v.to_value().map_err(|e| format!("{k}: {e}"))?;
        if k == TRUTH && v.as_truth().is_none() {
            return Err(format!("{TRUTH} must be true, false or a score in [0, 1]"));
        }
        out.insert(k.clone(), v).map_err(|e| format!("{k}: {e}"))?;
    }
    Ok(out)
}

pub fn value_map_to_literal(map: &crate::ValueMap) -> Literal {
    Literal::Map(map.iter().map(|(k, v)| (k.to_string(), Literal::from_value(v))).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn case_line() {
        let line = r#"tax_case_5 query="Tax" inputs={Taxy="2017", Taxp="Alice"} expected={Tax=$116066, @truth=true}"#;
        let r = parse_record(line, 1).unwrap();
        assert_eq!(r.id, "tax_case_5");
        assert_eq!(r.get("query"), Some(&Literal::Str("Tax".into())));
        let expected = literal_to_value_map(r.get("expected").unwrap()).unwrap();
        assert_eq!(expected.get("Tax"), Some(&Value::Money(116066)));
        assert_eq!(expected.truth(), Some(1.0));
        assert_eq!(r.to_string(), line);
    }

    #[test]
    fn scalars() {
        assert_eq!(scalar("$1,000"), Some(Literal::Money(1000)));
        assert_eq!(scalar("-$5"), Some(Literal::Money(-5)));
        assert_eq!(scalar("42"), Some(Literal::Int(42)));
        assert_eq!(scalar("0.25"), Some(Literal::Float(0.25)));
        assert_eq!(scalar("2017-02-03"), NaiveDate::from_ymd_opt(2017, 2, 3).map(Literal::Date));
        assert_eq!(scalar("Alice"), None);
        assert_eq!(scalar("$"), None);
        assert_eq!(Literal::Float(1.0).to_string(), "1.0");
    }

    #[test]
    fn nested_lists_and_quoted_ids() {
        let r = parse_record(r#"§1(d)(iv) spans=[[5, 50], [54,72]]"#, 3).unwrap();
        assert_eq!(r.get("spans").unwrap().as_list().unwrap().len(), 2);
        let r = Record::new("has space").with("x", Literal::Str("a \"q\"\n".into()));
        assert_eq!(parse_record(&r.to_string(), 1).unwrap(), r);
    }

    #[test]
    fn errors_point_at_the_problem() {
        let e = parse_record("x a=Alice", 7).unwrap_err();
        assert_eq!((e.line, e.column), (7, 5));
        assert!(e.message.contains("untypable"));
        assert!(parse_record("x a=1 a=2", 1).unwrap_err().message.contains("duplicate field a"));
        assert!(parse_record("x a=\"open", 1).unwrap_err().message.contains("unterminated"));
        assert!(parse_record("x a=[1, 2", 1).is_err());
        assert!(parse_record("x a=1b=2", 1).is_err());
        let errs = parse_records("# c\n\nok a=1\nbad a=?\nbad2 b=[\n").unwrap_err();
        assert_eq!(errs.iter().map(|e| e.line).collect::<Vec<_>>(), [4, 5]);
    }

    #[test]
    fn typing() {
        assert_eq!(Literal::Bool(false).to_value().unwrap(), Value::TruthScore(0.0));
        assert!(Literal::Float(1.5).to_value().is_err());
        assert!(Literal::List(vec![Literal::Int(1), Literal::Str("a".into())]).to_value().is_err());
        assert!(literal_to_value_map(&parse_record("x m={@truth=\"yes\"}", 1).unwrap().fields[0].1).is_err());
    }

    fn arb_literal() -> impl Strategy<Value = Literal> {
        let leaf = prop_oneof![
            "[ -~\u{a7}é]{0,12}".prop_map(Literal::Str),
            any::<i32>().prop_map(|n| Literal::Money(n as i64)),
            any::<i32>().prop_map(|n| Literal::Int(n as i64)),
            (0u32..1000).prop_map(|n| Literal::Float(n as f64 / 1000.0)),
            any::<bool>().prop_map(Literal::Bool),
            (1900i32..2100, 1u32..13, 1u32..29)
                .prop_map(|(y, m, d)| Literal::Date(NaiveDate::from_ymd_opt(y, m, d).unwrap())),
        ];
        leaf.prop_recursive(3, 24, 4, |inner| {
            prop_oneof![
                prop::collection::vec(inner.clone(), 0..4).prop_map(Literal::List),
                prop::collection::btree_map("[A-Za-z@][A-Za-z0-9_]{0,6}", inner, 0..4)
                    .prop_map(|m| Literal::Map(m.into_iter().collect())),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(
            id in "[A-Za-z0-9§()_.-]{1,12}",
            fields in prop::collection::btree_map("[A-Za-z@][A-Za-z0-9_]{0,6}", arb_literal(), 0..5),
        ) {
            let r = Record { id, fields: fields.into_iter().collect() };
            let line = r.to_string();
            let back = parse_record(&line, 1).unwrap();
            prop_assert_eq!(back.to_string(), line);
            prop_assert_eq!(back, r);
        }
    }
}
