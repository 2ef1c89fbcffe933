//! Horn-clause structure annotations.
//!
//! A clause names a subsection, lists its parameters and optionally gives a
//! body combining references to other subsections with `AND`, `OR`, `NOT`
//! and `[...]` grouping:
//!
//! ```text
//! §63(c)(5)(Bassd, Grossinc, S45, Taxp, Taxy) :-
//!     [ §151(b)(Spouse=Taxp, Taxp=S45, Taxy) OR §151(c)(S24A=Taxp, Taxp=S45, Taxy) ] AND
//!     §63(c)(5)(A)() AND
//!     §63(c)(5)(B)(Grossinc, Taxp).
//! ```
//!
//! The last parenthesized group of a term is always its argument list; every
//! earlier group belongs to the section identifier.

mod parser;
mod tree;

use std::collections::BTreeMap;
use std::fmt;

pub use parser::{parse_program, parse_rule, ParseError, ProgramError, ProgramErrorKind};
pub use tree::{build_dependency_tree, DepNode, DepTree, OpNode, SubsectionNode, TreeError};

/// Passes the caller's `caller_var` into the callee's `callee_param`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Binding {
    pub callee_param: String,
    pub caller_var: String,
}

impl Binding {
    pub fn new(callee_param: impl Into<String>, caller_var: impl Into<String>) -> Self {
        Binding { callee_param: callee_param.into(), caller_var: caller_var.into() }
    }

    pub fn same(name: impl Into<String>) -> Self {
        let name = name.into();
        Binding { callee_param: name.clone(), caller_var: name }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OpKind {
    And,
    Or,
    Not,
}

impl fmt::Display for OpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OpKind::And => "AND",
            OpKind::Or => "OR",
            OpKind::Not => "NOT",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BodyExpr {
    Ref { callee: String, bindings: Vec<Binding> },
    And(Vec<BodyExpr>),
    Or(Vec<BodyExpr>),
    Not(Box<BodyExpr>),
}

impl BodyExpr {
    pub fn reference(callee: impl Into<String>, bindings: Vec<Binding>) -> Self {
        BodyExpr::Ref { callee: callee.into(), bindings }
    }

    /// All references in left-to-right order.
    pub fn refs(&self) -> Vec<(&str, &[Binding])> {
        let mut out = Vec::new();
        self.collect_refs(&mut out);
        out
    }

    fn collect_refs<'a>(&'a self, out: &mut Vec<(&'a str, &'a [Binding])>) {
        match self {
            BodyExpr::Ref { callee, bindings } => out.push((callee, bindings)),
            BodyExpr::And(xs) | BodyExpr::Or(xs) => xs.iter().for_each(|x| x.collect_refs(out)),
            BodyExpr::Not(x) => x.collect_refs(out),
        }
    }

    fn fmt_child(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BodyExpr::Ref { .. } | BodyExpr::Not(_) => write!(f, "{self}"),
            _ => write!(f, "[{self}]"),
        }
    }
}

impl fmt::Display for BodyExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BodyExpr::Ref { callee, bindings } => {
                write!(f, "{callee}(")?;
                for (i, b) in bindings.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    if b.callee_param == b.caller_var {
                        f.write_str(&b.callee_param)?;
                    } else {
                        write!(f, "{}={}", b.callee_param, b.caller_var)?;
                    }
                }
                f.write_str(")")
            }
            BodyExpr::And(xs) | BodyExpr::Or(xs) => {
                let op = if matches!(self, BodyExpr::And(_)) { " AND " } else { " OR " };
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(op)?;
                    }
                    x.fmt_child(f)?;
                }
                Ok(())
            }
            BodyExpr::Not(x) => {
                f.write_str("NOT ")?;
                x.fmt_child(f)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub head: String,
    pub params: Vec<String>,
    pub body: Option<BodyExpr>,
}

impl Rule {
    /// Number of subsection references in the body.
    pub fn dependency_count(&self) -> usize {
        self.body.as_ref().map_or(0, |b| b.refs().len())
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.head, self.params.join(", "))?;
        if let Some(body) = &self.body {
            write!(f, " :- {body}")?;
        }
        f.write_str(".")
    }
}

/// Rule base keyed by section identifier.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Program {
    rules: BTreeMap<String, Rule>,
}

impl Program {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a rule; returns it back if its head is already defined.
    pub fn insert(&mut self, rule: Rule) -> Result<(), Rule> {
        if self.rules.contains_key(&rule.head) {
            return Err(rule);
        }
        self.rules.insert(rule.head.clone(), rule);
        Ok(())
    }

    pub fn get(&self, id: &str) -> Option<&Rule> {
        self.rules.get(id)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.rules.contains_key(id)
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn rules(&self) -> impl Iterator<Item = &Rule> {
        self.rules.values()
    }
}

impl FromIterator<Rule> for Program {
    /// Later rules with an already-seen head are dropped.
    fn from_iter<I: IntoIterator<Item = Rule>>(iter: I) -> Self {
        let mut p = Program::new();
        for r in iter {
            let _ = p.insert(r);
        }
        p
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Diagnostic {
    UndefinedCallee { rule: String, callee: String },
    UnboundVariable { rule: String, callee: String, var: String },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::UndefinedCallee { rule, callee } => {
                write!(f, "{rule}: reference to undefined subsection {callee}")
            }
            Diagnostic::UnboundVariable { rule, callee, var } => {
                write!(f, "{rule}: binding for {callee} uses {var}, which is not a parameter of {rule}")
            }
        }
    }
}

/// Reports references to undefined subsections and bindings whose caller
/// variable is not a parameter of the enclosing rule.
pub fn check_references(program: &Program) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for rule in program.rules() {
        let Some(body) = &rule.body else { continue };
        for (callee, bindings) in body.refs() {
            if !program.contains(callee) {
                out.push(Diagnostic::UndefinedCallee { rule: rule.head.clone(), callee: callee.to_string() });
            }
            for b in bindings {
                if !rule.params.contains(&b.caller_var) {
                    out.push(Diagnostic::UnboundVariable {
                        rule: rule.head.clone(),
                        callee: callee.to_string(),
                        var: b.caller_var.clone(),
                    });
                }
            }
        }
    }
    out
}
