use std::fmt;

use thiserror::Error;

use super::{Binding, BodyExpr, Program, Rule};

/// Syntax error with a 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// Errors collected while parsing a whole structure file.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ProgramError {
    pub errors: Vec<(usize, ProgramErrorKind)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProgramErrorKind {
    Syntax(ParseError),
    DuplicateHead(String),
}

impl fmt::Display for ProgramError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (clause, kind)) in self.errors.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            match kind {
                ProgramErrorKind::Syntax(e) => write!(f, "clause {clause}: {e}")?,
                ProgramErrorKind::DuplicateHead(h) => write!(f, "clause {clause}: duplicate definition of {h}")?,
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    /// Identifier text up to the first `(` or delimiter.
    Word(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Eq,
    Neck,
    Dot,
    And,
    Or,
    Not,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Word(w) => write!(f, "{w:?}"),
            Tok::LParen => f.write_str("'('"),
            Tok::RParen => f.write_str("')'"),
            Tok::LBracket => f.write_str("'['"),
            Tok::RBracket => f.write_str("']'"),
            Tok::Comma => f.write_str("','"),
            Tok::Eq => f.write_str("'='"),
            Tok::Neck => f.write_str("':-'"),
            Tok::Dot => f.write_str("'.'"),
            Tok::And => f.write_str("AND"),
            Tok::Or => f.write_str("OR"),
            Tok::Not => f.write_str("NOT"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn is_word_char(c: char) -> bool {
    !c.is_whitespace() && !matches!(c, '(' | ')' | '[' | ']' | ',' | '=' | '.' | ':' | '%')
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut column) = (1, 1);
    let mut at_line_start = true;
    while let Some(&c) = chars.peek() {
        let (tl, tc) = (line, column);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars<'_>>| {
            let c = chars.next().unwrap();
            if c == '\n' {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
            c
        };
        if c == '%' && at_line_start {
            while let Some(&c) = chars.peek() {
                if c == '\n' {
                    break;
                }
                bump(&mut chars);
            }
            continue;
        }
        if c.is_whitespace() {
            if bump(&mut chars) == '\n' {
                at_line_start = true;
            }
            continue;
        }
        at_line_start = false;
        let simple = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            ',' => Some(Tok::Comma),
            '=' => Some(Tok::Eq),
            '.' => Some(Tok::Dot),
            _ => None,
        };
        if let Some(tok) = simple {
            bump(&mut chars);
            out.push(Token { tok, line: tl, column: tc });
            continue;
        }
        if c == ':' {
            bump(&mut chars);
            if chars.peek() == Some(&'-') {
                bump(&mut chars);
                out.push(Token { tok: Tok::Neck, line: tl, column: tc });
                continue;
            }
            return Err(ParseError { line: tl, column: tc, message: "expected ':-'".into() });
        }
        if c == '%' {
            return Err(ParseError { line: tl, column: tc, message: "'%' comments must start a line".into() });
        }
        let mut word = String::new();
        while let Some(&c) = chars.peek() {
            if !is_word_char(c) {
                break;
            }
            word.push(bump(&mut chars));
        }
        let tok = match word.as_str() {
            "AND" => Tok::And,
            "OR" => Tok::Or,
            "NOT" => Tok::Not,
            _ => Tok::Word(word),
        };
        out.push(Token { tok, line: tl, column: tc });
    }
    Ok(out)
}

struct Parser<'a> {
    toks: &'a [Token],
    pos: usize,
    /// Position reported when input ends.
    eof: (usize, usize),
}

/// A parsed `id(group)...(args)` term, args still raw.
struct Term {
    id: String,
    args: Vec<(String, Option<String>)>,
    line: usize,
    column: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks.get(self.pos).map_or(self.eof, |t| (t.line, t.column))
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        let (line, column) = self.here();
        Err(ParseError { line, column, message: message.into() })
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if *t == tok => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => self.error(format!("expected {tok}, found {t}")),
            None => self.error(format!("expected {tok}, found end of input")),
        }
    }

    fn word(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Word(w)) => {
                let w = w.clone();
                self.pos += 1;
                Ok(w)
            }
            Some(t) => self.error(format!("expected {what}, found {t}")),
            None => self.error(format!("expected {what}, found end of input")),
        }
    }

    /// Contents of one parenthesized group as comma-separated items, each
    /// either `name` or `name=name`.
    fn group(&mut self) -> Result<Vec<(String, Option<String>)>, ParseError> {
        self.expect(Tok::LParen)?;
        let mut items = Vec::new();
        if self.peek() == Some(&Tok::RParen) {
            self.pos += 1;
            return Ok(items);
        }
        loop {
            let name = self.word("a name")?;
            let value = if self.peek() == Some(&Tok::Eq) {
                self.pos += 1;
                Some(self.word("a variable name")?)
            } else {
                None
            };
            items.push((name, value));
            match self.peek() {
                Some(Tok::Comma) => self.pos += 1,
                Some(Tok::RParen) => {
                    self.pos += 1;
                    return Ok(items);
                }
                Some(t) => return self.error(format!("expected ',' or ')', found {t}")),
                None => return self.error("unclosed '('"),
            }
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let (line, column) = self.here();
        let mut id = self.word("a section identifier")?;
        let mut groups = Vec::new();
        while self.peek() == Some(&Tok::LParen) {
            groups.push(self.group()?);
        }
        let Some(args) = groups.pop() else {
            return Err(ParseError { line, column, message: format!("{id} has no argument list") });
        };
        for g in groups {
            // Identifier groups hold a single bare label, e.g. "(c)".
            match g.as_slice() {
                [(label, None)] => {
                    id.push('(');
                    id.push_str(label);
                    id.push(')');
                }
                _ => {
                    return Err(ParseError {
                        line,
                        column,
                        message: format!("malformed identifier group after {id}"),
                    })
                }
            }
        }
        Ok(Term { id, args, line, column })
    }

    fn or_expr(&mut self) -> Result<BodyExpr, ParseError> {
        let mut items = vec![self.and_expr()?];
        while self.peek() == Some(&Tok::Or) {
            self.pos += 1;
            items.push(self.and_expr()?);
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { BodyExpr::Or(items) })
    }

    fn and_expr(&mut self) -> Result<BodyExpr, ParseError> {
        let mut items = vec![self.unary()?];
        while self.peek() == Some(&Tok::And) {
            self.pos += 1;
            items.push(self.unary()?);
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { BodyExpr::And(items) })
    }

    fn unary(&mut self) -> Result<BodyExpr, ParseError> {
        match self.peek() {
            Some(Tok::Not) => {
                self.pos += 1;
                Ok(BodyExpr::Not(Box::new(self.unary()?)))
            }
            Some(Tok::LBracket) => {
                self.pos += 1;
                let inner = self.or_expr()?;
                self.expect(Tok::RBracket)?;
                Ok(inner)
            }
            _ => {
                let t = self.term()?;
                let bindings = t
                    .args
                    .into_iter()
                    .map(|(p, v)| match v {
                        Some(v) => Binding::new(p, v),
                        None => Binding::same(p),
                    })
                    .collect();
                Ok(BodyExpr::Ref { callee: t.id, bindings })
            }
        }
    }

    fn clause(&mut self) -> Result<Rule, ParseError> {
        let head = self.term()?;
        let mut params: Vec<String> = Vec::with_capacity(head.args.len());
        for (name, value) in head.args {
            if value.is_some() {
                return Err(ParseError {
                    line: head.line,
                    column: head.column,
                    message: format!("head parameter {name} of {} cannot carry a binding", head.id),
                });
            }
            if params.contains(&name) {
                return Err(ParseError {
                    line: head.line,
                    column: head.column,
                    message: format!("duplicate parameter {name} in {}", head.id),
                });
            }
            params.push(name);
        }
        let body = if self.peek() == Some(&Tok::Neck) {
            self.pos += 1;
            Some(self.or_expr()?)
        } else {
            None
        };
        self.expect(Tok::Dot)?;
        Ok(Rule { head: head.id, params, body })
    }
}

fn eof_position(text: &str) -> (usize, usize) {
    let line = text.matches('\n').count() + 1;
    let column = text.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

/// Parses exactly one clause terminated by `.`.
pub fn parse_rule(text: &str) -> Result<Rule, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks: &toks, pos: 0, eof: eof_position(text) };
    if p.peek().is_none() {
        return p.error("empty clause");
    }
    let rule = p.clause()?;
    if p.peek().is_some() {
        return p.error("unexpected text after clause");
    }
    Ok(rule)
}

/// Parses zero or more clauses. Syntax errors skip to the next `.` so every
/// bad clause is reported; duplicate heads are errors too.
pub fn parse_program(text: &str) -> Result<Program, ProgramError> {
    let toks = lex(text).map_err(|e| ProgramError { errors: vec![(1, ProgramErrorKind::Syntax(e))] })?;
    let mut p = Parser { toks: &toks, pos: 0, eof: eof_position(text) };
    let mut program = Program::new();
    let mut errors = Vec::new();
    let mut clause_no = 0;
    while p.peek().is_some() {
        clause_no += 1;
        match p.clause() {
            Ok(rule) => {
                if let Err(rule) = program.insert(rule) {
                    errors.push((clause_no, ProgramErrorKind::DuplicateHead(rule.head)));
                }
            }
            Err(e) => {
                errors.push((clause_no, ProgramErrorKind::Syntax(e)));
                while let Some(t) = p.peek() {
                    let dot = *t == Tok::Dot;
                    p.pos += 1;
                    if dot {
                        break;
                    }
                }
            }
        }
    }
    if errors.is_empty() {
        Ok(program)
    } else {
        Err(ProgramError { errors })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const DEDUCTION_CLAUSE: &str = "§63(c)(5)(Bassd, Grossinc, S45, Taxp, Taxy,
          S44B, S46B, S47, S48) :-
    [
        §151(b)(Spouse=Taxp, Taxp=S45, Taxy) OR
        §151(c)(S24A=Taxp, Taxp=S45, Taxy)
    ] AND
    §63(c)(5)(A)() AND
    §63(c)(5)(B)(Grossinc, Taxp).";

    fn b(p: &str, v: &str) -> Binding {
        Binding::new(p, v)
    }

    #[test]
    fn leaf_clause() {
        let r = parse_rule("§1(d)(iv)(Tax, Taxinc).").unwrap();
        assert_eq!(r.head, "§1(d)(iv)");
        assert_eq!(r.params, ["Tax", "Taxinc"]);
        assert_eq!(r.body, None);
    }

    #[test]
    fn single_reference_body() {
        let r = parse_rule(
            "§3306(a)(1)(B)(Caly, S16, Workday, Employment, Preccaly, Employee, S13A, Employer, Service) :- §3306(c)(Employee, Employer, Service).",
        )
        .unwrap();
        assert_eq!(r.params.len(), 9);
        assert_eq!(
            r.body,
            Some(BodyExpr::reference(
                "§3306(c)",
                vec![b("Employee", "Employee"), b("Employer", "Employer"), b("Service", "Service")]
            ))
        );
    }

    #[test]
    fn bracketed_disjunction_inside_conjunction() {
        let r = parse_rule(DEDUCTION_CLAUSE).unwrap();
        assert_eq!(r.head, "§63(c)(5)");
        assert_eq!(r.params, ["Bassd", "Grossinc", "S45", "Taxp", "Taxy", "S44B", "S46B", "S47", "S48"]);
        let expected = BodyExpr::And(vec![
            BodyExpr::Or(vec![
                BodyExpr::reference("§151(b)", vec![b("Spouse", "Taxp"), b("Taxp", "S45"), b("Taxy", "Taxy")]),
                BodyExpr::reference("§151(c)", vec![b("S24A", "Taxp"), b("Taxp", "S45"), b("Taxy", "Taxy")]),
            ]),
            BodyExpr::reference("§63(c)(5)(A)", vec![]),
            BodyExpr::reference("§63(c)(5)(B)", vec![b("Grossinc", "Grossinc"), b("Taxp", "Taxp")]),
        ]);
        assert_eq!(r.body, Some(expected));
    }

    #[test]
    fn precedence_not_and_or() {
        let r = parse_rule("X(A) :- NOT p(A) AND q(A) OR r(A).").unwrap();
        let p = BodyExpr::reference("p", vec![Binding::same("A")]);
        let q = BodyExpr::reference("q", vec![Binding::same("A")]);
        let rr = BodyExpr::reference("r", vec![Binding::same("A")]);
        assert_eq!(r.body, Some(BodyExpr::Or(vec![BodyExpr::And(vec![BodyExpr::Not(Box::new(p)), q]), rr])));
    }

    #[test]
    fn bare_identifier_heads_are_allowed() {
        let r = parse_rule("Tax(Tax, Taxp, Taxy).").unwrap();
        assert_eq!(r.head, "Tax");
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let e = parse_rule("§1(a)(X) :- §2(X)").unwrap_err();
        assert_eq!((e.line, e.column), (1, 18));
        let e = parse_rule("§1(a)(X) :-\n   AND §2(X).").unwrap_err();
        assert_eq!((e.line, e.column), (2, 4));
        assert!(parse_rule("§1(a)(X, X).").unwrap_err().message.contains("duplicate parameter X"));
        assert!(parse_rule("").unwrap_err().message.contains("empty"));
        assert!(parse_rule("(X).").is_err());
        assert!(parse_rule("§1 :- §2(X).").unwrap_err().message.contains("no argument list"));
    }

    #[test]
    fn programs() {
        assert!(parse_program("").unwrap().is_empty());
        let all = format!(
            "% comment line\n§3306(a)(1)(B)(Caly, Employee, Employer, Service) :- §3306(c)(Employee, Employer, Service).\n{DEDUCTION_CLAUSE}\n§1(d)(iv)(Tax, Taxinc).\n"
        );
        assert_eq!(parse_program(&all).unwrap().len(), 3);

        let err = parse_program("§1(a)(X).\n§1(a)(Y).").unwrap_err();
        assert_eq!(err.errors, vec![(2, ProgramErrorKind::DuplicateHead("§1(a)".into()))]);
        assert!(err.to_string().contains("§1(a)"));

        let err = parse_program("§1(a)(X :- .\n§2(Y).\n§3(Z) :- .").unwrap_err();
        let clauses: Vec<usize> = err.errors.iter().map(|(c, _)| *c).collect();
        assert_eq!(clauses, [1, 3]);
    }

    #[test]
    fn printed_fixture_clauses_reparse() {
        for text in ["§1(d)(iv)(Tax, Taxinc).", DEDUCTION_CLAUSE, "X(A) :- NOT [p(A) OR q(B=A)] AND r()."] {
            let r = parse_rule(text).unwrap();
            let printed = r.to_string();
            assert_eq!(parse_rule(&printed).unwrap(), r, "{printed}");
        }
    }
}
