//! Surface syntax: a small Prolog subset with `cofact(Atom).` entries.
//!
//! ```text
//! all_pos([]).
//! all_pos([N|L]) :- N > 0, all_pos(L).
//! cofact(all_pos(_)).
//! ```

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::term::{Atom, Clause, Goal, Program, Query, Term, VarId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{origin}:{line}:{column}: {message}")]
pub struct ParseError {
    pub origin: String,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// Program text together with where it came from, for diagnostics.
#[derive(Debug, Clone)]
pub struct SourceProgram {
    pub text: String,
    pub origin: String,
}

impl SourceProgram {
    pub fn new(text: impl Into<String>, origin: impl Into<String>) -> Self {
        SourceProgram {
            text: text.into(),
            origin: origin.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Var(String),
    Int(i64),
    Sym(&'static str),
    End,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) | Tok::Var(s) => write!(f, "`{s}`"),
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::Sym(s) => write!(f, "`{s}`"),
            Tok::End => f.write_str("`.`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

// longest first
const SYMBOLS: &[&str] = &[
    "=:=", "=\\=", ":-", "?-", "=<", ">=", "\\=", "//", "=", "<", ">", "+", "-", "*", ",", "|",
    "(", ")", "[", "]",
];

const RELATIONS: &[&str] = &["=", "\\=", "<", ">", ">=", "=<", "=:=", "=\\="];

fn lex(text: &str, origin: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut column) = (0usize, 1usize, 1usize);
    let err = |line, column, message: String| ParseError {
        origin: origin.to_string(),
        line,
        column,
        message,
    };

    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            column = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            column += 1;
            continue;
        }
        if c == '%' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let start = (line, column);
        let take_word = |i: &mut usize, column: &mut usize| {
            let begin = *i;
            while *i < chars.len() && (chars[*i].is_alphanumeric() || chars[*i] == '_') {
                *i += 1;
                *column += 1;
            }
            chars[begin..*i].iter().collect::<String>()
        };
        let tok = if c.is_ascii_digit() {
            let word = take_word(&mut i, &mut column);
            let n = word
                .parse::<i64>()
                .map_err(|_| err(start.0, start.1, format!("invalid integer `{word}`")))?;
            Tok::Int(n)
        } else if c.is_lowercase() {
            Tok::Ident(take_word(&mut i, &mut column))
        } else if c.is_uppercase() || c == '_' {
            Tok::Var(take_word(&mut i, &mut column))
        } else if c == '.' {
            i += 1;
            column += 1;
            Tok::End
        } else if let Some(sym) = SYMBOLS
            .iter()
            .find(|s| chars[i..].iter().take(s.len()).copied().eq(s.chars()))
        {
            i += sym.len();
            column += sym.len();
            Tok::Sym(sym)
        } else {
            return Err(err(line, column, format!("unexpected character `{c}`")));
        };
        out.push(Spanned {
            tok,
            line: start.0,
            column: start.1,
        });
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column,
    });
    Ok(out)
}

/// Per-entry variable table.
#[derive(Default)]
struct Scope {
    by_name: HashMap<String, VarId>,
    names: Vec<Option<String>>,
}

impl Scope {
    fn var(&mut self, name: &str) -> Term {
        if name == "_" {
            let id = VarId(self.names.len() as u32);
            self.names.push(None);
            return Term::Var(id);
        }
        if let Some(v) = self.by_name.get(name) {
            return Term::Var(*v);
        }
        let id = VarId(self.names.len() as u32);
        self.names.push(Some(name.to_string()));
        self.by_name.insert(name.to_string(), id);
        Term::Var(id)
    }
}

struct Parser<'a> {
    toks: Vec<Spanned>,
    pos: usize,
    origin: &'a str,
    scope: Scope,
}

impl<'a> Parser<'a> {
    fn new(text: &str, origin: &'a str) -> Result<Self, ParseError> {
        Ok(Parser {
            toks: lex(text, origin)?,
            pos: 0,
            origin,
            scope: Scope::default(),
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn next(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error_here(&self, message: impl Into<String>) -> ParseError {
        self.error_at(&self.toks[self.pos], message)
    }

    fn error_at(&self, at: &Spanned, message: impl Into<String>) -> ParseError {
        ParseError {
            origin: self.origin.to_string(),
            line: at.line,
            column: at.column,
            message: message.into(),
        }
    }

    fn expect_sym(&mut self, sym: &'static str) -> Result<(), ParseError> {
        if *self.peek() == Tok::Sym(sym) {
            self.next();
            Ok(())
        } else {
            Err(self.error_here(format!("expected `{sym}`, found {}", self.peek())))
        }
    }

    fn eat_sym(&mut self, sym: &'static str) -> bool {
        if *self.peek() == Tok::Sym(sym) {
            self.next();
            true
        } else {
            false
        }
    }

    fn expect_end(&mut self) -> Result<(), ParseError> {
        if *self.peek() == Tok::End {
            self.next();
            Ok(())
        } else {
            Err(self.error_here(format!("expected `.`, found {}", self.peek())))
        }
    }

    fn goal_atom(&mut self) -> Result<Atom, ParseError> {
        let start = self.toks[self.pos].clone();
        let lhs = self.expr()?;
        let rel = match self.peek() {
            Tok::Sym(s) if RELATIONS.contains(s) => Some(*s),
            Tok::Ident(s) if s == "is" => Some("is"),
            _ => None,
        };
        if let Some(rel) = rel {
            self.next();
            let rhs = self.expr()?;
            return Ok(Atom::new(rel, vec![lhs, rhs]));
        }
        match lhs {
            Term::Compound(name, args) => Ok(Atom {
                predicate: name,
                args: args.to_vec(),
            }),
            _ => Err(self.error_at(&start, format!("{} is not a callable atom", start.tok))),
        }
    }

    fn body(&mut self) -> Result<Vec<Atom>, ParseError> {
        let mut atoms = vec![self.goal_atom()?];
        while self.eat_sym(",") {
            atoms.push(self.goal_atom()?);
        }
        atoms.retain(|a| !(a.predicate.as_str() == "true" && a.args.is_empty()));
        Ok(atoms)
    }

    fn expr(&mut self) -> Result<Term, ParseError> {
        let mut lhs = self.product()?;
        loop {
            let op = match self.peek() {
                Tok::Sym("+") => "+",
                Tok::Sym("-") => "-",
                _ => return Ok(lhs),
            };
            self.next();
            let rhs = self.product()?;
            lhs = Term::compound(op, vec![lhs, rhs]);
        }
    }

    fn product(&mut self) -> Result<Term, ParseError> {
        let mut lhs = self.primary()?;
        loop {
            let op = match self.peek() {
                Tok::Sym("*") => "*",
                Tok::Sym("//") => "//",
                _ => return Ok(lhs),
            };
            self.next();
            let rhs = self.primary()?;
            lhs = Term::compound(op, vec![lhs, rhs]);
        }
    }

    fn primary(&mut self) -> Result<Term, ParseError> {
        let tok = self.next();
        match tok.tok.clone() {
            Tok::Int(n) => Ok(Term::Int(n)),
            Tok::Sym("-") => match self.next().tok {
                Tok::Int(n) => Ok(Term::Int(-n)),
                _ => Err(self.error_at(&tok, "`-` must be followed by an integer here")),
            },
            Tok::Var(name) => Ok(self.scope.var(&name)),
            Tok::Ident(name) => {
                if self.eat_sym("(") {
                    let mut args = vec![self.expr()?];
                    while self.eat_sym(",") {
                        args.push(self.expr()?);
                    }
                    self.expect_sym(")")?;
                    Ok(Term::compound(&name, args))
                } else {
                    Ok(Term::constant(&name))
                }
            }
            Tok::Sym("[") => {
                if self.eat_sym("]") {
                    return Ok(Term::nil());
                }
                let mut elems = vec![self.expr()?];
                while self.eat_sym(",") {
                    elems.push(self.expr()?);
                }
                let tail = if self.eat_sym("|") {
                    self.expr()?
                } else {
                    Term::nil()
                };
                self.expect_sym("]")?;
                Ok(Term::list(elems, tail))
            }
            Tok::Sym("(") => {
                let inner = self.expr()?;
                self.expect_sym(")")?;
                Ok(inner)
            }
            other => Err(self.error_at(&tok, format!("unexpected {other}"))),
        }
    }
}

enum Entry {
    Clause(Clause),
    Cofact(Atom),
}

fn is_cofact_wrapper(a: &Atom) -> bool {
    a.predicate.as_str() == "cofact" && a.args.len() == 1
}

pub fn parse_program(src: &SourceProgram) -> Result<Program, ParseError> {
    let mut p = Parser::new(&src.text, &src.origin)?;
    let mut program = Program::default();
    while *p.peek() != Tok::Eof {
        p.scope = Scope::default();
        let head_tok = p.toks[p.pos].clone();
        let head = p.goal_atom()?;
        let body = if p.eat_sym(":-") { p.body()? } else { Vec::new() };
        p.expect_end()?;
        let entry = if is_cofact_wrapper(&head) {
            if !body.is_empty() {
                return Err(p.error_at(&head_tok, "co-facts are facts only and cannot have a body"));
            }
            match &head.args[0] {
                Term::Compound(name, args) => Entry::Cofact(Atom {
                    predicate: name.clone(),
                    args: args.to_vec(),
                }),
                _ => return Err(p.error_at(&head_tok, "a co-fact must wrap an atom")),
            }
        } else {
            if crate::builtin::is_builtin(&head) {
                return Err(p.error_at(&head_tok, format!("cannot redefine builtin {}", head.key())));
            }
            let mut c = Clause::rule(head, body);
            c.var_names = std::mem::take(&mut p.scope.names);
            Entry::Clause(c)
        };
        match entry {
            Entry::Clause(c) => program.clauses.push(c),
            Entry::Cofact(a) => program.cofacts.push(a),
        }
    }
    Ok(program)
}

pub fn parse_program_str(text: &str) -> Result<Program, ParseError> {
    parse_program(&SourceProgram::new(text, "<input>"))
}

/// Parses `?- A1, ..., An.`; both the `?-` and the final `.` are optional.
pub fn parse_query(text: &str) -> Result<Query, ParseError> {
    let mut p = Parser::new(text, "<query>")?;
    p.eat_sym("?-");
    let atoms = p.body()?;
    if *p.peek() == Tok::End {
        p.next();
    }
    if *p.peek() != Tok::Eof {
        return Err(p.error_here(format!("unexpected {} after query", p.peek())));
    }
    let var_names = p
        .scope
        .names
        .iter()
        .enumerate()
        .filter_map(|(i, n)| n.as_ref().map(|n| (VarId(i as u32), n.clone())))
        .collect();
    Ok(Query {
        goal: Goal::new(atoms),
        var_names,
        num_vars: p.scope.names.len() as u32,
    })
}
