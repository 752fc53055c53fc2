//! Prolog-style rendering of finite terms: list sugar and infix operators.

use std::fmt;

use crate::term::{Atom, Clause, Term, VarId, CONS, NIL};

/// Infix operators with their priority; all are left-associative or
/// non-associative.
const INFIX: &[(&str, u32)] = &[
    ("=", 700),
    ("\\=", 700),
    ("<", 700),
    (">", 700),
    (">=", 700),
    ("=<", 700),
    ("=:=", 700),
    ("=\\=", 700),
    ("is", 700),
    ("+", 500),
    ("-", 500),
    ("*", 400),
    ("//", 400),
];

fn priority(t: &Term) -> Option<u32> {
    match t {
        Term::Compound(name, args) if args.len() == 2 => INFIX
            .iter()
            .find(|(op, _)| *op == name.as_str())
            .map(|(_, p)| *p),
        _ => None,
    }
}

/// Displays a term, naming variables through `names`.
pub struct TermDisplay<'a, F: Fn(VarId) -> String> {
    term: &'a Term,
    names: &'a F,
}

impl<'a, F: Fn(VarId) -> String> TermDisplay<'a, F> {
    pub fn new(term: &'a Term, names: &'a F) -> Self {
        TermDisplay { term, names }
    }
}

impl<F: Fn(VarId) -> String> fmt::Display for TermDisplay<'_, F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_term(f, self.term, self.names)
    }
}

fn write_term<F: Fn(VarId) -> String>(
    f: &mut fmt::Formatter<'_>,
    t: &Term,
    names: &F,
) -> fmt::Result {
    match t {
        Term::Var(v) => f.write_str(&names(*v)),
        Term::Int(n) => write!(f, "{n}"),
        Term::Compound(name, args) if name.as_str() == CONS && args.len() == 2 => {
            f.write_str("[")?;
            write_term(f, &args[0], names)?;
            let mut tail = &args[1];
            loop {
                match tail {
                    Term::Compound(n, a) if n.as_str() == CONS && a.len() == 2 => {
                        f.write_str(", ")?;
                        write_term(f, &a[0], names)?;
                        tail = &a[1];
                    }
                    Term::Compound(n, a) if n.as_str() == NIL && a.is_empty() => break,
                    other => {
                        f.write_str("|")?;
                        write_term(f, other, names)?;
                        break;
                    }
                }
            }
            f.write_str("]")
        }
        Term::Compound(name, args) if priority(t).is_some() => {
            let p = priority(t).unwrap_or(0);
            write_operand(f, &args[0], names, p, false)?;
            write!(f, " {name} ")?;
            write_operand(f, &args[1], names, p, true)
        }
        Term::Compound(name, args) => {
            write!(f, "{name}")?;
            if !args.is_empty() {
                f.write_str("(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write_term(f, a, names)?;
                }
                f.write_str(")")?;
            }
            Ok(())
        }
    }
}

fn write_operand<F: Fn(VarId) -> String>(
    f: &mut fmt::Formatter<'_>,
    t: &Term,
    names: &F,
    parent: u32,
    right: bool,
) -> fmt::Result {
    let needs_parens = match priority(t) {
        Some(p) => p > parent || (right && p == parent) || p == 700,
        None => false,
    };
    if needs_parens {
        f.write_str("(")?;
        write_term(f, t, names)?;
        f.write_str(")")
    } else {
        write_term(f, t, names)
    }
}

pub fn term_to_string(t: &Term, names: &impl Fn(VarId) -> String) -> String {
    TermDisplay::new(t, names).to_string()
}

pub fn atom_to_string(a: &Atom, names: &impl Fn(VarId) -> String) -> String {
    term_to_string(&a.to_term(), names)
}

/// Renders a clause as reparseable source text, using its source variable
/// names where known.
pub fn clause_to_string(c: &Clause) -> String {
    let names = |v: VarId| match c.var_names.get(v.index()) {
        Some(Some(n)) => n.clone(),
        _ => format!("_G{}", v.0),
    };
    let mut out = atom_to_string(&c.head, &names);
    if !c.body.is_empty() {
        out.push_str(" :- ");
        let body: Vec<String> = c.body.iter().map(|b| atom_to_string(b, &names)).collect();
        out.push_str(&body.join(", "));
    }
    out.push('.');
    out
}
