//! Predefined, always-inductive predicates: equality, disequality,
//! integer comparison and `is`.

use thiserror::Error;

use crate::print::term_to_string;
use crate::term::{Atom, Term};
use crate::unify::BindStore;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuiltinError {
    #[error("instantiation error: arguments of {0} are not sufficiently instantiated")]
    Instantiation(String),
    #[error("type error: {0} is not an evaluable integer expression")]
    Type(String),
    #[error("evaluation error: {0}")]
    Evaluation(String),
}

const WHITELIST: &[(&str, usize)] = &[
    ("=", 2),
    ("\\=", 2),
    ("<", 2),
    (">", 2),
    (">=", 2),
    ("=<", 2),
    ("=:=", 2),
    ("=\\=", 2),
    ("is", 2),
    ("true", 0),
    ("fail", 0),
];

pub fn is_builtin(a: &Atom) -> bool {
    WHITELIST
        .iter()
        .any(|(name, arity)| a.predicate.as_str() == *name && a.args.len() == *arity)
}

/// Runs a builtin atom. `Ok(false)` is ordinary failure; on failure the store
/// is left as it was.
pub fn eval_builtin(a: &Atom, store: &mut BindStore) -> Result<bool, BuiltinError> {
    let name = a.predicate.as_str();
    match (name, a.args.as_slice()) {
        ("true", []) => Ok(true),
        ("fail", []) => Ok(false),
        ("=", [l, r]) => Ok(store.unify(l, r).is_ok()),
        ("\\=", [l, r]) => Ok(!store.unifiable(l, r)),
        ("is", [l, r]) => {
            let value = eval_arith(r, store, a)?;
            Ok(store.unify(l, &Term::Int(value)).is_ok())
        }
        (op, [l, r]) => {
            let x = eval_arith(l, store, a)?;
            let y = eval_arith(r, store, a)?;
            Ok(match op {
                "<" => x < y,
                ">" => x > y,
                ">=" => x >= y,
                "=<" => x <= y,
                "=:=" => x == y,
                "=\\=" => x != y,
                _ => unreachable!("not a builtin: {op}"),
            })
        }
        _ => unreachable!("not a builtin: {name}/{}", a.args.len()),
    }
}

/// Evaluates an integer expression over `+ - * // max min`.
pub fn eval_arith(t: &Term, store: &BindStore, ctx: &Atom) -> Result<i64, BuiltinError> {
    let overflow = || BuiltinError::Evaluation("integer overflow".into());
    match store.resolve(t) {
        Term::Int(n) => Ok(n),
        Term::Var(_) => Err(BuiltinError::Instantiation(show(ctx))),
        Term::Compound(f, args) if args.len() == 2 => {
            let x = eval_arith(&args[0], store, ctx)?;
            let y = eval_arith(&args[1], store, ctx)?;
            match f.as_str() {
                "+" => x.checked_add(y).ok_or_else(overflow),
                "-" => x.checked_sub(y).ok_or_else(overflow),
                "*" => x.checked_mul(y).ok_or_else(overflow),
                "//" if y == 0 => Err(BuiltinError::Evaluation("division by zero".into())),
                "//" => x.checked_div(y).ok_or_else(overflow),
                "max" => Ok(x.max(y)),
                "min" => Ok(x.min(y)),
                _ => Err(BuiltinError::Type(show_resolved(t, store))),
            }
        }
        _ => Err(BuiltinError::Type(show_resolved(t, store))),
    }
}

fn show(a: &Atom) -> String {
    crate::print::atom_to_string(a, &|v| format!("_G{}", v.0))
}

fn show_resolved(t: &Term, store: &BindStore) -> String {
    term_to_string(&store.unfold(t, 6), &|v| format!("_G{}", v.0))
}
