//! Random generators shared by the property and acceptance tests.
#![allow(dead_code)]

use cologic_core::oracle::GroundUniverse;
use cologic_core::{parse_program_str, BindStore, Program, Term, VarId};
use rand::rngs::StdRng;
use rand::Rng;

/// Variables used by random stores are `0..NUM_VARS`.
pub const NUM_VARS: u32 = 6;

pub fn v(i: u32) -> Term {
    Term::Var(VarId(i))
}

/// A random finite term over f/1, g/2, a, b, 0, 1 and the store variables.
pub fn gen_term(rng: &mut StdRng, depth: u32) -> Term {
    let leaf = depth == 0 || rng.gen_bool(0.4);
    if leaf {
        match rng.gen_range(0..6) {
            0 => Term::constant("a"),
            1 => Term::constant("b"),
            2 => Term::Int(rng.gen_range(0..2)),
            _ => v(rng.gen_range(0..NUM_VARS)),
        }
    } else if rng.gen_bool(0.5) {
        Term::compound("f", vec![gen_term(rng, depth - 1)])
    } else {
        Term::compound("g", vec![gen_term(rng, depth - 1), gen_term(rng, depth - 1)])
    }
}

/// Adds up to `n` random `X = t` equations, keeping only the solvable ones.
/// Equations frequently close cycles through the variable on the left.
pub fn extend_store(rng: &mut StdRng, store: &mut BindStore, n: usize) {
    for _ in 0..n {
        let lhs = v(rng.gen_range(0..NUM_VARS));
        let rhs = gen_term(rng, 3);
        let m = store.mark();
        if store.unify(&lhs, &rhs).is_ok() {
            store.commit(m);
        } else {
            store.rollback(m);
        }
    }
}

pub fn random_store(rng: &mut StdRng) -> BindStore {
    let mut s = BindStore::new();
    let n = rng.gen_range(0..5);
    extend_store(rng, &mut s, n);
    s
}

pub fn all_vars() -> Vec<VarId> {
    (0..NUM_VARS).map(VarId).collect()
}

/// Universe of every random program: the constants 0 and 1.
pub fn universe() -> GroundUniverse {
    GroundUniverse::new([Term::Int(0), Term::Int(1)])
}

const PREDS: [&str; 3] = ["p", "q", "r"];
const VARS: [&str; 3] = ["X", "Y", "Z"];

fn gen_atom(rng: &mut StdRng, arities: &[usize], ground: bool) -> String {
    let i = rng.gen_range(0..arities.len());
    let args: Vec<String> = (0..arities[i])
        .map(|_| {
            if ground || rng.gen_bool(0.5) {
                rng.gen_range(0..2).to_string()
            } else {
                VARS[rng.gen_range(0..VARS.len())].to_string()
            }
        })
        .collect();
    if args.is_empty() {
        PREDS[i].to_string()
    } else {
        format!("{}({})", PREDS[i], args.join(", "))
    }
}

/// Source text of a random Datalog program with co-facts: at most 3
/// predicates of arity at most 2, constants 0 and 1, at most 5 clauses and
/// at most 2 co-facts. With `max_hb`, the Herbrand base over {0, 1} has at
/// most that many atoms.
pub fn random_program_text(rng: &mut StdRng, max_hb: Option<usize>) -> String {
    let arities: Vec<usize> = loop {
        let n = rng.gen_range(1..=3);
        let a: Vec<usize> = (0..n).map(|_| rng.gen_range(0..=2)).collect();
        let hb: usize = a.iter().map(|k| 1usize << k).sum();
        if max_hb.is_none_or(|m| hb <= m) {
            break a;
        }
    };
    let mut out = String::new();
    for _ in 0..rng.gen_range(1..=5) {
        out.push_str(&gen_atom(rng, &arities, false));
        let body: Vec<String> = (0..rng.gen_range(0..=2)).map(|_| gen_atom(rng, &arities, false)).collect();
        if !body.is_empty() {
            out.push_str(" :- ");
            out.push_str(&body.join(", "));
        }
        out.push_str(".\n");
    }
    for _ in 0..rng.gen_range(0..=2) {
        let ground = rng.gen_bool(0.7);
        out.push_str(&format!("cofact({}).\n", gen_atom(rng, &arities, ground)));
    }
    out
}

pub fn random_program(rng: &mut StdRng, max_hb: Option<usize>) -> (String, Program) {
    let text = random_program_text(rng, max_hb);
    let p = parse_program_str(&text).unwrap_or_else(|e| panic!("generated program does not parse: {e}\n{text}"));
    (text, p)
}
