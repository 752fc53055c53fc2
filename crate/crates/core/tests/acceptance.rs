//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
//! criterion fails.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use common::*;
use cologic_core::oracle::{
    bounded_coinduction_check, coind_semantics, generated_semantics, herbrand_base, ind_semantics, GroundUniverse,
    Interpretation,
};
use cologic_core::print::atom_to_string;
use cologic_core::unify::solution_equivalent;
use cologic_core::{parse_program_str, parse_query, solve, Answer, Atom, BindStore, EngineConfig, Mode, Program, Term, VarId};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const LISTS: &str = include_str!("../../../programs/lists.colp");
const PQ: &str = include_str!("../../../programs/pq.colp");

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Duration);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn set(atoms: &[&str]) -> Interpretation {
    let mut i = Interpretation::new();
    for a in atoms {
        let q = parse_query(a).unwrap();
        i.0.insert(q.goal.atoms[0].clone());
    }
    i
}

fn run(p: &Program, query: &str, mode: Mode) -> Vec<Answer> {
    let q = parse_query(query).unwrap();
    let cfg = EngineConfig { mode, ..EngineConfig::default() };
    solve(p, &q, cfg).collect::<Result<_, _>>().unwrap_or_else(|e| panic!("{query}: {e}"))
}

fn pq_fixed_points() -> Outcome {
    let p = parse_program_str(PQ).map_err(|e| e.to_string())?;
    let u = GroundUniverse::of_program(&p, &[]);
    let ind = ind_semantics(&p.extended(), &u).map_err(|e| e.to_string())?;
    let coind = coind_semantics(&p, &u).map_err(|e| e.to_string())?;
    let gen = generated_semantics(&p, &u).map_err(|e| e.to_string())?;
    ensure(ind == set(&["p(0)"]), || format!("Ind(P⊔C) = {ind}"))?;
    ensure(coind == set(&["p(0)", "p(1)"]), || format!("CoInd(P) = {coind}"))?;
    ensure(gen.is_empty(), || format!("Gen(P,C) = {gen}"))?;
    let meet = coind.intersection(&ind);
    ensure(meet == set(&["p(0)"]) && meet != gen, || format!("CoInd ∩ Ind = {meet}"))?;
    Ok(format!("Ind(P⊔C) = {ind}, CoInd(P) = {coind}, Gen(P,C) = {gen}"))
}

/// The store `L = [1, 2|L], M = 2` over variables 0 and 1.
fn e4() -> BindStore {
    let mut s = BindStore::new();
    let l = Term::Var(VarId(0));
    s.unify(&l, &Term::list(vec![Term::Int(1), Term::Int(2)], l.clone())).unwrap();
    s.unify(&Term::Var(VarId(1)), &Term::Int(2)).unwrap();
    s
}

fn derivation() -> Outcome {
    let p = parse_program_str(LISTS).map_err(|e| e.to_string())?;
    let t = Instant::now();
    let got = run(&p, "?- L=[1,2|L], max(L,M).", Mode::Cofacts);
    let first = t.elapsed();
    let reference = e4();
    let mut classes: Vec<BindStore> = Vec::new();
    for a in &got {
        let mut s = BindStore::new();
        let names = a.equations.load_into(&mut s, 0).map_err(|_| format!("inconsistent answer {a}"))?;
        ensure(names["L"] == VarId(0) && names["M"] == VarId(1), || "unexpected variable order".into())?;
        let vars = [VarId(0), VarId(1)];
        if !classes.iter().any(|c| solution_equivalent(c, &s, &vars)) {
            classes.push(s.clone());
        }
        ensure(solution_equivalent(&reference, &s, &vars), || format!("answer {a} differs from L = [1, 2|L], M = 2"))?;
    }
    ensure(classes.len() == 1, || format!("{} distinct answers", classes.len()))?;
    let t = Instant::now();
    let none = run(&p, "?- L=[1,2|L], max(L,4).", Mode::Cofacts);
    let second = t.elapsed();
    ensure(none.is_empty(), || format!("max(L,4) answered {}", none[0]))?;
    ensure(first < Duration::from_secs(1) && second < Duration::from_secs(1), || {
        format!("too slow: {first:?}, {second:?}")
    })?;
    Ok(format!(
        "one answer up to solution equivalence: {} ({} raw derivations, duplicates kept); max(L,4) fails",
        got[0],
        got.len()
    ))
}

fn behavior_matrix() -> Outcome {
    let p = parse_program_str(LISTS).map_err(|e| e.to_string())?;
    let cases = [
        ("L=[1,2|L], all_pos(L).", Mode::Cofacts, true),
        ("L=[1,2|L], member(2,L).", Mode::Cofacts, true),
        ("L=[1,2|L], member(3,L).", Mode::Cofacts, false),
        ("L=[1,2|L], member(3,L).", Mode::Coinductive, true),
        ("L=[1,2|L], all_pos(L).", Mode::Inductive, false),
        ("L=[1|L], all_pos(L).", Mode::Inductive, false),
    ];
    for (q, mode, expect) in cases {
        let ok = !run(&p, q, mode).is_empty();
        ensure(ok == expect, || format!("{q} in {mode} mode: expected {expect}, got {ok}"))?;
    }
    Ok(format!("{} golden assertions", cases.len()))
}

const CORPUS: u64 = 300;

fn corpus() -> impl Iterator<Item = (String, Program)> {
    (0..CORPUS).map(|seed| random_program(&mut StdRng::seed_from_u64(seed), None))
}

fn special_cases() -> Outcome {
    let u = universe();
    let mut n = 0;
    for (text, p) in corpus() {
        let plain = p.without_cofacts();
        let gen0 = generated_semantics(&plain, &u).map_err(|e| e.to_string())?;
        let ind = ind_semantics(&p.clauses, &u).map_err(|e| e.to_string())?;
        ensure(gen0 == ind, || format!("Gen(P,∅) = {gen0} but Ind(P) = {ind} for\n{text}"))?;
        let genu = generated_semantics(&p.with_universal_cofacts(), &u).map_err(|e| e.to_string())?;
        let coind = coind_semantics(&p, &u).map_err(|e| e.to_string())?;
        ensure(genu == coind, || format!("Gen(P,universal) = {genu} but CoInd(P) = {coind} for\n{text}"))?;
        n += 1;
    }
    Ok(format!("{n} programs, both equalities hold on each"))
}

fn soundness() -> Outcome {
    let u = universe();
    let (mut answered, mut in_gen, mut proved, mut queries, mut budget) = (0, 0, 0, 0, 0);
    for (text, p) in corpus() {
        let gen = generated_semantics(&p, &u).map_err(|e| e.to_string())?;
        for a in herbrand_base(&p, &u).iter() {
            queries += 1;
            let q = parse_query(&atom_text(a)).unwrap();
            let cfg = EngineConfig { step_budget: Some(1_000_000), ..EngineConfig::default() };
            let succeeded = match solve(&p, &q, cfg).next() {
                Some(Ok(_)) => true,
                Some(Err(_)) => {
                    budget += 1;
                    false
                }
                None => false,
            };
            ensure(!succeeded || gen.contains(a), || format!("{} answered but not in Gen = {gen} for\n{text}", atom_text(a)))?;
            answered += succeeded as usize;
            if gen.contains(a) {
                in_gen += 1;
                proved += succeeded as usize;
            }
        }
    }
    Ok(format!(
        "{queries} ground queries, {answered} answered, 0 violations; completeness {proved}/{in_gen} = {:.1}% ({budget} stopped by the step budget)",
        100.0 * proved as f64 / in_gen.max(1) as f64
    ))
}

fn atom_text(a: &Atom) -> String {
    atom_to_string(a, &|v| format!("_G{}", v.0))
}

fn bounded_coinduction() -> Outcome {
    let u = universe();
    let (mut programs, mut subsets, mut passes) = (0, 0, 0);
    let mut seed = 10_000;
    while programs < 10 {
        seed += 1;
        let (text, p) = random_program(&mut StdRng::seed_from_u64(seed), Some(8));
        let hb: Vec<Atom> = herbrand_base(&p, &u).iter().cloned().collect();
        if hb.len() < 3 || hb.len() > 8 {
            continue;
        }
        programs += 1;
        let gen = generated_semantics(&p, &u).map_err(|e| e.to_string())?;
        for bits in 0u32..(1 << hb.len()) {
            let g = Interpretation(
                hb.iter().enumerate().filter(|(i, _)| bits >> i & 1 == 1).map(|(_, a)| a.clone()).collect::<BTreeSet<_>>(),
            );
            subsets += 1;
            if bounded_coinduction_check(&g, &p, &u).map_err(|e| e.to_string())?.passed() {
                passes += 1;
                ensure(g.is_subset(&gen), || format!("checker accepted {g} ⊄ Gen = {gen} for\n{text}"))?;
            }
        }
    }
    Ok(format!("{programs} programs, {subsets} candidate sets, {passes} accepted, 0 violations"))
}

const CASES: u64 = 1000;

fn unification_suite() -> Outcome {
    let mut rng = StdRng::seed_from_u64(7);
    let pair = |rng: &mut StdRng| (gen_term(rng, 3), gen_term(rng, 3));
    for case in 0..CASES {
        // idempotence
        let mut e = random_store(&mut rng);
        let (s, t) = pair(&mut rng);
        if e.unify(&s, &t).is_ok() {
            let before = e.clone();
            ensure(e.unify(&s, &t).is_ok() && e.trail_len() == before.trail_len() && e.same_bindings(&before), || {
                format!("idempotence, case {case}")
            })?;
        }
        // symmetry
        let e = random_store(&mut rng);
        let (s, t) = pair(&mut rng);
        let (mut e1, mut e2) = (e.clone(), e);
        let (r1, r2) = (e1.unify(&s, &t).is_ok(), e2.unify(&t, &s).is_ok());
        ensure(r1 == r2 && (!r1 || solution_equivalent(&e1, &e2, &all_vars())), || format!("symmetry, case {case}"))?;
        // clash monotonicity
        let e = random_store(&mut rng);
        let (s, t) = pair(&mut rng);
        if e.clone().unify(&s, &t).is_err() {
            let mut bigger = e;
            extend_store(&mut rng, &mut bigger, 4);
            ensure(bigger.unify(&s, &t).is_err(), || format!("clash monotonicity, case {case}"))?;
        }
        // rational_equal is an equivalence
        let mut e = random_store(&mut rng);
        let (s, t) = pair(&mut rng);
        let u = gen_term(&mut rng, 3);
        for (x, y) in [(&s, &t), (&t, &u)] {
            if rng.gen_bool(0.7) {
                let m = e.mark();
                if e.unify(x, y).is_ok() {
                    e.commit(m);
                } else {
                    e.rollback(m);
                }
            }
        }
        let transitive = !(e.rational_equal(&s, &t) && e.rational_equal(&t, &u)) || e.rational_equal(&s, &u);
        ensure(
            e.rational_equal(&s, &s) && e.rational_equal(&s, &t) == e.rational_equal(&t, &s) && transitive,
            || format!("rational_equal laws, case {case}"),
        )?;
        // rollback fidelity
        let mut e = random_store(&mut rng);
        let snapshot = e.clone();
        let m = e.mark();
        for _ in 0..rng.gen_range(1..5) {
            let (s, t) = pair(&mut rng);
            let _ = e.unify(&s, &t);
        }
        e.rollback(m);
        let (s, t) = pair(&mut rng);
        ensure(
            e.same_bindings(&snapshot)
                && e.trail_len() == snapshot.trail_len()
                && e.unify(&s, &t).is_ok() == snapshot.clone().unify(&s, &t).is_ok(),
            || format!("rollback fidelity, case {case}"),
        )?;
    }
    Ok(format!("5 properties × {CASES} cases, 0 failures"))
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("1 p/q fixed points", pq_fixed_points, Duration::from_secs(1)),
        ("2 derivation of max on [1,2|L]", derivation, Duration::from_secs(1)),
        ("3 running-example behavior matrix", behavior_matrix, Duration::from_secs(1)),
        ("4 special-case collapse", special_cases, Duration::from_secs(10)),
        ("5 engine soundness", soundness, Duration::from_secs(60)),
        ("6 bounded coinduction checker", bounded_coinduction, Duration::from_secs(60)),
        ("7 unification properties", unification_suite, Duration::from_secs(30)),
    ];
    let mut failed = 0;
    for (name, check, bound) in criteria {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|msg| {
            if elapsed < bound {
                Ok(msg)
            } else {
                Err(format!("took {elapsed:.2?}, bound {bound:?}"))
            }
        });
        match outcome {
            Ok(msg) => println!("PASS criterion {name} [{elapsed:.2?} < {bound:?}]: {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {name} [{elapsed:.2?}]: {msg}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
