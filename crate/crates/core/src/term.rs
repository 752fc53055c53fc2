//! Finite syntactic terms, atoms, clauses and programs.
//!
//! Terms here are always finite trees. Cyclic (rational) structure only
//! exists through variable bindings held in a [`BindStore`](crate::unify::BindStore).

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

/// Functor of the list constructor `[H|T]`.
pub const CONS: &str = ".";
/// The empty list constant `[]`.
pub const NIL: &str = "[]";

/// An interned-by-value name for functors and predicates.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(name: &str) -> Self {
        Symbol(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Symbol {
    fn from(name: &str) -> Self {
        Symbol::new(name)
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub u32);

impl VarId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Debug for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "_V{}", self.0)
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(VarId),
    Int(i64),
    /// A compound term; arity 0 is a constant.
    Compound(Symbol, Arc<[Term]>),
}

impl Term {
    pub fn var(id: u32) -> Term {
        Term::Var(VarId(id))
    }

    pub fn constant(name: &str) -> Term {
        Term::Compound(Symbol::new(name), Arc::from(Vec::new()))
    }

    pub fn compound(name: &str, args: Vec<Term>) -> Term {
        Term::Compound(Symbol::new(name), Arc::from(args))
    }

    pub fn nil() -> Term {
        Term::constant(NIL)
    }

    pub fn cons(head: Term, tail: Term) -> Term {
        Term::compound(CONS, vec![head, tail])
    }

    /// Builds `[e1, ..., en | tail]`.
    pub fn list(elems: Vec<Term>, tail: Term) -> Term {
        elems
            .into_iter()
            .rev()
            .fold(tail, |acc, e| Term::cons(e, acc))
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Int(_) => true,
            Term::Compound(_, args) => args.iter().all(Term::is_ground),
        }
    }

    /// Calls `f` on every variable occurrence, left to right.
    pub fn for_each_var(&self, f: &mut impl FnMut(VarId)) {
        match self {
            Term::Var(v) => f(*v),
            Term::Int(_) => {}
            Term::Compound(_, args) => args.iter().for_each(|a| a.for_each_var(f)),
        }
    }

    pub fn map_vars(&self, f: &mut impl FnMut(VarId) -> Term) -> Term {
        match self {
            Term::Var(v) => f(*v),
            Term::Int(_) => self.clone(),
            Term::Compound(_, args) if args.is_empty() => self.clone(),
            Term::Compound(name, args) => Term::Compound(
                name.clone(),
                args.iter().map(|a| a.map_vars(f)).collect(),
            ),
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::print::TermDisplay::new(self, &|v| format!("{v:?}")))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// The set of variables occurring in `t`.
pub fn term_vars(t: &Term) -> BTreeSet<VarId> {
    let mut out = BTreeSet::new();
    t.for_each_var(&mut |v| {
        out.insert(v);
    });
    out
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub predicate: Symbol,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(predicate: &str, args: Vec<Term>) -> Self {
        Atom {
            predicate: Symbol::new(predicate),
            args,
        }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn key(&self) -> PredKey {
        PredKey(self.predicate.clone(), self.args.len())
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    pub fn for_each_var(&self, f: &mut impl FnMut(VarId)) {
        self.args.iter().for_each(|a| a.for_each_var(f));
    }

    pub fn map_vars(&self, f: &mut impl FnMut(VarId) -> Term) -> Atom {
        Atom {
            predicate: self.predicate.clone(),
            args: self.args.iter().map(|a| a.map_vars(f)).collect(),
        }
    }

    /// Views the atom as a term with the predicate as functor.
    pub fn to_term(&self) -> Term {
        Term::Compound(self.predicate.clone(), Arc::from(self.args.clone()))
    }

    pub fn vars(&self) -> BTreeSet<VarId> {
        let mut out = BTreeSet::new();
        self.for_each_var(&mut |v| {
            out.insert(v);
        });
        out
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.to_term())
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_term())
    }
}

/// Predicate name and arity.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PredKey(pub Symbol, pub usize);

impl fmt::Display for PredKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0, self.1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Clause {
    pub head: Atom,
    pub body: Vec<Atom>,
    /// Source names of the clause variables, indexed by [`VarId`]. Anonymous
    /// variables have no entry.
    pub var_names: Vec<Option<String>>,
}

impl Clause {
    pub fn fact(head: Atom) -> Self {
        Clause {
            head,
            body: Vec::new(),
            var_names: Vec::new(),
        }
    }

    pub fn rule(head: Atom, body: Vec<Atom>) -> Self {
        Clause {
            head,
            body,
            var_names: Vec::new(),
        }
    }

    pub fn is_fact(&self) -> bool {
        self.body.is_empty()
    }

    pub fn for_each_var(&self, f: &mut impl FnMut(VarId)) {
        self.head.for_each_var(f);
        self.body.iter().for_each(|a| a.for_each_var(f));
    }

    pub fn vars(&self) -> BTreeSet<VarId> {
        let mut out = BTreeSet::new();
        self.for_each_var(&mut |v| {
            out.insert(v);
        });
        out
    }

    pub fn map_vars(&self, f: &mut impl FnMut(VarId) -> Term) -> Clause {
        Clause {
            head: self.head.map_vars(f),
            body: self.body.iter().map(|a| a.map_vars(f)).collect(),
            var_names: Vec::new(),
        }
    }

    /// Renumbers variables by first occurrence starting at zero. Two clauses
    /// are α-equivalent iff their canonical forms are equal.
    pub fn canonical(&self) -> Clause {
        let mut seen: HashMap<VarId, u32> = HashMap::new();
        let mut c = self.map_vars(&mut |v| {
            let next = seen.len() as u32;
            Term::var(*seen.entry(v).or_insert(next))
        });
        c.var_names.clear();
        c
    }
}

/// A source of fresh variable identifiers, one per resolution.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct VarCounter {
    next: u32,
}

impl VarCounter {
    pub fn starting_at(next: u32) -> Self {
        VarCounter { next }
    }

    pub fn fresh(&mut self) -> VarId {
        let v = VarId(self.next);
        self.next += 1;
        v
    }

    pub fn peek(&self) -> u32 {
        self.next
    }
}

/// Returns an α-equivalent copy of `c` whose variables are all drawn fresh
/// from `counter`, in order of first occurrence.
pub fn fresh_rename(c: &Clause, counter: &mut VarCounter) -> Clause {
    let mut map: HashMap<VarId, VarId> = HashMap::new();
    c.map_vars(&mut |v| Term::Var(*map.entry(v).or_insert_with(|| counter.fresh())))
}

/// A goal: a sequence of atoms, empty for ε.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Goal {
    pub atoms: Vec<Atom>,
}

impl Goal {
    pub fn new(atoms: Vec<Atom>) -> Self {
        Goal { atoms }
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn vars(&self) -> BTreeSet<VarId> {
        let mut out = BTreeSet::new();
        for a in &self.atoms {
            a.for_each_var(&mut |v| {
                out.insert(v);
            });
        }
        out
    }
}

/// A parsed query: the goal plus the names of its source variables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Query {
    pub goal: Goal,
    /// Named query variables in order of first occurrence. Variables of the
    /// goal are numbered `0..num_vars`.
    pub var_names: Vec<(VarId, String)>,
    pub num_vars: u32,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Program {
    pub clauses: Vec<Clause>,
    pub cofacts: Vec<Atom>,
}

impl Program {
    pub fn new(clauses: Vec<Clause>, cofacts: Vec<Atom>) -> Self {
        Program { clauses, cofacts }
    }

    /// `P ⊔ C`: the ordinary clauses followed by every co-fact as a fact.
    pub fn extended(&self) -> Vec<Clause> {
        let mut out = self.clauses.clone();
        out.extend(self.cofacts.iter().cloned().map(Clause::fact));
        out
    }

    /// The same program with its co-facts dropped.
    pub fn without_cofacts(&self) -> Program {
        Program::new(self.clauses.clone(), Vec::new())
    }

    /// Every predicate mentioned in a head, a body or a co-fact, builtins excluded.
    pub fn predicates(&self) -> BTreeSet<PredKey> {
        let mut out = BTreeSet::new();
        for c in &self.clauses {
            out.insert(c.head.key());
            for b in &c.body {
                if !crate::builtin::is_builtin(b) {
                    out.insert(b.key());
                }
            }
        }
        for a in &self.cofacts {
            out.insert(a.key());
        }
        out
    }

    /// Adds `q(_, ..., _)` as a co-fact for every predicate `q` of the program.
    pub fn with_universal_cofacts(&self) -> Program {
        let mut p = self.clone();
        for PredKey(name, arity) in self.predicates() {
            let args = (0..arity as u32).map(Term::var).collect();
            p.cofacts.push(Atom {
                predicate: name,
                args,
            });
        }
        p
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.clauses {
            writeln!(f, "{}", crate::print::clause_to_string(c))?;
        }
        for a in &self.cofacts {
            writeln!(f, "cofact({}).", crate::print::atom_to_string(a, &|v| format!("_{}", v.0)))?;
        }
        Ok(())
    }
}
