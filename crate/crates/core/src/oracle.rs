//! Declarative semantics of Datalog programs with co-facts, by brute force.
//!
//! Without function symbols the Herbrand base is finite and coincides with
//! the complete Herbrand base, so the least model, the greatest co-model and
//! the semantics generated by co-facts can all be computed by plain fixpoint
//! iteration over explicit sets of ground atoms.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::builtin::is_builtin;
use crate::print::{atom_to_string, clause_to_string};
use crate::term::{Atom, Clause, PredKey, Program, Term, VarId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("unsupported program: clause `{clause}` {reason}")]
    Unsupported { clause: String, reason: String },
}

/// Constants the ground instances range over.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundUniverse {
    constants: Vec<Term>,
}

impl GroundUniverse {
    /// Name of the constant injected when a program mentions none.
    pub const DUMMY: &'static str = "$dummy";

    pub fn new(constants: impl IntoIterator<Item = Term>) -> Self {
        let mut set: BTreeSet<Term> = constants.into_iter().collect();
        if set.is_empty() {
            set.insert(Term::constant(Self::DUMMY));
        }
        GroundUniverse {
            constants: set.into_iter().collect(),
        }
    }

    /// Constants of the program (clauses and co-facts) and of `extra` atoms.
    pub fn of_program(p: &Program, extra: &[Atom]) -> Self {
        let mut set = BTreeSet::new();
        let mut collect = |a: &Atom| {
            for t in &a.args {
                if is_constant(t) {
                    set.insert(t.clone());
                }
            }
        };
        for c in &p.clauses {
            collect(&c.head);
            c.body.iter().for_each(&mut collect);
        }
        p.cofacts.iter().for_each(&mut collect);
        extra.iter().for_each(&mut collect);
        Self::new(set)
    }

    pub fn constants(&self) -> &[Term] {
        &self.constants
    }

    pub fn len(&self) -> usize {
        self.constants.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constants.is_empty()
    }
}

fn is_constant(t: &Term) -> bool {
    match t {
        Term::Int(_) => true,
        Term::Compound(_, args) => args.is_empty(),
        Term::Var(_) => false,
    }
}

/// A finite set of ground atoms.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Interpretation(pub BTreeSet<Atom>);

impl Interpretation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn contains(&self, a: &Atom) -> bool {
        self.0.contains(a)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_subset(&self, other: &Interpretation) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn intersection(&self, other: &Interpretation) -> Interpretation {
        Interpretation(self.0.intersection(&other.0).cloned().collect())
    }

    pub fn iter(&self) -> impl Iterator<Item = &Atom> {
        self.0.iter()
    }

    /// Atoms rendered and sorted lexicographically.
    pub fn sorted_strings(&self) -> Vec<String> {
        let mut out: Vec<String> = self.0.iter().map(render).collect();
        out.sort();
        out
    }
}

impl FromIterator<Atom> for Interpretation {
    fn from_iter<I: IntoIterator<Item = Atom>>(iter: I) -> Self {
        Interpretation(iter.into_iter().collect())
    }
}

impl fmt::Display for Interpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.sorted_strings().join(", "))
    }
}

fn render(a: &Atom) -> String {
    atom_to_string(a, &|v| format!("_G{}", v.0))
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct GroundClause {
    pub head: Atom,
    pub body: Vec<Atom>,
}

/// Ground instances of a clause list over a universe.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GroundClauseSet {
    pub clauses: Vec<GroundClause>,
}

impl GroundClauseSet {
    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }
}

fn check_datalog(c: &Clause) -> Result<(), OracleError> {
    let unsupported = |reason: &str| OracleError::Unsupported {
        clause: clause_to_string(c),
        reason: reason.to_string(),
    };
    for (i, a) in std::iter::once(&c.head).chain(&c.body).enumerate() {
        if i > 0 && is_builtin(a) {
            return Err(unsupported(&format!("uses builtin {}", a.key())));
        }
        if a.args.iter().any(|t| matches!(t, Term::Compound(_, args) if !args.is_empty())) {
            return Err(unsupported("contains a compound term"));
        }
    }
    Ok(())
}

/// Every instance of the clauses obtained by substituting universe constants
/// for their variables.
pub fn ground_instances(clauses: &[Clause], u: &GroundUniverse) -> Result<GroundClauseSet, OracleError> {
    let mut out = BTreeSet::new();
    for c in clauses {
        check_datalog(c)?;
        let vars: Vec<VarId> = c.vars().into_iter().collect();
        let k = u.len();
        let total = k.pow(vars.len() as u32);
        for mut code in 0..total {
            let mut subst: BTreeMap<VarId, Term> = BTreeMap::new();
            for v in &vars {
                subst.insert(*v, u.constants()[code % k].clone());
                code /= k;
            }
            let g = c.map_vars(&mut |v| subst[&v].clone());
            out.insert(GroundClause {
                head: g.head,
                body: g.body,
            });
        }
    }
    Ok(GroundClauseSet {
        clauses: out.into_iter().collect(),
    })
}

/// One inference step: heads of ground clauses whose body lies in `i`.
pub fn op_step(g: &GroundClauseSet, i: &Interpretation) -> Interpretation {
    g.clauses
        .iter()
        .filter(|c| c.body.iter().all(|b| i.contains(b)))
        .map(|c| c.head.clone())
        .collect()
}

/// Every ground atom over the program's predicates.
pub fn herbrand_base(p: &Program, u: &GroundUniverse) -> Interpretation {
    let mut out = BTreeSet::new();
    for PredKey(name, arity) in p.predicates() {
        let k = u.len();
        for mut code in 0..k.pow(arity as u32) {
            let mut args = Vec::with_capacity(arity);
            for _ in 0..arity {
                args.push(u.constants()[code % k].clone());
                code /= k;
            }
            out.insert(Atom {
                predicate: name.clone(),
                args,
            });
        }
    }
    Interpretation(out)
}

/// Least fixed point of `op_step` from the empty set, with the number of
/// iterations taken to stabilize.
pub fn least_fixpoint(g: &GroundClauseSet) -> (Interpretation, usize) {
    let mut current = Interpretation::new();
    let mut steps = 0;
    loop {
        let next = op_step(g, &current);
        if next == current {
            return (current, steps);
        }
        current = next;
        steps += 1;
    }
}

/// Greatest fixed point of `op_step` below `top`, iterating downwards.
pub fn greatest_fixpoint(g: &GroundClauseSet, top: &Interpretation) -> (Interpretation, usize) {
    let mut current = top.clone();
    let mut steps = 0;
    loop {
        let next = current.intersection(&op_step(g, &current));
        if next == current {
            return (current, steps);
        }
        current = next;
        steps += 1;
    }
}

/// `Ind(P)`: the least model of the given clauses.
pub fn ind_semantics(clauses: &[Clause], u: &GroundUniverse) -> Result<Interpretation, OracleError> {
    Ok(least_fixpoint(&ground_instances(clauses, u)?).0)
}

/// `CoInd(P)`: the greatest co-model of the program clauses (co-facts ignored).
pub fn coind_semantics(p: &Program, u: &GroundUniverse) -> Result<Interpretation, OracleError> {
    let g = ground_instances(&p.clauses, u)?;
    Ok(greatest_fixpoint(&g, &herbrand_base(p, u)).0)
}

/// `Gen(P, C)`: the largest co-model of `P` included in `Ind(P ⊔ C)`.
pub fn generated_semantics(p: &Program, u: &GroundUniverse) -> Result<Interpretation, OracleError> {
    let bound = ind_semantics(&p.extended(), u)?;
    let g = ground_instances(&p.clauses, u)?;
    Ok(greatest_fixpoint(&g, &bound).0)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Check {
    Pass,
    /// An atom violating the condition.
    Fail(Atom),
}

impl Check {
    pub fn passed(&self) -> bool {
        matches!(self, Check::Pass)
    }
}

/// Outcome of checking a candidate set with bounded coinduction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoinductionReport {
    /// Every atom of the set is in `Ind(P ⊔ C)`.
    pub boundedness: Check,
    /// Every atom of the set is derivable in one step from the set.
    pub consistency: Check,
}

impl CoinductionReport {
    pub fn passed(&self) -> bool {
        self.boundedness.passed() && self.consistency.passed()
    }
}

pub fn bounded_coinduction_check(
    goalset: &Interpretation,
    p: &Program,
    u: &GroundUniverse,
) -> Result<CoinductionReport, OracleError> {
    let bound = ind_semantics(&p.extended(), u)?;
    let step = op_step(&ground_instances(&p.clauses, u)?, goalset);
    let first_missing = |within: &Interpretation| match goalset.iter().find(|a| !within.contains(a)) {
        Some(a) => Check::Fail(a.clone()),
        None => Check::Pass,
    };
    Ok(CoinductionReport {
        boundedness: first_missing(&bound),
        consistency: first_missing(&step),
    })
}

/// The three semantics of a program, as shown by the `--oracle` report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleReport {
    pub ind_extended: Interpretation,
    pub coind: Interpretation,
    pub generated: Interpretation,
}

impl OracleReport {
    pub fn compute(p: &Program, u: &GroundUniverse) -> Result<Self, OracleError> {
        Ok(OracleReport {
            ind_extended: ind_semantics(&p.extended(), u)?,
            coind: coind_semantics(p, u)?,
            generated: generated_semantics(p, u)?,
        })
    }
}

impl fmt::Display for OracleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Ind(P⊔C) = {}", self.ind_extended)?;
        writeln!(f, "CoInd(P) = {}", self.coind)?;
        writeln!(f, "Gen(P,C) = {}", self.generated)
    }
}
