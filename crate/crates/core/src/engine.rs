//! Co-SLD resolution driven by co-facts.
//!
//! Two kinds of goal frames share one machine:
//!
//! * co frames carry the coinductive hypotheses of their branch. A selected
//!   atom that unifies with a hypothesis triggers ordinary SLD resolution of
//!   that atom in the program extended with the co-facts (an lfp frame).
//!   Otherwise a program clause is used and the atom becomes a hypothesis for
//!   the clause body.
//! * lfp frames do plain SLD resolution in `P ⊔ C`, with a per-branch count
//!   of how often each atom (modulo unification) has been expanded. An atom
//!   seen `lfp_revisit_limit` times fails without alternatives.
//!
//! Selection is leftmost atom, topmost clause, depth-first. Hypothesis lists,
//! counts and goal lists are persistent, so backtracking restores them by
//! dropping references; bindings are restored by the store's trail.

use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;
use std::str::FromStr;

use thiserror::Error;

use crate::builtin::{eval_builtin, is_builtin, BuiltinError};
use crate::term::{fresh_rename, Atom, Clause, Goal, PredKey, Program, Query, VarCounter, VarId};
use crate::unify::{extract_answer, AnswerSet, BindStore, Mark};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    /// Semantics generated by the program's co-facts.
    #[default]
    Cofacts,
    /// Least fixed point: plain SLD on the clauses, co-facts ignored.
    Inductive,
    /// Greatest fixed point: every predicate gets a universal co-fact.
    Coinductive,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cofacts" => Ok(Mode::Cofacts),
            "inductive" => Ok(Mode::Inductive),
            "coinductive" => Ok(Mode::Coinductive),
            other => Err(format!(
                "unknown mode `{other}` (expected cofacts, inductive or coinductive)"
            )),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Cofacts => "cofacts",
            Mode::Inductive => "inductive",
            Mode::Coinductive => "coinductive",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EngineConfig {
    pub lfp_revisit_limit: u32,
    /// Never use a clause for an atom that unifies with a hypothesis.
    pub hyp_cut: bool,
    pub step_budget: Option<u64>,
    pub mode: Mode,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            lfp_revisit_limit: 2,
            hyp_cut: true,
            step_budget: None,
            mode: Mode::Cofacts,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("resource limit: step budget of {0} exhausted")]
    BudgetExhausted(u64),
    #[error(transparent)]
    Builtin(#[from] BuiltinError),
}

/// An answer to a query: equations over the query variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Answer {
    pub equations: AnswerSet,
}

impl Answer {
    /// True when the query had no named variables.
    pub fn is_empty(&self) -> bool {
        self.equations.equations.is_empty()
    }
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let eqs = &self.equations;
        let parts: Vec<String> = eqs.equations.iter().map(|e| eqs.equation_to_string(e)).collect();
        f.write_str(&parts.join(", "))
    }
}

/// Counters describing a resolution, for diagnostics and tests.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    pub steps: u64,
    pub co_steps: u64,
    pub co_hyp_hits: u64,
    pub lfp_steps: u64,
    pub cofact_uses: u64,
    pub revisit_cutoffs: u64,
}

/// Coinductive hypotheses of a branch, most recent first.
#[derive(Clone, Default)]
pub struct HypSet(Option<Rc<HypNode>>);

struct HypNode {
    atom: Atom,
    next: HypSet,
}

impl HypSet {
    pub fn new() -> Self {
        HypSet(None)
    }

    pub fn from_atoms(oldest_first: &[Atom]) -> Self {
        oldest_first
            .iter()
            .fold(HypSet::new(), |s, a| s.push(a.clone()))
    }

    #[must_use]
    pub fn push(&self, atom: Atom) -> HypSet {
        HypSet(Some(Rc::new(HypNode {
            atom,
            next: self.clone(),
        })))
    }

    /// Hypotheses, most recent first.
    pub fn iter(&self) -> impl Iterator<Item = &Atom> {
        let mut cur = self.0.as_deref();
        std::iter::from_fn(move || {
            let node = cur?;
            cur = node.next.0.as_deref();
            Some(&node.atom)
        })
    }

    pub fn len(&self) -> usize {
        self.iter().count()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_none()
    }
}

/// Hypotheses of `s` that unify with `a`, most recent first. Trial
/// unifications are rolled back.
pub fn hyp_lookup(a: &Atom, s: &HypSet, store: &mut BindStore) -> Vec<Atom> {
    s.iter()
        .filter(|h| h.predicate == a.predicate && h.args.len() == a.args.len())
        .filter(|h| store.atoms_unifiable(a, h))
        .cloned()
        .collect()
}

/// Visit counts of atoms expanded along an lfp branch. Keys are copies taken
/// when the atom was first expanded; lookup returns the first key unifiable
/// with the atom, without binding anything.
#[derive(Clone, Default)]
pub struct LfpCounts(Rc<Vec<(Atom, u32)>>);

impl LfpCounts {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn lookup(&self, a: &Atom, store: &mut BindStore) -> Option<(usize, u32)> {
        self.0
            .iter()
            .enumerate()
            .find(|(_, (key, _))| {
                key.predicate == a.predicate
                    && key.args.len() == a.args.len()
                    && store.atoms_unifiable(a, key)
            })
            .map(|(i, (_, n))| (i, *n))
    }

    fn incremented(&self, index: usize) -> LfpCounts {
        let mut v = (*self.0).clone();
        v[index].1 += 1;
        LfpCounts(Rc::new(v))
    }

    fn inserted(&self, key: Atom) -> LfpCounts {
        let mut v = (*self.0).clone();
        v.push((key, 1));
        LfpCounts(Rc::new(v))
    }

    pub fn entries(&self) -> &[(Atom, u32)] {
        &self.0
    }
}

#[derive(Clone)]
enum Frame {
    Co { atom: Atom, hyps: HypSet },
    Lfp { atom: Atom, counts: LfpCounts },
}

#[derive(Clone, Default)]
struct Cont(Option<Rc<ContNode>>);

struct ContNode {
    frame: Frame,
    next: Cont,
}

impl Cont {
    fn push(&self, frame: Frame) -> Cont {
        Cont(Some(Rc::new(ContNode {
            frame,
            next: self.clone(),
        })))
    }

    fn push_all(&self, frames: impl DoubleEndedIterator<Item = Frame>) -> Cont {
        frames.rev().fold(self.clone(), |acc, f| acc.push(f))
    }

    fn pop(&self) -> Option<(Frame, Cont)> {
        self.0.as_ref().map(|n| (n.frame.clone(), n.next.clone()))
    }
}

enum Alternatives {
    Co {
        hyps: HypSet,
        matching: Vec<Atom>,
        clauses: Rc<[usize]>,
    },
    Lfp {
        counts: LfpCounts,
        clauses: Rc<[usize]>,
    },
}

impl Alternatives {
    fn len(&self) -> usize {
        match self {
            Alternatives::Co { matching, clauses, .. } => matching.len() + clauses.len(),
            Alternatives::Lfp { clauses, .. } => clauses.len(),
        }
    }
}

struct ChoicePoint {
    mark: Mark,
    atom: Atom,
    rest: Cont,
    alts: Alternatives,
    next: usize,
}

/// Clause lists indexed by predicate.
struct ClauseDb {
    clauses: Vec<Clause>,
    /// Number of leading entries that are program clauses; the rest are co-facts.
    program_len: usize,
    by_pred: HashMap<PredKey, Rc<[usize]>>,
}

impl ClauseDb {
    fn new(clauses: Vec<Clause>, program_len: usize) -> Self {
        let mut by_pred: HashMap<PredKey, Vec<usize>> = HashMap::new();
        for (i, c) in clauses.iter().enumerate() {
            by_pred.entry(c.head.key()).or_default().push(i);
        }
        ClauseDb {
            clauses,
            program_len,
            by_pred: by_pred.into_iter().map(|(k, v)| (k, Rc::from(v))).collect(),
        }
    }

    fn for_pred(&self, key: &PredKey, include_cofacts: bool) -> Rc<[usize]> {
        match self.by_pred.get(key) {
            None => Rc::from(Vec::new()),
            Some(all) if include_cofacts => all.clone(),
            Some(all) => all.iter().copied().filter(|&i| i < self.program_len).collect(),
        }
    }
}

/// A resolution in progress. Each call to [`Solver::next_solution`] resumes
/// the depth-first search and stops at the next success.
pub struct Solver {
    db: ClauseDb,
    cfg: EngineConfig,
    store: BindStore,
    counter: VarCounter,
    goals: Option<Cont>,
    choices: Vec<ChoicePoint>,
    query_vars: Vec<(VarId, String)>,
    started: bool,
    finished: bool,
    stats: Stats,
}

/// Enumerates the answers of `query` against `program`.
pub fn solve(program: &Program, query: &Query, cfg: EngineConfig) -> Solver {
    let effective = match cfg.mode {
        Mode::Cofacts => program.clone(),
        Mode::Inductive => program.without_cofacts(),
        Mode::Coinductive => program.with_universal_cofacts(),
    };
    let frames: Vec<Frame> = match cfg.mode {
        Mode::Inductive => {
            let counts = LfpCounts::new();
            query
                .goal
                .atoms
                .iter()
                .map(|a| Frame::Lfp {
                    atom: a.clone(),
                    counts: counts.clone(),
                })
                .collect()
        }
        _ => co_frames(&query.goal.atoms, &HypSet::new()),
    };
    let mut s = Solver::with_frames(&effective, BindStore::new(), frames, query.num_vars, cfg);
    s.query_vars = query.var_names.clone();
    s
}

/// Resolves `goal` under hypotheses `hyps` (oldest first) starting from `store`.
pub fn solve_co(program: &Program, hyps: &[Atom], goal: &Goal, store: BindStore, cfg: EngineConfig) -> Solver {
    let mut min = 0;
    for a in hyps.iter().chain(&goal.atoms) {
        a.for_each_var(&mut |v| min = min.max(v.0 + 1));
    }
    let frames = co_frames(&goal.atoms, &HypSet::from_atoms(hyps));
    Solver::with_frames(program, store, frames, min, cfg)
}

/// Plain SLD resolution of `goal` in `P ⊔ C` with the given visit counts.
pub fn solve_lfp(program: &Program, goal: &Goal, store: BindStore, counts: LfpCounts, cfg: EngineConfig) -> Solver {
    let mut min = 0;
    for a in &goal.atoms {
        a.for_each_var(&mut |v| min = min.max(v.0 + 1));
    }
    let frames = goal
        .atoms
        .iter()
        .map(|a| Frame::Lfp {
            atom: a.clone(),
            counts: counts.clone(),
        })
        .collect();
    Solver::with_frames(program, store, frames, min, cfg)
}

fn co_frames(atoms: &[Atom], hyps: &HypSet) -> Vec<Frame> {
    atoms
        .iter()
        .map(|a| Frame::Co {
            atom: a.clone(),
            hyps: hyps.clone(),
        })
        .collect()
}

impl Solver {
    fn with_frames(program: &Program, store: BindStore, frames: Vec<Frame>, min_var: u32, cfg: EngineConfig) -> Self {
        let first_free = min_var.max(store.num_slots() as u32);
        Solver {
            db: ClauseDb::new(program.extended(), program.clauses.len()),
            cfg,
            store,
            counter: VarCounter::starting_at(first_free),
            goals: Some(Cont::default().push_all(frames.into_iter())),
            choices: Vec::new(),
            query_vars: Vec::new(),
            started: false,
            finished: false,
            stats: Stats::default(),
        }
    }

    pub fn store(&self) -> &BindStore {
        &self.store
    }

    pub fn stats(&self) -> Stats {
        self.stats
    }

    pub fn config(&self) -> &EngineConfig {
        &self.cfg
    }

    /// Advances to the next success. On `Some(Ok(()))` the store holds the
    /// solution's equations until the next call.
    pub fn next_solution(&mut self) -> Option<Result<(), EngineError>> {
        if self.finished {
            return None;
        }
        if self.started && !self.backtrack() {
            self.finished = true;
            return None;
        }
        self.started = true;
        match self.run() {
            Ok(true) => Some(Ok(())),
            Ok(false) => {
                self.finished = true;
                None
            }
            Err(e) => {
                self.finished = true;
                Some(Err(e))
            }
        }
    }

    pub fn next_answer(&mut self) -> Option<Result<Answer, EngineError>> {
        Some(self.next_solution()?.map(|()| Answer {
            equations: extract_answer(&self.query_vars, &self.store),
        }))
    }

    /// Runs forward from the current goal list until success (`true`) or
    /// until every alternative is exhausted (`false`).
    fn run(&mut self) -> Result<bool, EngineError> {
        loop {
            let Some(goals) = self.goals.take() else {
                if !self.backtrack() {
                    return Ok(false);
                }
                continue;
            };
            let Some((frame, rest)) = goals.pop() else {
                self.goals = Some(goals);
                return Ok(true);
            };
            self.stats.steps += 1;
            if let Some(limit) = self.cfg.step_budget {
                if self.stats.steps > limit {
                    return Err(EngineError::BudgetExhausted(limit));
                }
            }
            let atom = match &frame {
                Frame::Co { atom, .. } | Frame::Lfp { atom, .. } => atom.clone(),
            };
            if is_builtin(&atom) {
                if eval_builtin(&atom, &mut self.store)? {
                    self.goals = Some(rest);
                }
                continue;
            }
            let alts = match frame {
                Frame::Co { hyps, .. } => {
                    let matching = hyp_lookup(&atom, &hyps, &mut self.store);
                    let clauses = if self.cfg.hyp_cut && !matching.is_empty() {
                        Rc::from(Vec::new())
                    } else {
                        self.db.for_pred(&atom.key(), false)
                    };
                    Alternatives::Co { hyps, matching, clauses }
                }
                Frame::Lfp { counts, .. } => {
                    let counts = match counts.lookup(&atom, &mut self.store) {
                        Some((_, n)) if n >= self.cfg.lfp_revisit_limit => {
                            self.stats.revisit_cutoffs += 1;
                            continue;
                        }
                        Some((i, _)) => counts.incremented(i),
                        None => {
                            let counter = &mut self.counter;
                            let key = self.store.copy_atom(&atom, &mut || counter.fresh());
                            counts.inserted(key)
                        }
                    };
                    let clauses = self.db.for_pred(&atom.key(), true);
                    Alternatives::Lfp { counts, clauses }
                }
            };
            if alts.len() == 0 {
                continue;
            }
            let mark = self.store.mark();
            self.choices.push(ChoicePoint {
                mark,
                atom,
                rest,
                alts,
                next: 0,
            });
            if !self.backtrack() {
                return Ok(false);
            }
        }
    }

    /// Resumes the most recent choice point with an untried alternative whose
    /// head unification succeeds. Returns `false` when none is left.
    fn backtrack(&mut self) -> bool {
        while let Some(cp) = self.choices.last_mut() {
            self.store.undo_to(&cp.mark);
            if cp.next >= cp.alts.len() {
                let cp = self.choices.pop().expect("nonempty");
                self.store.rollback(cp.mark);
                continue;
            }
            let i = cp.next;
            cp.next += 1;
            let atom = cp.atom.clone();
            let rest = cp.rest.clone();
            let goals = match &cp.alts {
                Alternatives::Co { hyps, matching, clauses } => {
                    if i < matching.len() {
                        let hyp = matching[i].clone();
                        self.store.unify_atoms(&atom, &hyp).ok().map(|()| {
                            self.stats.co_hyp_hits += 1;
                            rest.push(Frame::Lfp {
                                atom: atom.clone(),
                                counts: LfpCounts::new(),
                            })
                        })
                    } else {
                        let clause = &self.db.clauses[clauses[i - matching.len()]];
                        let hyps = hyps.push(atom.clone());
                        let renamed = fresh_rename(clause, &mut self.counter);
                        self.store.unify_atoms(&atom, &renamed.head).ok().map(|()| {
                            self.stats.co_steps += 1;
                            rest.push_all(renamed.body.into_iter().map(|b| Frame::Co {
                                atom: b,
                                hyps: hyps.clone(),
                            }))
                        })
                    }
                }
                Alternatives::Lfp { counts, clauses } => {
                    let index = clauses[i];
                    let clause = &self.db.clauses[index];
                    let renamed = fresh_rename(clause, &mut self.counter);
                    let is_cofact = index >= self.db.program_len;
                    let counts = counts.clone();
                    self.store.unify_atoms(&atom, &renamed.head).ok().map(|()| {
                        self.stats.lfp_steps += 1;
                        if is_cofact {
                            self.stats.cofact_uses += 1;
                        }
                        rest.push_all(renamed.body.into_iter().map(|b| Frame::Lfp {
                            atom: b,
                            counts: counts.clone(),
                        }))
                    })
                }
            };
            if let Some(goals) = goals {
                self.goals = Some(goals);
                return true;
            }
        }
        false
    }
}

impl Iterator for Solver {
    type Item = Result<Answer, EngineError>;

    fn next(&mut self) -> Option<Self::Item> {
        self.next_answer()
    }
}
