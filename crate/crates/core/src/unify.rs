//! Equation sets in solved form over rational trees.
//!
//! A [`BindStore`] is a union-find over variables whose representatives may be
//! bound to a term. Bindings can form cycles through variables, which is how
//! rational trees such as `L = [1, 2|L]` are represented. Every change is
//! recorded on a trail so that the store can be rolled back to a [`Mark`].

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use thiserror::Error;

use crate::print::term_to_string;
use crate::term::{Atom, Term, VarId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("terms do not unify")]
pub struct Clash;

/// A choice-point token returned by [`BindStore::mark`].
#[derive(Debug, PartialEq, Eq)]
#[must_use]
pub struct Mark {
    depth: usize,
    trail_len: usize,
}

#[derive(Debug, Clone, Default)]
pub struct BindStore {
    bindings: Vec<Option<Term>>,
    /// Each entry records a variable and the binding it had before the change.
    trail: Vec<(VarId, Option<Term>)>,
    marks: Vec<usize>,
    /// One past the largest variable mentioned by any binding.
    high_water: u32,
}

/// A node of the term graph: a variable representative, or a compound term
/// that is not reached through a variable, identified by address.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum NodeId {
    Var(VarId),
    Ptr(usize),
}

impl BindStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn binding(&self, v: VarId) -> Option<&Term> {
        self.bindings.get(v.index()).and_then(Option::as_ref)
    }

    /// A bound on the variables this store has ever mentioned; identifiers at
    /// or above it are unused.
    pub fn num_slots(&self) -> usize {
        self.high_water as usize
    }

    pub fn trail_len(&self) -> usize {
        self.trail.len()
    }

    fn set(&mut self, v: VarId, t: Option<Term>) {
        if self.bindings.len() <= v.index() {
            self.bindings.resize(v.index() + 1, None);
        }
        self.high_water = self.high_water.max(v.0 + 1);
        if let Some(t) = &t {
            t.for_each_var(&mut |w| self.high_water = self.high_water.max(w.0 + 1));
        }
        let old = std::mem::replace(&mut self.bindings[v.index()], t);
        self.trail.push((v, old));
    }

    /// Follows variable-to-variable links to the class representative.
    pub fn deref_var(&self, mut v: VarId) -> VarId {
        while let Some(Term::Var(w)) = self.binding(v) {
            v = *w;
        }
        v
    }

    /// Returns the representative (if `t` is a variable) and the value it
    /// stands for: the bound term, or the unbound representative itself.
    fn walk(&self, t: &Term) -> (Option<VarId>, Term) {
        match t {
            Term::Var(v) => {
                let rep = self.deref_var(*v);
                match self.binding(rep) {
                    Some(value) => (Some(rep), value.clone()),
                    None => (Some(rep), Term::Var(rep)),
                }
            }
            other => (None, other.clone()),
        }
    }

    /// Dereferences `t` by one level: a bound variable yields its (shallow)
    /// value, an unbound one yields its representative. Never loops.
    pub fn resolve(&self, t: &Term) -> Term {
        self.walk(t).1
    }

    pub fn mark(&mut self) -> Mark {
        self.marks.push(self.trail.len());
        Mark {
            depth: self.marks.len(),
            trail_len: self.trail.len(),
        }
    }

    fn check_top(&self, m: &Mark) {
        assert!(
            self.marks.len() == m.depth && self.marks.last() == Some(&m.trail_len),
            "stale or out-of-order bind-store mark"
        );
    }

    /// Undoes every binding made since `m`, keeping the mark active.
    pub fn undo_to(&mut self, m: &Mark) {
        self.check_top(m);
        while self.trail.len() > m.trail_len {
            let (v, old) = self.trail.pop().expect("trail underflow");
            self.bindings[v.index()] = old;
        }
    }

    /// Undoes every binding made since `m` and releases it.
    pub fn rollback(&mut self, m: Mark) {
        self.undo_to(&m);
        self.marks.pop();
    }

    /// Releases `m` keeping the bindings made since.
    pub fn commit(&mut self, m: Mark) {
        self.check_top(&m);
        self.marks.pop();
    }

    pub fn unify(&mut self, s: &Term, t: &Term) -> Result<(), Clash> {
        self.unify_pairs(vec![(s.clone(), t.clone())])
    }

    pub fn unify_atoms(&mut self, a: &Atom, b: &Atom) -> Result<(), Clash> {
        if a.predicate != b.predicate || a.args.len() != b.args.len() {
            return Err(Clash);
        }
        let pairs = a
            .args
            .iter()
            .cloned()
            .zip(b.args.iter().cloned())
            .rev()
            .collect();
        self.unify_pairs(pairs)
    }

    /// Succeeds iff `s` and `t` unify; the store is left unchanged either way.
    pub fn unifiable(&mut self, s: &Term, t: &Term) -> bool {
        let m = self.mark();
        let ok = self.unify(s, t).is_ok();
        self.rollback(m);
        ok
    }

    pub fn atoms_unifiable(&mut self, a: &Atom, b: &Atom) -> bool {
        let m = self.mark();
        let ok = self.unify_atoms(a, b).is_ok();
        self.rollback(m);
        ok
    }

    // Unification without occurs check. Each pair of term-graph nodes is
    // expanded at most once (pairs already in progress are assumed equal), and
    // two bound representatives are merged before their values are compared.
    // Both keep cyclic bindings from looping.
    fn unify_pairs(&mut self, mut stack: Vec<(Term, Term)>) -> Result<(), Clash> {
        let m = self.mark();
        let mut in_progress: HashSet<(NodeId, NodeId)> = HashSet::new();
        while let Some((a, b)) = stack.pop() {
            let (ia, _) = self.node_of(&a);
            let (ib, _) = self.node_of(&b);
            if let (Some(ia), Some(ib)) = (ia, ib) {
                if !in_progress.insert((ia, ib)) {
                    continue;
                }
            }
            let (ra, va) = self.walk(&a);
            let (rb, vb) = self.walk(&b);
            if ra.is_some() && ra == rb {
                continue;
            }
            match (&va, &vb) {
                (Term::Var(x), _) => {
                    let target = rb.map(Term::Var).unwrap_or(vb);
                    self.set(*x, Some(target));
                }
                (_, Term::Var(y)) => {
                    let target = ra.map(Term::Var).unwrap_or(va);
                    self.set(*y, Some(target));
                }
                (Term::Int(i), Term::Int(j)) if i == j => {}
                (Term::Compound(f, xs), Term::Compound(g, ys))
                    if f == g && xs.len() == ys.len() =>
                {
                    if let (Some(x), Some(y)) = (ra, rb) {
                        self.set(x, Some(Term::Var(y)));
                    }
                    stack.extend(xs.iter().cloned().zip(ys.iter().cloned()).rev());
                }
                _ => {
                    self.rollback(m);
                    return Err(Clash);
                }
            }
        }
        self.commit(m);
        Ok(())
    }

    fn node_of(&self, t: &Term) -> (Option<NodeId>, Term) {
        let (rep, value) = self.walk(t);
        let id = match (&value, rep) {
            (Term::Var(_), _) => None,
            (_, Some(r)) => Some(NodeId::Var(r)),
            (Term::Compound(_, args), None) if !args.is_empty() => {
                Some(NodeId::Ptr(Arc::as_ptr(args) as *const Term as usize))
            }
            _ => None,
        };
        (id, value)
    }

    /// True iff `s` and `t` denote the same rational tree under this store.
    /// Distinct unbound variables are distinct trees.
    pub fn rational_equal(&self, s: &Term, t: &Term) -> bool {
        let mut visited: HashSet<(NodeId, NodeId)> = HashSet::new();
        let mut stack = vec![(s.clone(), t.clone())];
        while let Some((a, b)) = stack.pop() {
            let (ia, va) = self.node_of(&a);
            let (ib, vb) = self.node_of(&b);
            match (&va, &vb) {
                (Term::Var(x), Term::Var(y)) if x == y => {}
                (Term::Int(i), Term::Int(j)) if i == j => {}
                (Term::Compound(f, xs), Term::Compound(g, ys))
                    if f == g && xs.len() == ys.len() =>
                {
                    if let (Some(ia), Some(ib)) = (ia, ib) {
                        if !visited.insert((ia, ib)) {
                            continue;
                        }
                    }
                    stack.extend(xs.iter().cloned().zip(ys.iter().cloned()));
                }
                _ => return false,
            }
        }
        true
    }

    pub fn rational_equal_atoms(&self, a: &Atom, b: &Atom) -> bool {
        a.predicate == b.predicate
            && a.args.len() == b.args.len()
            && a.args
                .iter()
                .zip(&b.args)
                .all(|(x, y)| self.rational_equal(x, y))
    }

    /// Copies the rational term denoted by `t` onto fresh variables drawn from
    /// `fresh`, preserving sharing and cycles. Unbound variables are replaced
    /// by fresh unbound ones, so later bindings of the original do not affect
    /// the copy.
    pub fn copy_term(&mut self, t: &Term, fresh: &mut impl FnMut() -> VarId) -> Term {
        let mut memo: HashMap<VarId, VarId> = HashMap::new();
        self.copy_rec(t, fresh, &mut memo)
    }

    pub fn copy_atom(&mut self, a: &Atom, fresh: &mut impl FnMut() -> VarId) -> Atom {
        let mut memo: HashMap<VarId, VarId> = HashMap::new();
        Atom {
            predicate: a.predicate.clone(),
            args: a
                .args
                .iter()
                .map(|t| self.copy_rec(t, fresh, &mut memo))
                .collect(),
        }
    }

    fn copy_rec(
        &mut self,
        t: &Term,
        fresh: &mut impl FnMut() -> VarId,
        memo: &mut HashMap<VarId, VarId>,
    ) -> Term {
        match t {
            Term::Var(v) => {
                let rep = self.deref_var(*v);
                if let Some(&c) = memo.get(&rep) {
                    return Term::Var(c);
                }
                let c = fresh();
                memo.insert(rep, c);
                if let Some(value) = self.binding(rep).cloned() {
                    let copied = self.copy_rec(&value, fresh, memo);
                    self.set(c, Some(copied));
                }
                Term::Var(c)
            }
            Term::Int(_) => t.clone(),
            Term::Compound(_, args) if args.is_empty() => t.clone(),
            Term::Compound(f, args) => Term::Compound(
                f.clone(),
                args.iter().map(|a| self.copy_rec(a, fresh, memo)).collect(),
            ),
        }
    }

    /// Expands `t` to a finite tree, cutting at `depth` with the placeholder
    /// constant `...`. Mostly useful for tests and debugging.
    pub fn unfold(&self, t: &Term, depth: usize) -> Term {
        if depth == 0 {
            return Term::constant("...");
        }
        match self.resolve(t) {
            Term::Compound(f, args) if !args.is_empty() => Term::Compound(
                f,
                args.iter().map(|a| self.unfold(a, depth - 1)).collect(),
            ),
            other => other,
        }
    }

    /// Variable representatives occurring in the bound value of `rep`.
    fn children(&self, rep: VarId) -> Vec<VarId> {
        let mut out = Vec::new();
        if let Some(value) = self.binding(rep) {
            value.for_each_var(&mut |v| out.push(self.deref_var(v)));
        }
        out
    }

    fn reaches(&self, from: VarId, target: VarId) -> bool {
        let mut seen = HashSet::new();
        let mut stack = self.children(from);
        while let Some(v) = stack.pop() {
            if v == target {
                return true;
            }
            if self.binding(v).is_some() && seen.insert(v) {
                stack.extend(self.children(v));
            }
        }
        false
    }
}

impl BindStore {
    /// True when both stores bind the same variables to the same terms.
    pub fn same_bindings(&self, other: &BindStore) -> bool {
        let n = self.bindings.len().max(other.bindings.len());
        (0..n as u32).all(|i| self.binding(VarId(i)) == other.binding(VarId(i)))
    }
}

/// Solution equivalence of two stores on `vars`: every variable denotes the
/// same rational tree in both, with unbound classes matched one-to-one.
pub fn solution_equivalent(a: &BindStore, b: &BindStore, vars: &[VarId]) -> bool {
    let mut visited: HashSet<(NodeId, NodeId)> = HashSet::new();
    let mut fwd: HashMap<VarId, VarId> = HashMap::new();
    let mut back: HashMap<VarId, VarId> = HashMap::new();
    let mut stack: Vec<(Term, Term)> = vars.iter().map(|v| (Term::Var(*v), Term::Var(*v))).collect();
    while let Some((s, t)) = stack.pop() {
        let (is, vs) = a.node_of(&s);
        let (it, vt) = b.node_of(&t);
        match (&vs, &vt) {
            (Term::Var(x), Term::Var(y)) => {
                if *fwd.entry(*x).or_insert(*y) != *y || *back.entry(*y).or_insert(*x) != *x {
                    return false;
                }
            }
            (Term::Int(i), Term::Int(j)) if i == j => {}
            (Term::Compound(f, xs), Term::Compound(g, ys)) if f == g && xs.len() == ys.len() => {
                if let (Some(is), Some(it)) = (is, it) {
                    if !visited.insert((is, it)) {
                        continue;
                    }
                }
                stack.extend(xs.iter().cloned().zip(ys.iter().cloned()));
            }
            _ => return false,
        }
    }
    true
}

/// An answer: a finite equation set over named variables. Variables inside
/// the right-hand sides index into `names`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AnswerSet {
    pub names: Vec<String>,
    pub equations: Vec<(VarId, Term)>,
}

impl AnswerSet {
    pub fn name(&self, v: VarId) -> &str {
        &self.names[v.index()]
    }

    /// Renders one equation; a variable equal to itself prints as `X = _`.
    pub fn equation_to_string(&self, (lhs, rhs): &(VarId, Term)) -> String {
        let rhs = if *rhs == Term::Var(*lhs) {
            "_".to_string()
        } else {
            term_to_string(rhs, &|v| self.names[v.index()].clone())
        };
        format!("{} = {}", self.name(*lhs), rhs)
    }

    pub fn value_of(&self, name: &str) -> Option<&Term> {
        self.equations
            .iter()
            .find(|(v, _)| self.names[v.index()] == name)
            .map(|(_, t)| t)
    }

    /// Loads the equations into `store`, mapping answer variable `i` to store
    /// variable `base + i`. Returns the store variable of each name.
    pub fn load_into(&self, store: &mut BindStore, base: u32) -> Result<HashMap<String, VarId>, Clash> {
        let shift = |t: &Term| t.map_vars(&mut |v| Term::var(v.0 + base));
        for (lhs, rhs) in &self.equations {
            store.unify(&Term::var(lhs.0 + base), &shift(rhs))?;
        }
        Ok(self
            .names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), VarId(i as u32 + base)))
            .collect())
    }
}

/// Builds the equation set describing the bindings of the query variables.
///
/// Query variables that lie on a cycle are referred to by name; remaining
/// anonymous cycles are cut at a fresh `_R<n>` variable with its own equation.
pub fn extract_answer(query_vars: &[(VarId, String)], store: &BindStore) -> AnswerSet {
    let mut names: Vec<String> = Vec::new();
    let mut slot: HashMap<VarId, VarId> = HashMap::new();
    let mut canonical: Vec<(VarId, VarId)> = Vec::new();

    for (v, name) in query_vars {
        let rep = store.deref_var(*v);
        let id = VarId(names.len() as u32);
        names.push(name.clone());
        slot.entry(rep).or_insert(id);
        canonical.push((id, rep));
    }

    // bound representatives rendered by reference rather than expanded
    let mut named: HashSet<VarId> = HashSet::new();
    for (_, rep) in &canonical {
        if store.binding(*rep).is_some() && store.reaches(*rep, *rep) {
            named.insert(*rep);
        }
    }

    // cut the cycles that avoid every named query variable
    let mut extra: Vec<VarId> = Vec::new();
    let mut done: HashSet<VarId> = HashSet::new();
    for (_, rep) in &canonical {
        if store.binding(*rep).is_none() {
            continue;
        }
        let mut on_path: HashSet<VarId> = HashSet::new();
        cut_cycles(store, *rep, true, &mut named, &mut extra, &mut done, &mut on_path);
    }
    for rep in &extra {
        let id = VarId(names.len() as u32);
        names.push(format!("_R{}", id.0 - query_vars.len() as u32 + 1));
        slot.insert(*rep, id);
    }

    let mut render = Renderer {
        store,
        named: &named,
        names: &mut names,
        slot: &mut slot,
        anon: 0,
    };
    let mut equations = Vec::new();
    for (id, rep) in &canonical {
        let owner = render.slot[rep];
        if owner != *id {
            equations.push((*id, Term::Var(owner)));
        } else if store.binding(*rep).is_none() {
            equations.push((*id, Term::Var(*id)));
        } else {
            let value = store.binding(*rep).cloned().expect("bound");
            equations.push((*id, render.term(&value)));
        }
    }
    for rep in &extra {
        let id = render.slot[rep];
        let value = store.binding(*rep).cloned().expect("bound");
        equations.push((id, render.term(&value)));
    }
    AnswerSet { names, equations }
}

fn cut_cycles(
    store: &BindStore,
    rep: VarId,
    root: bool,
    named: &mut HashSet<VarId>,
    extra: &mut Vec<VarId>,
    done: &mut HashSet<VarId>,
    on_path: &mut HashSet<VarId>,
) {
    if !root && named.contains(&rep) {
        return;
    }
    if done.contains(&rep) {
        return;
    }
    on_path.insert(rep);
    for child in store.children(rep) {
        if store.binding(child).is_none() || named.contains(&child) {
            continue;
        }
        if on_path.contains(&child) {
            named.insert(child);
            extra.push(child);
            continue;
        }
        cut_cycles(store, child, false, named, extra, done, on_path);
    }
    on_path.remove(&rep);
    done.insert(rep);
}

struct Renderer<'a> {
    store: &'a BindStore,
    named: &'a HashSet<VarId>,
    names: &'a mut Vec<String>,
    slot: &'a mut HashMap<VarId, VarId>,
    anon: u32,
}

impl Renderer<'_> {
    fn term(&mut self, t: &Term) -> Term {
        match t {
            Term::Var(v) => {
                let rep = self.store.deref_var(*v);
                match self.store.binding(rep).cloned() {
                    Some(value) if !self.named.contains(&rep) => self.term(&value),
                    _ => Term::Var(self.slot_for(rep)),
                }
            }
            Term::Int(_) => t.clone(),
            Term::Compound(_, args) if args.is_empty() => t.clone(),
            Term::Compound(f, args) => {
                Term::Compound(f.clone(), args.iter().map(|a| self.term(a)).collect())
            }
        }
    }

    fn slot_for(&mut self, rep: VarId) -> VarId {
        if let Some(id) = self.slot.get(&rep) {
            return *id;
        }
        self.anon += 1;
        let id = VarId(self.names.len() as u32);
        self.names.push(format!("_G{}", self.anon));
        self.slot.insert(rep, id);
        id
    }
}
