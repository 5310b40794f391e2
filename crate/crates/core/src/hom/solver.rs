//! Backtracking matcher of atom patterns into a fact index.
//!
//! A pattern is a conjunction of atoms whose argument slots are either fixed
//! values or numbered variables. The search picks, at every node, the
//! remaining atom with the fewest consistent candidate facts (ties broken by
//! how often its unbound variables occur across the pattern, then by
//! position), so an atom with no candidate prunes the branch immediately.

use std::collections::{HashMap, HashSet};
use std::ops::ControlFlow;

use crate::model::{Fact, Instance, Symbol, Value};

/// Facts with per-predicate and per-(predicate, position, value) postings.
#[derive(Default, Debug, Clone)]
pub(crate) struct FactIndex {
    facts: Vec<Fact>,
    present: HashSet<Fact>,
    by_pred: HashMap<Symbol, Vec<usize>>,
    by_arg: HashMap<(Symbol, usize, Value), Vec<usize>>,
}

impl FactIndex {
    pub(crate) fn new() -> Self {
        FactIndex::default()
    }

    pub(crate) fn from_instance(inst: &Instance) -> Self {
        let mut idx = FactIndex::new();
        for f in inst.facts() {
            idx.insert(f.clone());
        }
        idx
    }

    pub(crate) fn insert(&mut self, fact: Fact) {
        if !self.present.insert(fact.clone()) {
            return;
        }
        let id = self.facts.len();
        self.by_pred.entry(fact.predicate.clone()).or_default().push(id);
        for (pos, v) in fact.args.iter().enumerate() {
            self.by_arg
                .entry((fact.predicate.clone(), pos, v.clone()))
                .or_default()
                .push(id);
        }
        self.facts.push(fact);
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Slot {
    Var(usize),
    Fixed(Value),
}

#[derive(Clone, Debug)]
pub(crate) struct PatternAtom {
    pub predicate: Symbol,
    pub slots: Vec<Slot>,
}

#[derive(Clone, Debug, Default)]
pub(crate) struct Pattern {
    pub atoms: Vec<PatternAtom>,
    pub num_vars: usize,
}

#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct SearchOptions {
    /// Distinct variables must take distinct values.
    pub injective: bool,
    /// Variables may only take null values.
    pub nulls_only: bool,
}

pub(crate) type Assignment = Vec<Option<Value>>;

struct Search<'a> {
    pattern: &'a Pattern,
    index: &'a FactIndex,
    opts: SearchOptions,
    remaining: Vec<bool>,
    weight: Vec<usize>,
    used: HashMap<Value, usize>,
}

impl<'a> Search<'a> {
    fn slot_value<'v>(&self, slot: &'v Slot, asg: &'v Assignment) -> Option<&'v Value> {
        match slot {
            Slot::Fixed(v) => Some(v),
            Slot::Var(i) => asg[*i].as_ref(),
        }
    }

    /// Binds the variables of `atom` to `fact`; returns the newly bound ones,
    /// or `None` (with nothing bound) if the fact is inconsistent.
    fn bind(&mut self, atom: &PatternAtom, fact: &Fact, asg: &mut Assignment) -> Option<Vec<usize>> {
        let mut bound = Vec::new();
        for (slot, v) in atom.slots.iter().zip(&fact.args) {
            let ok = match slot {
                Slot::Fixed(f) => f == v,
                Slot::Var(i) => match &asg[*i] {
                    Some(cur) => cur == v,
                    None => {
                        let allowed = (!self.opts.nulls_only || v.is_null())
                            && (!self.opts.injective || !self.used.contains_key(v));
                        if allowed {
                            asg[*i] = Some(v.clone());
                            *self.used.entry(v.clone()).or_default() += 1;
                            bound.push(*i);
                        }
                        allowed
                    }
                },
            };
            if !ok {
                self.unbind(&bound, asg);
                return None;
            }
        }
        Some(bound)
    }

    fn unbind(&mut self, bound: &[usize], asg: &mut Assignment) {
        for &i in bound {
            if let Some(v) = asg[i].take() {
                if let Some(n) = self.used.get_mut(&v) {
                    *n -= 1;
                    if *n == 0 {
                        self.used.remove(&v);
                    }
                }
            }
        }
    }

    fn postings(&self, atom: &PatternAtom, asg: &Assignment) -> &'a [usize] {
        let mut best: Option<&'a [usize]> = None;
        for (pos, slot) in atom.slots.iter().enumerate() {
            if let Some(v) = self.slot_value(slot, asg) {
                let list = self
                    .index
                    .by_arg
                    .get(&(atom.predicate.clone(), pos, v.clone()))
                    .map(Vec::as_slice)
                    .unwrap_or(&[]);
                if best.is_none_or(|b| list.len() < b.len()) {
                    best = Some(list);
                }
            }
        }
        best.unwrap_or_else(|| {
            self.index
                .by_pred
                .get(&atom.predicate)
                .map(Vec::as_slice)
                .unwrap_or(&[])
        })
    }

    fn candidates(&mut self, atom: &PatternAtom, asg: &mut Assignment) -> Vec<usize> {
        let index = self.index;
        let list = self.postings(atom, asg);
        list.iter()
            .copied()
            .filter(|&id| {
                let fact = &index.facts[id];
                if fact.args.len() != atom.slots.len() {
                    return false;
                }
                match self.bind(atom, fact, asg) {
                    Some(bound) => {
                        self.unbind(&bound, asg);
                        true
                    }
                    None => false,
                }
            })
            .collect()
    }

    fn pick(&mut self, asg: &mut Assignment) -> Option<(usize, Vec<usize>)> {
        let mut best: Option<(usize, Vec<usize>, usize)> = None;
        for ai in 0..self.pattern.atoms.len() {
            if !self.remaining[ai] {
                continue;
            }
            let atom = &self.pattern.atoms[ai];
            let cands = self.candidates(atom, asg);
            let weight: usize = atom
                .slots
                .iter()
                .filter_map(|s| match s {
                    Slot::Var(i) if asg[*i].is_none() => Some(self.weight[*i]),
                    _ => None,
                })
                .sum();
            let better = match &best {
                None => true,
                Some((_, c, w)) => cands.len() < c.len() || (cands.len() == c.len() && weight > *w),
            };
            if better {
                let empty = cands.is_empty();
                best = Some((ai, cands, weight));
                if empty {
                    break;
                }
            }
        }
        best.map(|(a, c, _)| (a, c))
    }

    fn run(&mut self, asg: &mut Assignment, visit: &mut dyn FnMut(&Assignment) -> ControlFlow<()>) -> ControlFlow<()> {
        let Some((ai, cands)) = self.pick(asg) else {
            return visit(asg);
        };
        self.remaining[ai] = false;
        let pattern = self.pattern;
        let index = self.index;
        for id in cands {
            let atom = &pattern.atoms[ai];
            if let Some(bound) = self.bind(atom, &index.facts[id], asg) {
                let flow = self.run(asg, visit);
                self.unbind(&bound, asg);
                if flow.is_break() {
                    self.remaining[ai] = true;
                    return flow;
                }
            }
        }
        self.remaining[ai] = true;
        ControlFlow::Continue(())
    }
}

/// Enumerates every extension of `initial` that maps all pattern atoms into
/// `index`. `visit` may stop the search by returning `Break`.
pub(crate) fn search(
    pattern: &Pattern,
    index: &FactIndex,
    initial: Assignment,
    opts: SearchOptions,
    mut visit: impl FnMut(&Assignment) -> ControlFlow<()>,
) {
    debug_assert_eq!(initial.len(), pattern.num_vars);
    let mut weight = vec![0usize; pattern.num_vars];
    for a in &pattern.atoms {
        for s in &a.slots {
            if let Slot::Var(i) = s {
                weight[*i] += 1;
            }
        }
    }
    let mut used = HashMap::new();
    for v in initial.iter().flatten() {
        *used.entry(v.clone()).or_default() += 1;
    }
    let mut s = Search {
        pattern,
        index,
        opts,
        remaining: vec![true; pattern.atoms.len()],
        weight,
        used,
    };
    let mut asg = initial;
    let _ = s.run(&mut asg, &mut visit);
}

/// First solution, if any.
pub(crate) fn find_one(
    pattern: &Pattern,
    index: &FactIndex,
    initial: Assignment,
    opts: SearchOptions,
) -> Option<Assignment> {
    let mut found = None;
    search(pattern, index, initial, opts, |asg| {
        found = Some(asg.clone());
        ControlFlow::Break(())
    });
    found
}
