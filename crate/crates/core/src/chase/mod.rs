//! The chase over LAV dependencies, with per-fact levels.
//!
//! Input facts sit at level 0. Firing a dependency on a fact at level `l`
//! adds its head facts at level `l + 1`. Triggers are processed first in,
//! first out, so facts are consumed in non-decreasing level order and the
//! facts of level at most `L` form a prefix of every longer run.

mod acyclicity;

use std::collections::{BTreeMap, VecDeque};

use thiserror::Error;

pub use acyclicity::{default_level_bound, is_richly_acyclic, is_weakly_acyclic};

use crate::hom::solver::{self, FactIndex, Pattern, PatternAtom, SearchOptions, Slot};
use crate::model::{Fact, Instance, Level, ModelError, NullGenerator, SchemaMapping, Symbol, Term, Tgd, Value};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ChaseError {
    #[error("dependency {index} is not LAV: its body has {atoms} atoms")]
    NotLav { index: usize, atoms: usize },
    #[error("dependency {index} contains a labelled null")]
    NullInDependency { index: usize },
    #[error("dependency {index} does not fit the instance schema: {source}")]
    Schema { index: usize, source: ModelError },
    #[error("trigger does not match a fact of the instance")]
    InvalidTrigger,
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum ChaseMode {
    /// Every trigger fires exactly once, whether or not its head already holds.
    #[default]
    Oblivious,
    /// A trigger fires only if its head has no image in the current instance.
    Restricted,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChaseConfig {
    pub mode: ChaseMode,
    /// Stop once the instance would grow beyond this many facts.
    pub max_facts: Option<usize>,
    /// Do not derive facts above this level.
    pub max_level: Option<Level>,
}

impl ChaseConfig {
    pub const DEFAULT_MAX_FACTS: usize = 100_000;

    pub fn unbounded() -> Self {
        ChaseConfig {
            mode: ChaseMode::Oblivious,
            max_facts: None,
            max_level: None,
        }
    }
}

impl Default for ChaseConfig {
    fn default() -> Self {
        ChaseConfig {
            mode: ChaseMode::Oblivious,
            max_facts: Some(Self::DEFAULT_MAX_FACTS),
            max_level: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChaseStatus {
    Terminated,
    BudgetExhausted,
}

#[derive(Clone, Debug)]
pub struct ChaseResult {
    pub instance: Instance,
    pub status: ChaseStatus,
    /// Number of chase steps applied.
    pub steps: usize,
}

impl ChaseResult {
    pub fn terminated(&self) -> bool {
        self.status == ChaseStatus::Terminated
    }
}

/// A dependency together with the assignment of its body variables that
/// sends the body atom onto `fact`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trigger {
    pub tgd: Tgd,
    pub fact: Fact,
    pub binding: BTreeMap<Symbol, Value>,
}

/// Every trigger of `tgd` on `inst`, in canonical fact order.
pub fn triggers(inst: &Instance, tgd: &Tgd) -> Result<Vec<Trigger>, ChaseError> {
    let compiled = CompiledTgd::new(0, tgd)?;
    Ok(inst
        .facts()
        .filter_map(|f| {
            compiled.match_body(f).map(|asg| Trigger {
                tgd: tgd.clone(),
                fact: f.clone(),
                binding: compiled.named_binding(&asg),
            })
        })
        .collect())
}

/// Head facts produced by one trigger, with fresh nulls for existentials.
///
/// Facts already in `inst` are left out; new facts get the level of the
/// matched fact plus one.
pub fn chase_step(
    inst: &Instance,
    trigger: &Trigger,
    gen: &mut NullGenerator,
) -> Result<Vec<(Fact, Level)>, ChaseError> {
    let compiled = CompiledTgd::new(0, &trigger.tgd)?;
    let level = inst.level_of(&trigger.fact).ok_or(ChaseError::InvalidTrigger)?;
    let asg = compiled.match_body(&trigger.fact).ok_or(ChaseError::InvalidTrigger)?;
    if compiled.named_binding(&asg) != trigger.binding {
        return Err(ChaseError::InvalidTrigger);
    }
    let mut out: Vec<(Fact, Level)> = Vec::new();
    for f in compiled.instantiate(&asg, gen) {
        inst.schema().check(&f.predicate, f.arity())?;
        if !inst.contains(&f) && !out.iter().any(|(g, _)| *g == f) {
            out.push((f, level + 1));
        }
    }
    Ok(out)
}

/// A LAV dependency with variables numbered: frontier first, then existentials.
#[derive(Clone, Debug)]
struct CompiledTgd {
    vars: Vec<Symbol>,
    frontier_len: usize,
    body: PatternAtom,
    head: Vec<PatternAtom>,
}

impl CompiledTgd {
    fn new(index: usize, tgd: &Tgd) -> Result<Self, ChaseError> {
        let body = tgd.body_atom().ok_or(ChaseError::NotLav {
            index,
            atoms: tgd.body.len(),
        })?;
        let mut vars: Vec<Symbol> = body.variables().cloned().collect();
        let frontier_len = vars.len();
        vars.extend(tgd.existentials());
        let slot = |t: &Term| -> Result<Slot, ChaseError> {
            match t {
                Term::Const(c) => Ok(Slot::Fixed(Value::Const(c.clone()))),
                Term::Null(_) => Err(ChaseError::NullInDependency { index }),
                Term::Var(v) => Ok(Slot::Var(vars.iter().position(|w| w == v).expect("numbered"))),
            }
        };
        let atom = |a: &crate::model::Atom| -> Result<PatternAtom, ChaseError> {
            Ok(PatternAtom {
                predicate: a.predicate.clone(),
                slots: a.args.iter().map(slot).collect::<Result<_, _>>()?,
            })
        };
        Ok(CompiledTgd {
            body: atom(body)?,
            head: tgd.head.iter().map(atom).collect::<Result<_, _>>()?,
            frontier_len,
            vars,
        })
    }

    fn check_schema(&self, index: usize, inst: &Instance) -> Result<(), ChaseError> {
        for a in std::iter::once(&self.body).chain(&self.head) {
            inst.schema()
                .check(&a.predicate, a.slots.len())
                .map_err(|source| ChaseError::Schema { index, source })?;
        }
        Ok(())
    }

    /// Assignment of the frontier variables sending the body onto `fact`.
    fn match_body(&self, fact: &Fact) -> Option<Vec<Value>> {
        if fact.predicate != self.body.predicate || fact.arity() != self.body.slots.len() {
            return None;
        }
        let mut asg: Vec<Option<Value>> = vec![None; self.frontier_len];
        for (slot, v) in self.body.slots.iter().zip(&fact.args) {
            match slot {
                Slot::Fixed(c) if c != v => return None,
                Slot::Fixed(_) => {}
                Slot::Var(i) => match &asg[*i] {
                    Some(cur) if cur != v => return None,
                    Some(_) => {}
                    None => asg[*i] = Some(v.clone()),
                },
            }
        }
        asg.into_iter().collect()
    }

    fn named_binding(&self, frontier: &[Value]) -> BTreeMap<Symbol, Value> {
        self.vars.iter().cloned().zip(frontier.iter().cloned()).collect()
    }

    fn instantiate(&self, frontier: &[Value], gen: &mut NullGenerator) -> Vec<Fact> {
        let mut full: Vec<Value> = frontier.to_vec();
        full.extend((self.frontier_len..self.vars.len()).map(|_| gen.fresh()));
        self.head
            .iter()
            .map(|a| Fact {
                predicate: a.predicate.clone(),
                args: a
                    .slots
                    .iter()
                    .map(|s| match s {
                        Slot::Fixed(v) => v.clone(),
                        Slot::Var(i) => full[*i].clone(),
                    })
                    .collect(),
            })
            .collect()
    }

    /// Whether the head already has an image extending `frontier`.
    fn satisfied(&self, frontier: &[Value], index: &FactIndex) -> bool {
        let pattern = Pattern {
            atoms: self.head.clone(),
            num_vars: self.vars.len(),
        };
        let mut initial: Vec<Option<Value>> = frontier.iter().cloned().map(Some).collect();
        initial.resize(self.vars.len(), None);
        solver::find_one(&pattern, index, initial, SearchOptions::default()).is_some()
    }
}

/// Where a call to [`ChaseRun::advance`] stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunState {
    /// No trigger is left: the chase is complete.
    Saturated,
    /// Every fact up to the requested level is present; more may follow.
    LevelReached,
    /// The fact budget was hit. The run cannot be resumed.
    BudgetExhausted,
}

/// A chase that can be advanced level by level.
///
/// Advancing to level `L` and then to `L' > L` yields exactly the instance
/// (including null ids) of advancing straight to `L'`.
#[derive(Clone, Debug)]
pub struct ChaseRun {
    tgds: Vec<CompiledTgd>,
    instance: Instance,
    queue: VecDeque<Fact>,
    gen: NullGenerator,
    index: Option<FactIndex>,
    steps: usize,
    exhausted: bool,
}

impl ChaseRun {
    /// Starts a run on `inst` (levels reset to 0). Fresh nulls come from a
    /// generator starting above every null of `inst`.
    pub fn new(inst: &Instance, tgds: &[Tgd], mode: ChaseMode) -> Result<Self, ChaseError> {
        let gen = NullGenerator::starting_at(inst.max_null_id() + 1);
        Self::with_generator(inst, tgds, mode, gen)
    }

    pub fn with_generator(
        inst: &Instance,
        tgds: &[Tgd],
        mode: ChaseMode,
        gen: NullGenerator,
    ) -> Result<Self, ChaseError> {
        let instance = inst.without_levels();
        let tgds = tgds
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let c = CompiledTgd::new(i, t)?;
                c.check_schema(i, &instance)?;
                Ok(c)
            })
            .collect::<Result<Vec<_>, ChaseError>>()?;
        let index = (mode == ChaseMode::Restricted).then(|| FactIndex::from_instance(&instance));
        Ok(ChaseRun {
            queue: instance.facts().cloned().collect(),
            tgds,
            instance,
            gen,
            index,
            steps: 0,
            exhausted: false,
        })
    }

    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    pub fn into_instance(self) -> Instance {
        self.instance
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn mode(&self) -> ChaseMode {
        if self.index.is_some() {
            ChaseMode::Restricted
        } else {
            ChaseMode::Oblivious
        }
    }

    pub fn generator(&self) -> &NullGenerator {
        &self.gen
    }

    /// Whether some queued fact still has a trigger that would fire.
    pub fn has_pending_triggers(&self) -> bool {
        self.queue.iter().any(|f| {
            self.tgds.iter().any(|t| match t.match_body(f) {
                None => false,
                Some(asg) => match &self.index {
                    Some(idx) => !t.satisfied(&asg, idx),
                    None => true,
                },
            })
        })
    }

    /// Fires triggers until every fact of level `max_level` or below is
    /// present, the chase saturates, or the instance would exceed
    /// `max_facts` facts.
    pub fn advance(&mut self, max_level: Option<Level>, max_facts: Option<usize>) -> RunState {
        if self.exhausted {
            return RunState::BudgetExhausted;
        }
        while let Some(front) = self.queue.front() {
            let level = self.instance.level_of(front).expect("queued facts are present");
            if max_level.is_some_and(|l| level >= l) {
                return if self.has_pending_triggers() {
                    RunState::LevelReached
                } else {
                    RunState::Saturated
                };
            }
            let fact = self.queue.pop_front().expect("front exists");
            for ti in 0..self.tgds.len() {
                let Some(asg) = self.tgds[ti].match_body(&fact) else {
                    continue;
                };
                if let Some(idx) = &self.index {
                    if self.tgds[ti].satisfied(&asg, idx) {
                        continue;
                    }
                }
                let produced = self.tgds[ti].instantiate(&asg, &mut self.gen);
                let fresh: Vec<Fact> = {
                    let mut v: Vec<Fact> = Vec::new();
                    for f in produced {
                        if !self.instance.contains(&f) && !v.contains(&f) {
                            v.push(f);
                        }
                    }
                    v
                };
                if max_facts.is_some_and(|m| self.instance.len() + fresh.len() > m) {
                    self.exhausted = true;
                    return RunState::BudgetExhausted;
                }
                self.steps += 1;
                for f in fresh {
                    self.instance
                        .insert_at(f.clone(), level + 1)
                        .expect("dependencies were checked against the schema");
                    if let Some(idx) = &mut self.index {
                        idx.insert(f.clone());
                    }
                    self.queue.push_back(f);
                }
            }
        }
        RunState::Saturated
    }
}

/// Chases `inst` with `tgds`. All dependencies must be LAV and use only
/// predicates of the instance schema.
pub fn chase(inst: &Instance, tgds: &[Tgd], cfg: &ChaseConfig) -> Result<ChaseResult, ChaseError> {
    let mut run = ChaseRun::new(inst, tgds, cfg.mode)?;
    Ok(finish(&mut run, cfg))
}

/// Like [`chase`], drawing fresh nulls from `gen`.
pub fn chase_with_generator(
    inst: &Instance,
    tgds: &[Tgd],
    cfg: &ChaseConfig,
    gen: &mut NullGenerator,
) -> Result<ChaseResult, ChaseError> {
    let mut run = ChaseRun::with_generator(inst, tgds, cfg.mode, gen.clone())?;
    let result = finish(&mut run, cfg);
    *gen = run.generator().clone();
    Ok(result)
}

fn finish(run: &mut ChaseRun, cfg: &ChaseConfig) -> ChaseResult {
    let status = match run.advance(cfg.max_level, cfg.max_facts) {
        RunState::Saturated => ChaseStatus::Terminated,
        RunState::LevelReached | RunState::BudgetExhausted => ChaseStatus::BudgetExhausted,
    };
    ChaseResult {
        instance: run.instance().clone(),
        status,
        steps: run.steps(),
    }
}

/// The facts of the oblivious chase whose level is at most `level`.
pub fn chase_to_level(inst: &Instance, tgds: &[Tgd], level: Level) -> Result<Instance, ChaseError> {
    let mut run = ChaseRun::new(inst, tgds, ChaseMode::Oblivious)?;
    run.advance(Some(level), None);
    Ok(run.into_instance())
}

/// Chases a source instance with `Σst ∪ Σt` over the union schema.
pub fn chase_mapping(source: &Instance, mapping: &SchemaMapping, cfg: &ChaseConfig) -> Result<ChaseResult, ChaseError> {
    let lifted = source.with_schema(mapping.union_schema()?)?;
    chase(&lifted, &mapping.all_tgds(), cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Atom, Schema};
    use crate::parser::{parse_mapping, SourceText};
    use std::sync::Arc;

    const M: &str = "source { r1/2; } target { r2/2; r3/2; }
        st { r1(X,Y) -> r2(Y,Z); r1(X,Y) -> r3(Z,Y); } t { r2(X,Y) -> r3(Z,X); }";
    const M1: &str = "source { r1/2; } target { r2/2; r3/2; }
        st { r1(X,Y) -> r2(Y,Z); } t { r2(X,Y) -> r3(Z,X); }";

    fn mapping(text: &str) -> SchemaMapping {
        parse_mapping(&SourceText::inline(text)).unwrap()
    }

    fn c(s: &str) -> Value {
        Value::constant(s)
    }

    fn union_instance(m: &SchemaMapping, facts: Vec<Fact>) -> Instance {
        Instance::from_facts(m.union_schema().unwrap(), facts).unwrap()
    }

    fn v(name: &str) -> Term {
        Term::var(name)
    }

    #[test]
    fn step_adds_level_one_fact_with_fresh_null() {
        let m = mapping(M);
        let i = union_instance(&m, vec![Fact::new("r1", vec![c("a"), c("b")])]);
        let trig = triggers(&i, &m.st_tgds[0]).unwrap().remove(0);
        let mut gen = NullGenerator::starting_at(5);
        let delta = chase_step(&i, &trig, &mut gen).unwrap();
        assert_eq!(delta, vec![(Fact::new("r2", vec![c("b"), Value::null(5)]), 1)]);
    }

    #[test]
    fn step_from_level_one_fact() {
        let m = mapping(M);
        let mut i = Instance::new(m.union_schema().unwrap());
        i.insert_at(Fact::new("r2", vec![c("b"), Value::null(1)]), 1).unwrap();
        let trig = triggers(&i, &m.t_tgds[0]).unwrap().remove(0);
        let mut gen = NullGenerator::starting_at(2);
        let delta = chase_step(&i, &trig, &mut gen).unwrap();
        assert_eq!(delta, vec![(Fact::new("r3", vec![Value::null(2), c("b")]), 2)]);
    }

    #[test]
    fn step_without_existentials_on_present_head_is_empty() {
        let schema = Arc::new(Schema::new([("r", 2), ("s", 1)]).unwrap());
        let tgd = Tgd::lav(Atom::new("r", vec![v("X"), v("Y")]), vec![Atom::new("s", vec![v("Y")])]);
        let i = Instance::from_facts(
            schema,
            [Fact::new("r", vec![c("a"), c("b")]), Fact::new("s", vec![c("b")])],
        )
        .unwrap();
        let trig = triggers(&i, &tgd).unwrap().remove(0);
        assert!(chase_step(&i, &trig, &mut NullGenerator::new()).unwrap().is_empty());
    }

    #[test]
    fn example_chases() {
        let m = mapping(M);
        let i = Instance::from_facts(m.source.clone(), [Fact::new("r1", vec![c("a"), c("b")])]).unwrap();
        let r = chase_mapping(&i, &m, &ChaseConfig::default()).unwrap();
        assert!(r.terminated());
        let target = r.instance.restrict_to(m.target.clone());
        assert_eq!(target.len(), 3);
        assert_eq!(target.nulls().len(), 3);
        assert_eq!(r.steps, 3);

        let m1 = mapping(M1);
        let r1 = chase_mapping(&i, &m1, &ChaseConfig::default()).unwrap();
        let target = r1.instance.restrict_to(m1.target.clone());
        assert_eq!(target.len(), 2);
        assert_eq!(target.nulls().len(), 2);
    }

    #[test]
    fn empty_instance_chase() {
        let m = mapping(M);
        let i = Instance::new(m.union_schema().unwrap());
        let r = chase(&i, &m.all_tgds(), &ChaseConfig::default()).unwrap();
        assert!(r.terminated());
        assert!(r.instance.is_empty());
        assert_eq!(r.steps, 0);
    }

    #[test]
    fn level_prefixes() {
        let m = mapping(M);
        let i = union_instance(&m, vec![Fact::new("r1", vec![c("a"), c("b")])]);
        let tgds = m.all_tgds();
        assert_eq!(chase_to_level(&i, &tgds, 0).unwrap(), i);
        let one = chase_to_level(&i, &tgds, 1).unwrap();
        let expected = union_instance(
            &m,
            vec![
                Fact::new("r1", vec![c("a"), c("b")]),
                Fact::new("r2", vec![c("b"), Value::null(1)]),
                Fact::new("r3", vec![Value::null(2), c("b")]),
            ],
        );
        assert_eq!(one, expected);
        let full = chase(&i, &tgds, &ChaseConfig::default()).unwrap().instance;
        assert_eq!(chase_to_level(&i, &tgds, 1_000).unwrap(), full);
        assert_eq!(full.level_of(&Fact::new("r3", vec![Value::null(3), c("b")])), Some(2));
    }

    #[test]
    fn budget_stops_infinite_chase() {
        let schema = Arc::new(Schema::new([("r", 2)]).unwrap());
        let tgd = Tgd::lav(
            Atom::new("r", vec![v("X"), v("Y")]),
            vec![Atom::new("r", vec![v("Y"), v("Z")])],
        );
        let i = Instance::from_facts(schema, [Fact::new("r", vec![c("a"), c("b")])]).unwrap();
        let cfg = ChaseConfig {
            max_facts: Some(50),
            ..ChaseConfig::default()
        };
        let r = chase(&i, std::slice::from_ref(&tgd), &cfg).unwrap();
        assert_eq!(r.status, ChaseStatus::BudgetExhausted);
        assert_eq!(r.instance.len(), 50);
        let by_level = ChaseConfig {
            max_level: Some(4),
            max_facts: None,
            ..ChaseConfig::default()
        };
        let r = chase(&i, &[tgd], &by_level).unwrap();
        assert_eq!(r.status, ChaseStatus::BudgetExhausted);
        assert_eq!(r.instance.len(), 5);
    }

    #[test]
    fn restricted_skips_satisfied_heads() {
        let m = mapping(M);
        let i = union_instance(&m, vec![Fact::new("r1", vec![c("a"), c("b")])]);
        let cfg = ChaseConfig {
            mode: ChaseMode::Restricted,
            ..ChaseConfig::default()
        };
        let r = chase(&i, &m.all_tgds(), &cfg).unwrap();
        assert!(r.terminated());
        // r3(_, b) from the second st-dependency already satisfies the target one.
        assert_eq!(r.instance.len(), 3);
    }

    #[test]
    fn non_lav_is_rejected() {
        let schema = Arc::new(Schema::new([("r", 2)]).unwrap());
        let tgd = Tgd::new(
            vec![
                Atom::new("r", vec![v("X"), v("Y")]),
                Atom::new("r", vec![v("Y"), v("Z")]),
            ],
            vec![Atom::new("r", vec![v("X"), v("Z")])],
        );
        let i = Instance::new(schema);
        assert!(matches!(
            chase(&i, &[tgd], &ChaseConfig::default()),
            Err(ChaseError::NotLav { index: 0, atoms: 2 })
        ));
    }

    #[test]
    fn incremental_advance_matches_direct_run() {
        let schema = Arc::new(Schema::new([("r", 2)]).unwrap());
        let tgds = vec![
            Tgd::lav(
                Atom::new("r", vec![v("X"), v("Y")]),
                vec![Atom::new("r", vec![v("Y"), v("Z")])],
            ),
            Tgd::lav(
                Atom::new("r", vec![v("X"), v("Y")]),
                vec![Atom::new("r", vec![v("Z"), v("X")])],
            ),
        ];
        let i = Instance::from_facts(schema, [Fact::new("r", vec![c("a"), c("b")])]).unwrap();
        let mut stepwise = ChaseRun::new(&i, &tgds, ChaseMode::Oblivious).unwrap();
        for l in 1..=5 {
            assert_eq!(stepwise.advance(Some(l), None), RunState::LevelReached);
        }
        let direct = chase_to_level(&i, &tgds, 5).unwrap();
        assert_eq!(stepwise.instance(), &direct);
        assert_eq!(direct.len(), 1 + 2 + 4 + 8 + 16 + 32);
    }
}
