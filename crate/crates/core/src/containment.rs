//! Containment and equivalence of mappings.
//!
//! `M ⊆ M'` holds iff for every dummy instance `D` of `M` the chase of `D`
//! under `M` maps homomorphically into the chase of `D` under `M'`. The left
//! chase must terminate within the configured budget. The right chase is
//! explored level by level: a homomorphism into any prefix is a homomorphism
//! into the full chase, so a dummy passes as soon as one is found, and fails
//! once the prefix at the level bound (or the saturated chase) admits none.

use std::fmt;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::chase::{default_level_bound, is_weakly_acyclic, ChaseConfig, ChaseError, ChaseMode, ChaseRun, RunState};
use crate::dummy::{dummy_instances, Dummy};
use crate::hom::{find_homomorphism, Homomorphism};
use crate::model::{Instance, Level, ModelError, SchemaMapping};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LevelBound {
    /// `|Σ'| · (W + 1)^W` over the dependencies of the right-hand mapping.
    #[default]
    Auto,
    Fixed(u64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContainmentConfig {
    pub level_bound: LevelBound,
    /// Budget of the left chase. Its fact limit also caps right prefixes.
    pub chase_budget: ChaseConfig,
    /// Levels added to the right prefix between homomorphism attempts.
    pub deepening_step: u64,
    /// Worker threads for per-dummy checks.
    pub threads: usize,
}

impl Default for ContainmentConfig {
    fn default() -> Self {
        ContainmentConfig {
            level_bound: LevelBound::Auto,
            chase_budget: ChaseConfig::default(),
            deepening_step: 1,
            threads: 1,
        }
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ContainmentError {
    #[error("mappings are over different source or target schemas")]
    SchemaMismatch,
    #[error("{which} mapping is invalid: {source}")]
    InvalidMapping { which: &'static str, source: ModelError },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Chase(#[from] ChaseError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Contained,
    NotContained,
    Inconclusive(String),
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Contained => f.write_str("CONTAINED"),
            Outcome::NotContained => f.write_str("NOT CONTAINED"),
            Outcome::Inconclusive(why) => write!(f, "INCONCLUSIVE ({why})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DummyOutcome {
    Passed,
    Failed,
    Inconclusive(String),
}

/// What happened to one dummy instance.
#[derive(Clone, Debug)]
pub struct DummyWitness {
    pub dummy: Dummy,
    pub outcome: DummyOutcome,
    /// The left chase, when it terminated.
    pub left_chase: Option<Instance>,
    /// Highest level of the right chase prefix that was searched.
    pub right_level: u64,
    /// The right chase ran to completion below the bound.
    pub right_saturated: bool,
    pub right_prefix_size: usize,
    pub homomorphism: Option<Homomorphism>,
    pub elapsed: Duration,
}

impl DummyWitness {
    pub fn left_chase_size(&self) -> usize {
        self.left_chase.as_ref().map_or(0, Instance::len)
    }
}

#[derive(Clone, Debug)]
pub struct Verdict {
    pub outcome: Outcome,
    /// One record per dummy examined, in dummy order. Checking stops at the
    /// first failing dummy.
    pub witnesses: Vec<DummyWitness>,
    pub bound_used: u64,
    /// Advisory only: finiteness of the left chases is witnessed by running
    /// them, not by this syntactic test.
    pub left_weakly_acyclic: bool,
    pub right_weakly_acyclic: bool,
}

impl Verdict {
    pub fn is_contained(&self) -> bool {
        self.outcome == Outcome::Contained
    }

    pub fn failing_dummy(&self) -> Option<&DummyWitness> {
        self.witnesses.iter().find(|w| w.outcome == DummyOutcome::Failed)
    }
}

fn prepare(m: &SchemaMapping, m2: &SchemaMapping, cfg: &ContainmentConfig) -> Result<(), ContainmentError> {
    m.ensure_valid()
        .map_err(|source| ContainmentError::InvalidMapping { which: "left", source })?;
    m2.ensure_valid()
        .map_err(|source| ContainmentError::InvalidMapping { which: "right", source })?;
    if !m.same_schemas(m2) {
        return Err(ContainmentError::SchemaMismatch);
    }
    if cfg.deepening_step == 0 {
        return Err(ContainmentError::InvalidConfig(
            "deepening step must be at least 1".into(),
        ));
    }
    if cfg.threads == 0 {
        return Err(ContainmentError::InvalidConfig(
            "thread count must be at least 1".into(),
        ));
    }
    Ok(())
}

/// Decides `m ⊆ m2`.
///
/// `Contained` is always sound. `NotContained` is exact when the failing
/// dummy's right chase saturated, and otherwise relative to `bound_used`
/// being a sufficient horizon.
pub fn check_containment(
    m: &SchemaMapping,
    m2: &SchemaMapping,
    cfg: &ContainmentConfig,
) -> Result<Verdict, ContainmentError> {
    prepare(m, m2, cfg)?;
    let left_tgds = m.all_tgds();
    let right_tgds = m2.all_tgds();
    let bound_used = match cfg.level_bound {
        LevelBound::Auto => default_level_bound(&right_tgds),
        LevelBound::Fixed(n) => n,
    };
    let mut verdict = Verdict {
        outcome: Outcome::Contained,
        witnesses: Vec::new(),
        bound_used,
        left_weakly_acyclic: is_weakly_acyclic(&left_tgds),
        right_weakly_acyclic: is_weakly_acyclic(&right_tgds),
    };
    if left_tgds.iter().chain(&right_tgds).any(|t| t.mentions_constants()) {
        verdict.outcome = Outcome::Inconclusive(
            "dependencies mention constants; the dummy-instance test assumes constant-free dependencies".into(),
        );
        return Ok(verdict);
    }

    let union = m.union_schema()?;
    let dummies = dummy_instances(m);
    let job = |d: &Dummy| -> Result<DummyWitness, ContainmentError> {
        check_dummy(d, &union, &left_tgds, &right_tgds, bound_used, cfg)
    };

    let results: Vec<Result<DummyWitness, ContainmentError>> = if cfg.threads <= 1 || dummies.len() <= 1 {
        let mut out = Vec::new();
        for d in dummies.iter() {
            let w = job(d);
            let stop = matches!(&w, Ok(w) if w.outcome == DummyOutcome::Failed) || w.is_err();
            out.push(w);
            if stop {
                break;
            }
        }
        out
    } else {
        let all: Vec<&Dummy> = dummies.iter().collect();
        let threads = cfg.threads.min(all.len());
        let mut slots: Vec<Option<Result<DummyWitness, ContainmentError>>> = vec![None; all.len()];
        std::thread::scope(|s| {
            let handles: Vec<_> = (0..threads)
                .map(|t| {
                    let all = &all;
                    let job = &job;
                    s.spawn(move || {
                        (t..all.len())
                            .step_by(threads)
                            .map(|i| (i, job(all[i])))
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            for h in handles {
                for (i, r) in h.join().expect("dummy check panicked") {
                    slots[i] = Some(r);
                }
            }
        });
        let mut out = Vec::new();
        for r in slots.into_iter().flatten() {
            let stop = matches!(&r, Ok(w) if w.outcome == DummyOutcome::Failed) || r.is_err();
            out.push(r);
            if stop {
                break;
            }
        }
        out
    };

    for r in results {
        verdict.witnesses.push(r?);
    }
    verdict.outcome = if verdict.failing_dummy().is_some() {
        Outcome::NotContained
    } else if let Some(DummyOutcome::Inconclusive(why)) = verdict
        .witnesses
        .iter()
        .map(|w| &w.outcome)
        .find(|o| matches!(o, DummyOutcome::Inconclusive(_)))
    {
        Outcome::Inconclusive(why.clone())
    } else {
        Outcome::Contained
    };
    Ok(verdict)
}

fn to_level(n: u64) -> Level {
    n.min(Level::MAX as u64) as Level
}

fn check_dummy(
    dummy: &Dummy,
    union: &std::sync::Arc<crate::model::Schema>,
    left_tgds: &[crate::model::Tgd],
    right_tgds: &[crate::model::Tgd],
    bound: u64,
    cfg: &ContainmentConfig,
) -> Result<DummyWitness, ContainmentError> {
    let started = Instant::now();
    let d = dummy.instance.with_schema(union.clone())?;
    let mut witness = DummyWitness {
        dummy: dummy.clone(),
        outcome: DummyOutcome::Passed,
        left_chase: None,
        right_level: 0,
        right_saturated: false,
        right_prefix_size: 0,
        homomorphism: None,
        elapsed: Duration::ZERO,
    };

    let mut left = ChaseRun::new(&d, left_tgds, cfg.chase_budget.mode)?;
    if left.advance(cfg.chase_budget.max_level, cfg.chase_budget.max_facts) != RunState::Saturated {
        witness.outcome = DummyOutcome::Inconclusive(format!(
            "left chase of {} not shown finite within the budget",
            dummy.fact()
        ));
        witness.elapsed = started.elapsed();
        return Ok(witness);
    }
    let left = left.into_instance();

    let mut right = ChaseRun::new(&d, right_tgds, ChaseMode::Oblivious)?;
    let mut level = cfg.deepening_step.min(bound);
    loop {
        let state = right.advance(Some(to_level(level)), cfg.chase_budget.max_facts);
        witness.right_level = level;
        witness.right_prefix_size = right.instance().len();
        if state == RunState::BudgetExhausted {
            witness.outcome = DummyOutcome::Inconclusive(format!(
                "right chase prefix of {} exceeded the fact budget before level {level}",
                dummy.fact()
            ));
            break;
        }
        if let Some(h) = find_homomorphism(&left, right.instance())? {
            witness.homomorphism = Some(h);
            break;
        }
        if state == RunState::Saturated {
            witness.right_saturated = true;
            witness.outcome = DummyOutcome::Failed;
            break;
        }
        if level >= bound {
            witness.outcome = DummyOutcome::Failed;
            break;
        }
        level = level.saturating_add(cfg.deepening_step).min(bound);
    }
    witness.left_chase = Some(left);
    witness.elapsed = started.elapsed();
    Ok(witness)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// `m ⊆ m2`
    Forward,
    /// `m2 ⊆ m`
    Backward,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Forward => "A ⊆ B",
            Direction::Backward => "B ⊆ A",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EquivalenceOutcome {
    Equivalent,
    NotEquivalent { failing: Direction },
    Inconclusive(String),
}

impl fmt::Display for EquivalenceOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EquivalenceOutcome::Equivalent => f.write_str("EQUIVALENT"),
            EquivalenceOutcome::NotEquivalent { failing } => {
                write!(f, "NOT EQUIVALENT ({failing} fails)")
            }
            EquivalenceOutcome::Inconclusive(why) => write!(f, "INCONCLUSIVE ({why})"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct EquivalenceVerdict {
    pub outcome: EquivalenceOutcome,
    pub forward: Verdict,
    pub backward: Verdict,
}

/// Decides `m ≡ m2` by checking containment both ways. A definite failure
/// in either direction wins over an inconclusive one.
pub fn check_equivalence(
    m: &SchemaMapping,
    m2: &SchemaMapping,
    cfg: &ContainmentConfig,
) -> Result<EquivalenceVerdict, ContainmentError> {
    let forward = check_containment(m, m2, cfg)?;
    let backward = check_containment(m2, m, cfg)?;
    let outcome = match (&forward.outcome, &backward.outcome) {
        (Outcome::NotContained, _) => EquivalenceOutcome::NotEquivalent {
            failing: Direction::Forward,
        },
        (_, Outcome::NotContained) => EquivalenceOutcome::NotEquivalent {
            failing: Direction::Backward,
        },
        (Outcome::Inconclusive(why), _) | (_, Outcome::Inconclusive(why)) => {
            EquivalenceOutcome::Inconclusive(why.clone())
        }
        (Outcome::Contained, Outcome::Contained) => EquivalenceOutcome::Equivalent,
    };
    Ok(EquivalenceVerdict {
        outcome,
        forward,
        backward,
    })
}
