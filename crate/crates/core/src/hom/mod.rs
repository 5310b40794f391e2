//! Homomorphisms and isomorphisms between instances.
//!
//! A homomorphism maps every value of the source instance to a value of the
//! target instance, is the identity on constants, and sends every source fact
//! to a target fact. Nulls may map to constants or to nulls; the target may
//! hold facts outside the image.

pub(crate) mod solver;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::model::{Fact, Instance, ModelError, NullId, Value};
use solver::{FactIndex, Pattern, PatternAtom, SearchOptions, Slot};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Homomorphism {
    map: BTreeMap<Value, Value>,
}

impl Homomorphism {
    pub fn new() -> Self {
        Homomorphism::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Value, Value)>) -> Self {
        Homomorphism {
            map: pairs.into_iter().collect(),
        }
    }

    /// The identity on every value of `inst`.
    pub fn identity(inst: &Instance) -> Self {
        Homomorphism::from_pairs(inst.values().into_iter().map(|v| (v.clone(), v)))
    }

    pub fn insert(&mut self, from: Value, to: Value) {
        self.map.insert(from, to);
    }

    pub fn get(&self, v: &Value) -> Option<&Value> {
        self.map.get(v)
    }

    pub fn apply_fact(&self, f: &Fact) -> Option<Fact> {
        let args = f
            .args
            .iter()
            .map(|v| self.map.get(v).cloned())
            .collect::<Option<Vec<_>>>()?;
        Some(Fact {
            predicate: f.predicate.clone(),
            args,
        })
    }

    /// `other ∘ self`: apply `self` first, then `other`.
    pub fn then(&self, other: &Homomorphism) -> Homomorphism {
        Homomorphism {
            map: self
                .map
                .iter()
                .filter_map(|(k, v)| other.map.get(v).map(|w| (k.clone(), w.clone())))
                .collect(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Value, &Value)> {
        self.map.iter()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Only the entries moving a null, which is what witnesses usually show.
    pub fn null_part(&self) -> impl Iterator<Item = (&Value, &Value)> {
        self.map.iter().filter(|(k, _)| k.is_null())
    }
}

impl fmt::Display for Homomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, v) in &self.map {
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            write!(f, "{k} -> {v}")?;
        }
        Ok(())
    }
}

struct Compiled {
    pattern: Pattern,
    nulls: Vec<NullId>,
    constants: BTreeSet<Value>,
}

/// Turns an instance into a pattern: its nulls become variables.
fn compile(inst: &Instance) -> Compiled {
    let nulls: Vec<NullId> = inst.nulls().into_iter().collect();
    let var_of: BTreeMap<NullId, usize> = nulls.iter().enumerate().map(|(i, n)| (*n, i)).collect();
    let mut constants = BTreeSet::new();
    let atoms = inst
        .facts()
        .map(|f| PatternAtom {
            predicate: f.predicate.clone(),
            slots: f
                .args
                .iter()
                .map(|v| match v {
                    Value::Null(n) => Slot::Var(var_of[n]),
                    Value::Const(_) => {
                        constants.insert(v.clone());
                        Slot::Fixed(v.clone())
                    }
                })
                .collect(),
        })
        .collect();
    Compiled {
        pattern: Pattern {
            atoms,
            num_vars: nulls.len(),
        },
        nulls,
        constants,
    }
}

fn search_between(src: &Instance, dst: &Instance, opts: SearchOptions) -> Option<Homomorphism> {
    let compiled = compile(src);
    let index = FactIndex::from_instance(dst);
    let initial = vec![None; compiled.pattern.num_vars];
    let asg = solver::find_one(&compiled.pattern, &index, initial, opts)?;
    let mut h = Homomorphism::new();
    for c in compiled.constants {
        h.insert(c.clone(), c);
    }
    for (n, v) in compiled.nulls.into_iter().zip(asg) {
        h.insert(Value::Null(n), v.expect("every null occurs in some fact"));
    }
    Some(h)
}

fn same_schema(a: &Instance, b: &Instance) -> Result<(), ModelError> {
    if a.schema() == b.schema() {
        Ok(())
    } else {
        Err(ModelError::SchemaMismatch)
    }
}

/// Some homomorphism from `src` into `dst`, or `None` if there is none.
///
/// The search is complete and deterministic: the same inputs always yield
/// the same witness.
pub fn find_homomorphism(src: &Instance, dst: &Instance) -> Result<Option<Homomorphism>, ModelError> {
    same_schema(src, dst)?;
    Ok(search_between(src, dst, SearchOptions::default()))
}

/// Checks totality on the values of `src`, identity on constants, and that
/// the image of every fact of `src` is in `dst`.
pub fn verify_homomorphism(h: &Homomorphism, src: &Instance, dst: &Instance) -> bool {
    src.values().iter().all(|v| match (v, h.get(v)) {
        (_, None) => false,
        (Value::Const(_), Some(w)) => w == v,
        (Value::Null(_), Some(_)) => true,
    }) && src.facts().all(|f| h.apply_fact(f).is_some_and(|g| dst.contains(&g)))
}

/// A bijective value map, identity on constants, with `h(a) = b`.
pub fn find_isomorphism(a: &Instance, b: &Instance) -> Result<Option<Homomorphism>, ModelError> {
    same_schema(a, b)?;
    if a.len() != b.len() || a.nulls().len() != b.nulls().len() {
        return Ok(None);
    }
    let opts = SearchOptions {
        injective: true,
        nulls_only: true,
    };
    Ok(search_between(a, b, opts))
}

pub fn is_isomorphic(a: &Instance, b: &Instance) -> Result<bool, ModelError> {
    Ok(find_isomorphism(a, b)?.is_some())
}

/// Homomorphisms exist in both directions.
pub fn hom_equivalent(a: &Instance, b: &Instance) -> Result<bool, ModelError> {
    Ok(find_homomorphism(a, b)?.is_some() && find_homomorphism(b, a)?.is_some())
}
