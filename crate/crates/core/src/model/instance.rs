use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use super::{Fact, ModelError, NullId, Schema, Value};

/// Chase depth of a fact. Input facts are at level 0.
pub type Level = u32;

/// A finite set of facts over a schema, each tagged with its chase level.
///
/// Equality compares the schema and the fact set; levels are metadata and do
/// not take part in it.
#[derive(Clone, Debug)]
pub struct Instance {
    schema: Arc<Schema>,
    facts: BTreeMap<Fact, Level>,
}

impl Instance {
    pub fn new(schema: Arc<Schema>) -> Self {
        Instance {
            schema,
            facts: BTreeMap::new(),
        }
    }

    pub fn from_facts<I>(schema: Arc<Schema>, facts: I) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = Fact>,
    {
        let mut inst = Instance::new(schema);
        for f in facts {
            inst.insert(f)?;
        }
        Ok(inst)
    }

    pub fn schema(&self) -> &Arc<Schema> {
        &self.schema
    }

    /// Inserts a level-0 fact. Returns `false` if it was already present.
    pub fn insert(&mut self, fact: Fact) -> Result<bool, ModelError> {
        self.insert_at(fact, 0)
    }

    /// Inserts a fact at `level`. An already present fact keeps its level.
    pub fn insert_at(&mut self, fact: Fact, level: Level) -> Result<bool, ModelError> {
        self.schema.check(&fact.predicate, fact.arity())?;
        if self.facts.contains_key(&fact) {
            return Ok(false);
        }
        self.facts.insert(fact, level);
        Ok(true)
    }

    pub fn contains(&self, fact: &Fact) -> bool {
        self.facts.contains_key(fact)
    }

    pub fn level_of(&self, fact: &Fact) -> Option<Level> {
        self.facts.get(fact).copied()
    }

    pub fn len(&self) -> usize {
        self.facts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }

    /// Facts in canonical order.
    pub fn facts(&self) -> impl Iterator<Item = &Fact> {
        self.facts.keys()
    }

    /// Facts with their levels, in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = (&Fact, Level)> {
        self.facts.iter().map(|(f, l)| (f, *l))
    }

    pub fn max_level(&self) -> Option<Level> {
        self.facts.values().copied().max()
    }

    /// Every value occurring in some fact.
    pub fn values(&self) -> BTreeSet<Value> {
        self.facts.keys().flat_map(|f| f.args.iter().cloned()).collect()
    }

    pub fn nulls(&self) -> BTreeSet<NullId> {
        self.facts
            .keys()
            .flat_map(|f| f.args.iter())
            .filter_map(|v| match v {
                Value::Null(n) => Some(*n),
                Value::Const(_) => None,
            })
            .collect()
    }

    pub fn max_null_id(&self) -> u64 {
        self.nulls().iter().map(|n| n.0).max().unwrap_or(0)
    }

    /// The same facts, re-checked against a different schema.
    pub fn with_schema(&self, schema: Arc<Schema>) -> Result<Instance, ModelError> {
        let mut out = Instance::new(schema);
        for (f, l) in self.iter() {
            out.insert_at(f.clone(), l)?;
        }
        Ok(out)
    }

    /// Facts whose predicate belongs to `schema`, re-typed over it.
    pub fn restrict_to(&self, schema: Arc<Schema>) -> Instance {
        let facts = self
            .facts
            .iter()
            .filter(|(f, _)| schema.arity(&f.predicate) == Some(f.arity()))
            .map(|(f, l)| (f.clone(), *l))
            .collect();
        Instance { schema, facts }
    }

    /// Set union. Levels of shared facts are taken from `self`.
    pub fn union(&self, other: &Instance) -> Result<Instance, ModelError> {
        if self.schema != other.schema {
            return Err(ModelError::SchemaMismatch);
        }
        let mut out = self.clone();
        for (f, l) in other.iter() {
            out.insert_at(f.clone(), l)?;
        }
        Ok(out)
    }

    /// All levels reset to 0.
    pub fn without_levels(&self) -> Instance {
        Instance {
            schema: self.schema.clone(),
            facts: self.facts.keys().map(|f| (f.clone(), 0)).collect(),
        }
    }

    /// Facts at or below `level`.
    pub fn up_to_level(&self, level: Level) -> Instance {
        Instance {
            schema: self.schema.clone(),
            facts: self
                .facts
                .iter()
                .filter(|(_, l)| **l <= level)
                .map(|(f, l)| (f.clone(), *l))
                .collect(),
        }
    }

    pub fn is_subset(&self, other: &Instance) -> bool {
        self.facts.keys().all(|f| other.contains(f))
    }
}

impl PartialEq for Instance {
    fn eq(&self, other: &Self) -> bool {
        self.schema == other.schema && self.facts.len() == other.facts.len() && self.facts.keys().eq(other.facts.keys())
    }
}

impl Eq for Instance {}

/// One `fact.` per line, canonical order.
impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for fact in self.facts() {
            writeln!(f, "{fact}.")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn schema() -> Arc<Schema> {
        Arc::new(Schema::new([("r", 2), ("s", 1)]).unwrap())
    }

    #[test]
    fn set_semantics() {
        let mut i = Instance::new(schema());
        let f = Fact::new("r", vec![Value::constant("a"), Value::null(1)]);
        assert!(i.insert(f.clone()).unwrap());
        assert!(!i.insert_at(f.clone(), 3).unwrap());
        assert_eq!(i.len(), 1);
        assert_eq!(i.level_of(&f), Some(0));
    }

    #[test]
    fn rejects_bad_facts() {
        let mut i = Instance::new(schema());
        assert!(matches!(
            i.insert(Fact::new("q", vec![Value::constant("a")])),
            Err(ModelError::UnknownPredicate { .. })
        ));
        assert!(matches!(
            i.insert(Fact::new("s", vec![Value::constant("a"), Value::constant("b")])),
            Err(ModelError::ArityMismatch {
                expected: 1,
                found: 2,
                ..
            })
        ));
    }

    #[test]
    fn equality_ignores_order_and_levels() {
        let a = Fact::new("s", vec![Value::constant("a")]);
        let b = Fact::new("s", vec![Value::constant("b")]);
        let mut x = Instance::new(schema());
        x.insert(a.clone()).unwrap();
        x.insert_at(b.clone(), 2).unwrap();
        let mut y = Instance::new(schema());
        y.insert(b).unwrap();
        y.insert(a).unwrap();
        assert_eq!(x, y);
    }
}
