use std::collections::BTreeMap;
use std::fmt;

use super::{ModelError, Symbol};

/// A relational schema: relation names with their arities.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Schema {
    relations: BTreeMap<Symbol, usize>,
}

impl Schema {
    pub fn empty() -> Self {
        Schema::default()
    }

    pub fn new<I, S>(relations: I) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<Symbol>,
    {
        let mut schema = Schema::empty();
        for (name, arity) in relations {
            schema.declare(name, arity)?;
        }
        Ok(schema)
    }

    pub fn declare(&mut self, name: impl Into<Symbol>, arity: usize) -> Result<(), ModelError> {
        let name = name.into();
        if arity == 0 {
            return Err(ModelError::ZeroArity { relation: name });
        }
        if self.relations.contains_key(&name) {
            return Err(ModelError::DuplicateRelation { relation: name });
        }
        self.relations.insert(name, arity);
        Ok(())
    }

    pub fn arity(&self, name: &Symbol) -> Option<usize> {
        self.relations.get(name).copied()
    }

    pub fn contains(&self, name: &Symbol) -> bool {
        self.relations.contains_key(name)
    }

    pub fn relations(&self) -> impl Iterator<Item = (&Symbol, usize)> {
        self.relations.iter().map(|(n, a)| (n, *a))
    }

    pub fn len(&self) -> usize {
        self.relations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty()
    }

    pub fn max_arity(&self) -> usize {
        self.relations.values().copied().max().unwrap_or(0)
    }

    /// Checks that `predicate` is declared with exactly `arity` arguments.
    pub fn check(&self, predicate: &Symbol, arity: usize) -> Result<(), ModelError> {
        match self.arity(predicate) {
            None => Err(ModelError::UnknownPredicate {
                predicate: predicate.clone(),
            }),
            Some(expected) if expected != arity => Err(ModelError::ArityMismatch {
                predicate: predicate.clone(),
                expected,
                found: arity,
            }),
            Some(_) => Ok(()),
        }
    }

    /// Union of two schemas. A relation declared in both must agree on arity.
    pub fn union(&self, other: &Schema) -> Result<Schema, ModelError> {
        let mut out = self.clone();
        for (name, arity) in other.relations() {
            match out.arity(name) {
                Some(a) if a != arity => {
                    return Err(ModelError::ArityMismatch {
                        predicate: name.clone(),
                        expected: a,
                        found: arity,
                    })
                }
                Some(_) => {}
                None => {
                    out.relations.insert(name.clone(), arity);
                }
            }
        }
        Ok(out)
    }
}

impl fmt::Display for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, arity) in self.relations() {
            write!(f, "{name}/{arity}; ")?;
        }
        Ok(())
    }
}
