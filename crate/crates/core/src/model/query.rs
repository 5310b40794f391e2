use std::fmt;

use super::{Atom, ModelError, Schema, Symbol};

/// A conjunctive query `q(X1, ..., Xk) :- a1, ..., an`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjunctiveQuery {
    head: Vec<Symbol>,
    body: Vec<Atom>,
}

impl ConjunctiveQuery {
    pub fn new(head: Vec<Symbol>, body: Vec<Atom>) -> Result<Self, ModelError> {
        if body.is_empty() {
            return Err(ModelError::EmptyQueryBody);
        }
        for v in &head {
            if !body.iter().any(|a| a.variables().any(|w| w == v)) {
                return Err(ModelError::UnsafeHeadVariable { variable: v.clone() });
            }
        }
        Ok(ConjunctiveQuery { head, body })
    }

    pub fn head(&self) -> &[Symbol] {
        &self.head
    }

    pub fn body(&self) -> &[Atom] {
        &self.body
    }

    pub fn is_boolean(&self) -> bool {
        self.head.is_empty()
    }

    pub fn check_schema(&self, schema: &Schema) -> Result<(), ModelError> {
        self.body.iter().try_for_each(|a| schema.check(&a.predicate, a.arity()))
    }
}

impl fmt::Display for ConjunctiveQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("q(")?;
        for (i, v) in self.head.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str(") :- ")?;
        for (i, a) in self.body.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(".")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Term;

    #[test]
    fn unsafe_head_is_rejected() {
        let body = vec![Atom::new("r2", vec![Term::var("X"), Term::var("Y")])];
        let err = ConjunctiveQuery::new(vec![Symbol::new("W")], body.clone()).unwrap_err();
        assert!(matches!(err, ModelError::UnsafeHeadVariable { .. }));
        assert!(ConjunctiveQuery::new(vec![], body).unwrap().is_boolean());
    }
}
