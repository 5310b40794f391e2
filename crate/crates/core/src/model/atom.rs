use std::collections::BTreeSet;
use std::fmt;

use super::{Symbol, Term, Value};

/// A predicate applied to a list of terms.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub predicate: Symbol,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(predicate: impl Into<Symbol>, args: Vec<Term>) -> Self {
        Atom {
            predicate: predicate.into(),
            args,
        }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    /// Variables in order of first occurrence.
    pub fn variables(&self) -> impl Iterator<Item = &Symbol> {
        let mut seen = BTreeSet::new();
        self.args
            .iter()
            .filter_map(Term::as_var)
            .filter(move |v| seen.insert(*v))
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(|t| t.as_var().is_none())
    }

    /// Converts a ground atom into a fact.
    pub fn to_fact(&self) -> Option<Fact> {
        let args = self.args.iter().map(Term::as_value).collect::<Option<Vec<_>>>()?;
        Some(Fact {
            predicate: self.predicate.clone(),
            args,
        })
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.predicate)?;
        for (i, t) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{t}")?;
        }
        f.write_str(")")
    }
}

/// A ground atom: constants and nulls only.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fact {
    pub predicate: Symbol,
    pub args: Vec<Value>,
}

impl Fact {
    pub fn new(predicate: impl Into<Symbol>, args: Vec<Value>) -> Self {
        Fact {
            predicate: predicate.into(),
            args,
        }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn to_atom(&self) -> Atom {
        Atom {
            predicate: self.predicate.clone(),
            args: self.args.iter().cloned().map(Term::from).collect(),
        }
    }

    /// The fact with every value passed through `f`.
    pub fn map_values(&self, mut f: impl FnMut(&Value) -> Value) -> Fact {
        Fact {
            predicate: self.predicate.clone(),
            args: self.args.iter().map(&mut f).collect(),
        }
    }
}

impl fmt::Display for Fact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.predicate)?;
        for (i, v) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str(")")
    }
}
