//! Schemas, terms, facts, instances, dependencies, mappings and queries.

mod atom;
mod instance;
mod mapping;
mod query;
mod schema;
mod term;
mod tgd;
mod validate;

pub use atom::{Atom, Fact};
pub use instance::{Instance, Level};
pub use mapping::SchemaMapping;
pub use query::ConjunctiveQuery;
pub use schema::Schema;
pub use term::{NullGenerator, NullId, Symbol, Term, Value};
pub use tgd::Tgd;
pub use validate::{validate_mapping, DependencySet, Location, ValidationReport, Violation, ViolationKind};

use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("undeclared predicate `{predicate}`")]
    UnknownPredicate { predicate: Symbol },
    #[error("`{predicate}` has arity {expected}, used with {found} arguments")]
    ArityMismatch {
        predicate: Symbol,
        expected: usize,
        found: usize,
    },
    #[error("relation `{relation}` declared twice")]
    DuplicateRelation { relation: Symbol },
    #[error("relation `{relation}` must have arity at least 1")]
    ZeroArity { relation: Symbol },
    #[error("instances are over different schemas")]
    SchemaMismatch,
    #[error("head variable `{variable}` does not occur in the query body")]
    UnsafeHeadVariable { variable: Symbol },
    #[error("query body is empty")]
    EmptyQueryBody,
    #[error("invalid mapping:\n{0}")]
    Invalid(ValidationReport),
}
