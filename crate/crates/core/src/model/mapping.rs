use std::fmt;
use std::sync::Arc;

use super::{validate_mapping, ModelError, Schema, Tgd, ValidationReport};

/// A schema mapping `(S, T, Σst, Σt)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemaMapping {
    pub source: Arc<Schema>,
    pub target: Arc<Schema>,
    pub st_tgds: Vec<Tgd>,
    pub t_tgds: Vec<Tgd>,
}

impl SchemaMapping {
    pub fn new(source: Schema, target: Schema, st_tgds: Vec<Tgd>, t_tgds: Vec<Tgd>) -> Self {
        SchemaMapping {
            source: Arc::new(source),
            target: Arc::new(target),
            st_tgds,
            t_tgds,
        }
    }

    pub fn validate(&self) -> ValidationReport {
        validate_mapping(self)
    }

    /// Fails with the validation report unless the mapping is well formed.
    pub fn ensure_valid(&self) -> Result<(), ModelError> {
        let report = self.validate();
        if report.is_valid() {
            Ok(())
        } else {
            Err(ModelError::Invalid(report))
        }
    }

    /// The schema the combined chase runs over: source and target together.
    pub fn union_schema(&self) -> Result<Arc<Schema>, ModelError> {
        Ok(Arc::new(self.source.union(&self.target)?))
    }

    /// `Σst ∪ Σt`, source-to-target dependencies first.
    pub fn all_tgds(&self) -> Vec<Tgd> {
        self.st_tgds.iter().chain(self.t_tgds.iter()).cloned().collect()
    }

    pub fn same_schemas(&self, other: &SchemaMapping) -> bool {
        self.source == other.source && self.target == other.target
    }
}

/// Prints the mapping in the textual mapping format.
impl fmt::Display for SchemaMapping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn decls(f: &mut fmt::Formatter<'_>, s: &Schema) -> fmt::Result {
            for (name, arity) in s.relations() {
                write!(f, " {name}/{arity};")?;
            }
            Ok(())
        }
        fn deps(f: &mut fmt::Formatter<'_>, tgds: &[Tgd]) -> fmt::Result {
            for t in tgds {
                write!(f, "\n  {t};")?;
            }
            if !tgds.is_empty() {
                f.write_str("\n")?;
            }
            Ok(())
        }
        f.write_str("source {")?;
        decls(f, &self.source)?;
        f.write_str(" }\ntarget {")?;
        decls(f, &self.target)?;
        f.write_str(" }\nst {")?;
        deps(f, &self.st_tgds)?;
        f.write_str("}\nt {")?;
        deps(f, &self.t_tgds)?;
        f.write_str("}\n")
    }
}
