use std::fmt;

use super::{Atom, Schema, SchemaMapping, Symbol, Term, Tgd};

/// Which dependency set a violation was found in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DependencySet {
    SourceToTarget,
    Target,
}

impl fmt::Display for DependencySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DependencySet::SourceToTarget => "st",
            DependencySet::Target => "t",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Location {
    /// A relation declared in both schemas.
    Schemas { relation: Symbol },
    /// The `index`-th dependency of a set (0-based).
    Dependency { set: DependencySet, index: usize },
    /// One atom of a dependency; `in_body` tells which side.
    Atom {
        set: DependencySet,
        index: usize,
        in_body: bool,
        atom: usize,
    },
}

impl Location {
    pub fn dependency(&self) -> Option<(DependencySet, usize)> {
        match self {
            Location::Schemas { .. } => None,
            Location::Dependency { set, index } | Location::Atom { set, index, .. } => Some((*set, *index)),
        }
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Schemas { relation } => write!(f, "schemas, relation {relation}"),
            Location::Dependency { set, index } => write!(f, "{set}[{}]", index + 1),
            Location::Atom {
                set,
                index,
                in_body,
                atom,
            } => write!(
                f,
                "{set}[{}] {} atom {}",
                index + 1,
                if *in_body { "body" } else { "head" },
                atom + 1
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    /// Body does not consist of exactly one atom.
    NotLav {
        body_atoms: usize,
    },
    EmptyHead,
    UnknownPredicate {
        predicate: Symbol,
    },
    /// Predicate exists, but in the wrong schema for this position.
    WrongVocabulary {
        predicate: Symbol,
        expected: &'static str,
    },
    ArityMismatch {
        predicate: Symbol,
        expected: usize,
        found: usize,
    },
    NullInDependency,
    SharedRelationName,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ViolationKind::NotLav { body_atoms } => {
                write!(f, "body has {body_atoms} atoms; LAV dependencies need exactly one")
            }
            ViolationKind::EmptyHead => f.write_str("empty head"),
            ViolationKind::UnknownPredicate { predicate } => {
                write!(f, "undeclared predicate `{predicate}`")
            }
            ViolationKind::WrongVocabulary { predicate, expected } => {
                write!(f, "predicate `{predicate}` is not in the {expected} schema")
            }
            ViolationKind::ArityMismatch {
                predicate,
                expected,
                found,
            } => write!(f, "`{predicate}` has arity {expected}, used with {found} arguments"),
            ViolationKind::NullInDependency => f.write_str("labelled null inside a dependency"),
            ViolationKind::SharedRelationName => f.write_str("relation declared in both source and target schemas"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub location: Location,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.kind)
    }
}

/// Every well-formedness problem found in a mapping. Empty means valid.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn len(&self) -> usize {
        self.violations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks LAV form, arities, vocabulary and schema disjointness.
pub fn validate_mapping(m: &SchemaMapping) -> ValidationReport {
    let mut out = Vec::new();

    for (name, _) in m.source.relations() {
        if m.target.contains(name) {
            out.push(Violation {
                location: Location::Schemas { relation: name.clone() },
                kind: ViolationKind::SharedRelationName,
            });
        }
    }

    let sides = [
        (DependencySet::SourceToTarget, &m.st_tgds, &*m.source, "source"),
        (DependencySet::Target, &m.t_tgds, &*m.target, "target"),
    ];
    for (set, tgds, body_schema, body_name) in sides {
        for (index, tgd) in tgds.iter().enumerate() {
            check_tgd(
                &mut out,
                set,
                index,
                tgd,
                (body_schema, body_name),
                (&m.target, "target"),
                (&m.source, &m.target),
            );
        }
    }
    ValidationReport { violations: out }
}

fn check_tgd(
    out: &mut Vec<Violation>,
    set: DependencySet,
    index: usize,
    tgd: &Tgd,
    body: (&Schema, &'static str),
    head: (&Schema, &'static str),
    all: (&Schema, &Schema),
) {
    if !tgd.is_lav() {
        out.push(Violation {
            location: Location::Dependency { set, index },
            kind: ViolationKind::NotLav {
                body_atoms: tgd.body.len(),
            },
        });
    }
    if tgd.head.is_empty() {
        out.push(Violation {
            location: Location::Dependency { set, index },
            kind: ViolationKind::EmptyHead,
        });
    }
    let sides = [(true, &tgd.body, body), (false, &tgd.head, head)];
    for (in_body, atoms, (schema, schema_name)) in sides {
        for (atom_idx, atom) in atoms.iter().enumerate() {
            let location = Location::Atom {
                set,
                index,
                in_body,
                atom: atom_idx,
            };
            if let Some(kind) = check_atom(atom, schema, schema_name, all) {
                out.push(Violation {
                    location: location.clone(),
                    kind,
                });
            }
            if atom.args.iter().any(|t| matches!(t, Term::Null(_))) {
                out.push(Violation {
                    location,
                    kind: ViolationKind::NullInDependency,
                });
            }
        }
    }
}

fn check_atom(
    atom: &Atom,
    schema: &Schema,
    schema_name: &'static str,
    (source, target): (&Schema, &Schema),
) -> Option<ViolationKind> {
    let predicate = atom.predicate.clone();
    match schema.arity(&atom.predicate) {
        Some(expected) if expected != atom.arity() => Some(ViolationKind::ArityMismatch {
            predicate,
            expected,
            found: atom.arity(),
        }),
        Some(_) => None,
        None if source.contains(&predicate) || target.contains(&predicate) => Some(ViolationKind::WrongVocabulary {
            predicate,
            expected: schema_name,
        }),
        None => Some(ViolationKind::UnknownPredicate { predicate }),
    }
}
