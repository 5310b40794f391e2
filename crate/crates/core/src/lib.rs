//! Containment and equivalence of schema mappings whose dependencies are
//! LAV tuple-generating dependencies.
//!
//! A mapping `M` is contained in `M'` when, for every source instance and
//! every conjunctive query over the target, the certain answers under `M`
//! are also certain answers under `M'`. For LAV dependencies this reduces to
//! a finite test: chase each *dummy instance* of `M` (one single-fact
//! instance per equality pattern of a source predicate) under both mappings
//! and look for a homomorphism from the first result into the second. The
//! right-hand chase may be infinite, so it is explored level by level up to
//! a configurable horizon.

pub mod chase;
pub mod containment;
pub mod dummy;
pub mod hom;
pub mod model;
pub mod oracle;
pub mod parser;

pub use model::*;
