//! Dummy instances: one single-fact source instance per equality pattern of
//! each predicate used in a source-to-target body.
//!
//! A pattern is a set partition of the argument positions, written as a
//! restricted-growth string: `p[0] = 0` and `p[i] <= 1 + max(p[..i])`.
//! Positions in the same block share a constant; the block numbered `k`
//! holds the constant `z{k+1}`, so constants are numbered by first
//! occurrence. Every single source fact is isomorphic to exactly one dummy.

use std::collections::BTreeSet;
use std::fmt;

use crate::model::{Fact, Instance, SchemaMapping, Symbol, Value};

/// Prefix of the constants invented for dummy instances.
pub const DUMMY_CONSTANT_PREFIX: char = 'z';

/// Whether `name` belongs to the namespace used for dummy constants
/// (`z` followed by a positive integer).
pub fn is_reserved_constant(name: &str) -> bool {
    name.strip_prefix(DUMMY_CONSTANT_PREFIX)
        .is_some_and(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()) && !d.starts_with('0'))
}

pub fn dummy_constant(block: usize) -> Value {
    Value::constant(format!("{DUMMY_CONSTANT_PREFIX}{}", block + 1))
}

/// All restricted-growth strings of length `n`, in lexicographic order.
pub fn restricted_growth_strings(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if n == 0 {
        out.push(Vec::new());
        return out;
    }
    let mut current = vec![0usize; n];
    // maxes[i] = max(current[..=i])
    let mut maxes = vec![0usize; n];
    loop {
        out.push(current.clone());
        // Rightmost position that can still grow.
        let Some(i) = (1..n).rev().find(|&i| current[i] <= maxes[i - 1]) else {
            return out;
        };
        current[i] += 1;
        maxes[i] = maxes[i - 1].max(current[i]);
        for j in i + 1..n {
            current[j] = 0;
            maxes[j] = maxes[i];
        }
    }
}

/// The equality pattern of a fact's arguments, as a restricted-growth string.
pub fn equality_pattern(fact: &Fact) -> Vec<usize> {
    let mut seen: Vec<&Value> = Vec::new();
    fact.args
        .iter()
        .map(|v| match seen.iter().position(|w| *w == v) {
            Some(i) => i,
            None => {
                seen.push(v);
                seen.len() - 1
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dummy {
    pub predicate: Symbol,
    /// Equality pattern of the argument positions.
    pub pattern: Vec<usize>,
    pub instance: Instance,
}

impl Dummy {
    pub fn fact(&self) -> &Fact {
        self.instance.facts().next().expect("a dummy holds one fact")
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DummySet {
    pub dummies: Vec<Dummy>,
}

impl DummySet {
    pub fn len(&self) -> usize {
        self.dummies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dummies.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Dummy> {
        self.dummies.iter()
    }
}

/// Instance-file blocks separated by `--- k ---` lines (1-based).
impl fmt::Display for DummySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, d) in self.dummies.iter().enumerate() {
            writeln!(f, "--- {} ---", k + 1)?;
            write!(f, "{}", d.instance)?;
        }
        Ok(())
    }
}

/// The dummy instances of `m`, predicates in name order, patterns in
/// lexicographic order.
pub fn dummy_instances(m: &SchemaMapping) -> DummySet {
    let predicates: BTreeSet<&Symbol> = m
        .st_tgds
        .iter()
        .flat_map(|t| t.body.iter().map(|a| &a.predicate))
        .filter(|p| m.source.contains(p))
        .collect();
    let mut dummies = Vec::new();
    for p in predicates {
        let arity = m.source.arity(p).expect("filtered to source predicates");
        for pattern in restricted_growth_strings(arity) {
            let fact = Fact::new(p.clone(), pattern.iter().map(|&b| dummy_constant(b)).collect());
            let instance = Instance::from_facts(m.source.clone(), [fact])
                .expect("predicate and arity come from the source schema");
            dummies.push(Dummy {
                predicate: p.clone(),
                pattern,
                instance,
            });
        }
    }
    DummySet { dummies }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_mapping, SourceText};

    /// Bell numbers from the Bell triangle.
    fn bell(n: usize) -> usize {
        let mut row = vec![1usize];
        for _ in 0..n {
            let mut next = vec![*row.last().unwrap()];
            for x in &row {
                let last = *next.last().unwrap();
                next.push(last + x);
            }
            row = next;
        }
        row[0]
    }

    #[test]
    fn rgs_counts_match_bell_numbers() {
        for n in 0..8 {
            let all = restricted_growth_strings(n);
            assert_eq!(all.len(), bell(n), "n = {n}");
            let mut sorted = all.clone();
            sorted.sort();
            sorted.dedup();
            assert_eq!(sorted, all);
        }
    }

    #[test]
    fn rgs_of_three() {
        assert_eq!(
            restricted_growth_strings(3),
            vec![
                vec![0, 0, 0],
                vec![0, 0, 1],
                vec![0, 1, 0],
                vec![0, 1, 1],
                vec![0, 1, 2]
            ]
        );
    }

    #[test]
    fn example_mapping_has_two_dummies() {
        let m = parse_mapping(&SourceText::inline(
            "source { r1/2; } target { r2/2; r3/2; }
             st { r1(X,Y) -> r2(Y,Z); r1(X,Y) -> r3(Z,Y); } t { r2(X,Y) -> r3(Z,X); }",
        ))
        .unwrap();
        let d = dummy_instances(&m);
        let text: Vec<String> = d.iter().map(|x| x.instance.to_string()).collect();
        assert_eq!(text, ["r1(z1,z1).\n", "r1(z1,z2).\n"]);
        assert_eq!(d.to_string(), "--- 1 ---\nr1(z1,z1).\n--- 2 ---\nr1(z1,z2).\n");
    }

    #[test]
    fn ternary_predicate_and_unused_predicates() {
        let m = parse_mapping(&SourceText::inline(
            "source { e/3; unused/2; } target { p/2; } st { e(X,Y,Z) -> p(X,Y); } t {}",
        ))
        .unwrap();
        assert_eq!(dummy_instances(&m).len(), 5);
    }

    #[test]
    fn no_st_dependencies_no_dummies() {
        let m = parse_mapping(&SourceText::inline("source { a/1; } target { b/1; } st {} t {}")).unwrap();
        assert!(dummy_instances(&m).is_empty());
    }

    #[test]
    fn reserved_names() {
        assert!(is_reserved_constant("z1"));
        assert!(is_reserved_constant("z42"));
        assert!(!is_reserved_constant("z"));
        assert!(!is_reserved_constant("z01"));
        assert!(!is_reserved_constant("zoo"));
        assert!(!is_reserved_constant("a1"));
    }

    #[test]
    fn pattern_of_fact() {
        let f = Fact::new(
            "r",
            vec![Value::constant("b"), Value::constant("a"), Value::constant("b")],
        );
        assert_eq!(equality_pattern(&f), vec![0, 1, 0]);
    }
}
