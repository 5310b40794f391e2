#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;

use rand::rngs::StdRng;
use rand::Rng;
use schemamap::chase::{is_richly_acyclic, is_weakly_acyclic};
use schemamap::parser::{parse_mapping, SourceText};
use schemamap::{Atom, ConjunctiveQuery, Fact, Instance, Schema, SchemaMapping, Symbol, Term, Tgd, Value};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

pub fn load_mapping(name: &str) -> SchemaMapping {
    parse_mapping(&SourceText::from_path(fixture(name)).unwrap()).unwrap()
}

fn var(name: String) -> Term {
    Term::Var(Symbol::from(name))
}

/// A random LAV dependency from `body` predicates to `head` predicates.
/// With `fresh_heads`, every head atom holds at least one existential.
pub fn random_tgd(rng: &mut StdRng, body: &[(&str, usize)], head: &[(&str, usize)], fresh_heads: bool) -> Tgd {
    let (bp, ba) = body[rng.random_range(0..body.len())];
    let body_vars: Vec<String> = (0..ba).map(|i| format!("X{}", rng.random_range(0..=i))).collect();
    let body_atom = Atom::new(bp, body_vars.iter().cloned().map(var).collect());
    let n_head = rng.random_range(1..=2);
    let head_atoms = (0..n_head)
        .map(|_| {
            let (hp, ha) = head[rng.random_range(0..head.len())];
            let mut args: Vec<Term> = (0..ha)
                .map(|_| {
                    if rng.random_bool(0.35) {
                        var(format!("E{}", rng.random_range(0..2)))
                    } else {
                        var(body_vars[rng.random_range(0..body_vars.len())].clone())
                    }
                })
                .collect();
            if fresh_heads
                && !args
                    .iter()
                    .any(|t| matches!(t, Term::Var(v) if v.as_str().starts_with('E')))
            {
                let pos = rng.random_range(0..ha);
                args[pos] = var(format!("E{}", rng.random_range(0..2)));
            }
            Atom::new(hp, args)
        })
        .collect();
    Tgd::lav(body_atom, head_atoms)
}

pub const SOURCE: [(&str, usize); 2] = [("s1", 2), ("s2", 2)];
pub const TARGET: [(&str, usize); 2] = [("t1", 2), ("t2", 2)];

pub fn source_schema() -> Schema {
    Schema::new(SOURCE).unwrap()
}

pub fn target_schema() -> Schema {
    Schema::new(TARGET).unwrap()
}

/// A random richly acyclic mapping (so oblivious chases terminate): at most two
/// binary predicates per schema and at most two dependencies per set.
pub fn random_mapping(rng: &mut StdRng) -> SchemaMapping {
    random_mapping_where(rng, is_richly_acyclic)
}

/// Weakly acyclic only: the oblivious chase may diverge.
pub fn random_weakly_acyclic_mapping(rng: &mut StdRng) -> SchemaMapping {
    random_mapping_where(rng, is_weakly_acyclic)
}

fn random_mapping_where(rng: &mut StdRng, accept: fn(&[Tgd]) -> bool) -> SchemaMapping {
    loop {
        let n_src = rng.random_range(1..=2);
        let n_tgt = rng.random_range(1..=2);
        let src = &SOURCE[..n_src];
        let tgt = &TARGET[..n_tgt];
        let st: Vec<Tgd> = (0..rng.random_range(1..=2))
            .map(|_| random_tgd(rng, src, tgt, false))
            .collect();
        let t: Vec<Tgd> = (0..rng.random_range(0..=2))
            .map(|_| random_tgd(rng, tgt, tgt, false))
            .collect();
        let m = SchemaMapping::new(source_schema(), target_schema(), st, t);
        if accept(&m.all_tgds()) {
            assert!(m.validate().is_valid(), "{m}");
            return m;
        }
    }
}

/// A random instance with `n_facts` facts over `consts` constants and up to
/// `n_nulls` nulls numbered from `first_null`.
pub fn random_instance(
    rng: &mut StdRng,
    schema: &Arc<Schema>,
    n_facts: usize,
    consts: &[&str],
    n_nulls: u64,
    first_null: u64,
) -> Instance {
    let rels: Vec<(Symbol, usize)> = schema.relations().map(|(n, a)| (n.clone(), a)).collect();
    let mut inst = Instance::new(schema.clone());
    for _ in 0..n_facts {
        let (p, a) = &rels[rng.random_range(0..rels.len())];
        let args = (0..*a)
            .map(|_| {
                if n_nulls > 0 && (consts.is_empty() || rng.random_bool(0.5)) {
                    Value::null(first_null + rng.random_range(0..n_nulls))
                } else {
                    Value::constant(consts[rng.random_range(0..consts.len())])
                }
            })
            .collect();
        inst.insert(Fact::new(p.clone(), args)).unwrap();
    }
    inst
}

/// A random conjunctive query with up to `max_atoms` body atoms; constants
/// are drawn from `consts` occasionally.
pub fn random_cq(rng: &mut StdRng, schema: &Schema, max_atoms: usize, consts: &[&str]) -> ConjunctiveQuery {
    let rels: Vec<(Symbol, usize)> = schema.relations().map(|(n, a)| (n.clone(), a)).collect();
    let n = rng.random_range(1..=max_atoms);
    let mut body = Vec::new();
    let mut vars: Vec<String> = Vec::new();
    for _ in 0..n {
        let (p, a) = &rels[rng.random_range(0..rels.len())];
        let args = (0..*a)
            .map(|_| {
                if !consts.is_empty() && rng.random_bool(0.15) {
                    Term::constant(consts[rng.random_range(0..consts.len())])
                } else {
                    let v = format!("V{}", rng.random_range(0..4));
                    if !vars.contains(&v) {
                        vars.push(v.clone());
                    }
                    var(v)
                }
            })
            .collect();
        body.push(Atom::new(p.clone(), args));
    }
    let head: Vec<Symbol> = vars
        .into_iter()
        .filter(|_| rng.random_bool(0.5))
        .map(Symbol::from)
        .collect();
    ConjunctiveQuery::new(head, body).unwrap()
}

/// Exhaustive homomorphism test: tries every assignment of the nulls of
/// `src` to values of `dst`.
pub fn brute_force_hom(src: &Instance, dst: &Instance) -> bool {
    let nulls: Vec<Value> = src.nulls().into_iter().map(Value::Null).collect();
    let targets: Vec<Value> = dst.values().into_iter().collect();
    if nulls.is_empty() {
        return src.facts().all(|f| dst.contains(f));
    }
    if targets.is_empty() {
        return src.is_empty();
    }
    let mut choice = vec![0usize; nulls.len()];
    loop {
        let map: BTreeMap<&Value, &Value> = nulls.iter().zip(choice.iter().map(|&i| &targets[i])).collect();
        let ok = src.facts().all(|f| {
            let img = f.map_values(|v| map.get(v).map_or_else(|| v.clone(), |w| (*w).clone()));
            dst.contains(&img)
        });
        if ok {
            return true;
        }
        let Some(pos) = (0..choice.len()).rev().find(|&p| choice[p] + 1 < targets.len()) else {
            return false;
        };
        choice[pos] += 1;
        for c in &mut choice[pos + 1..] {
            *c = 0;
        }
    }
}

/// Exhaustive isomorphism test: every injective null-to-null assignment.
pub fn brute_force_iso(a: &Instance, b: &Instance) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let an: Vec<Value> = a.nulls().into_iter().map(Value::Null).collect();
    let bn: Vec<Value> = b.nulls().into_iter().map(Value::Null).collect();
    if an.len() != bn.len() {
        return false;
    }
    fn go(
        i: usize,
        an: &[Value],
        bn: &[Value],
        used: &mut Vec<bool>,
        map: &mut BTreeMap<Value, Value>,
        a: &Instance,
        b: &Instance,
    ) -> bool {
        if i == an.len() {
            return a
                .facts()
                .all(|f| b.contains(&f.map_values(|v| map.get(v).cloned().unwrap_or_else(|| v.clone()))));
        }
        for j in 0..bn.len() {
            if !used[j] {
                used[j] = true;
                map.insert(an[i].clone(), bn[j].clone());
                if go(i + 1, an, bn, used, map, a, b) {
                    return true;
                }
                used[j] = false;
            }
        }
        false
    }
    go(0, &an, &bn, &mut vec![false; bn.len()], &mut BTreeMap::new(), a, b)
}

/// Dependencies over the target schema plus two fact-disjoint instances with
/// disjoint nulls. With `fresh_heads` every head atom has an existential, so
/// derived facts never collide across the two sides.
pub fn random_union_triple(rng: &mut StdRng, fresh_heads: bool) -> (Vec<Tgd>, Instance, Instance) {
    let tgds = loop {
        let n = rng.random_range(1..=3);
        let t: Vec<Tgd> = (0..n).map(|_| random_tgd(rng, &TARGET, &TARGET, fresh_heads)).collect();
        if is_richly_acyclic(&t) {
            break t;
        }
    };
    let schema = Arc::new(target_schema());
    let consts = ["a", "b", "c"];
    let n1 = rng.random_range(0..=4);
    let d1 = random_instance(rng, &schema, n1, &consts, 2, 1);
    let n2 = rng.random_range(0..=4);
    let raw = random_instance(rng, &schema, n2, &consts, 2, 100);
    let d2 = Instance::from_facts(schema, raw.facts().filter(|f| !d1.contains(f)).cloned()).unwrap();
    (tgds, d1, d2)
}

/// Chases `d1 ∪ d2` and each side separately with disjoint fresh nulls.
/// Returns `(joint, separate)`, or `None` if a chase exceeds `max_facts`.
pub fn union_chases(tgds: &[Tgd], d1: &Instance, d2: &Instance, max_facts: usize) -> Option<(Instance, Instance)> {
    use schemamap::chase::{chase, chase_with_generator, ChaseConfig};
    use schemamap::NullGenerator;
    let cfg = ChaseConfig {
        max_facts: Some(max_facts),
        ..ChaseConfig::default()
    };
    let joint = chase(&d1.union(d2).unwrap(), tgds, &cfg).unwrap();
    let mut gen = NullGenerator::starting_at(d1.max_null_id().max(d2.max_null_id()) + 1);
    let c1 = chase_with_generator(d1, tgds, &cfg, &mut gen).unwrap();
    let c2 = chase_with_generator(d2, tgds, &cfg, &mut gen).unwrap();
    if !(joint.terminated() && c1.terminated() && c2.terminated()) {
        return None;
    }
    Some((joint.instance, c1.instance.union(&c2.instance).unwrap()))
}
