//! Conjunctive query answering and a brute-force containment oracle.
//!
//! Query evaluation runs the homomorphism search with the query variables in
//! place of nulls. Certain answers are the null-free answers over the chase.
//! The oracle checks containment instance by instance over every small
//! source instance built from a fixed set of constants; its verdicts only
//! speak for the instances it enumerated.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::ControlFlow;
use std::sync::Arc;

use crate::chase::{chase_mapping, ChaseConfig};
use crate::containment::{ContainmentError, Outcome};
use crate::hom::find_homomorphism;
use crate::hom::solver::{self, FactIndex, Pattern, PatternAtom, SearchOptions, Slot};
use crate::model::{Atom, ConjunctiveQuery, Fact, Instance, ModelError, Schema, SchemaMapping, Symbol, Term, Value};

/// Answer tuples of a query.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AnswerSet {
    pub tuples: BTreeSet<Vec<Value>>,
    /// Tuples containing a null were removed.
    pub null_free: bool,
    /// The chase did not finish, so only answers over a prefix are listed.
    /// Each of them is certain; others may be missing.
    pub lower_bound: bool,
}

impl AnswerSet {
    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn contains(&self, tuple: &[Value]) -> bool {
        self.tuples.contains(tuple)
    }

    pub fn is_subset(&self, other: &AnswerSet) -> bool {
        self.tuples.is_subset(&other.tuples)
    }

    /// One tuple per line, comma separated, in lexicographic order.
    pub fn to_lines(&self) -> String {
        self.tuples
            .iter()
            .map(|t| {
                let cells: Vec<String> = t.iter().map(|v| v.to_string()).collect();
                format!("({})\n", cells.join(","))
            })
            .collect()
    }
}

fn compile_query(q: &ConjunctiveQuery) -> (Pattern, Vec<usize>) {
    let mut vars: Vec<Symbol> = Vec::new();
    let mut var = |s: &Symbol| match vars.iter().position(|v| v == s) {
        Some(i) => i,
        None => {
            vars.push(s.clone());
            vars.len() - 1
        }
    };
    let atoms: Vec<PatternAtom> = q
        .body()
        .iter()
        .map(|a| PatternAtom {
            predicate: a.predicate.clone(),
            slots: a
                .args
                .iter()
                .map(|t| match t {
                    Term::Var(v) => Slot::Var(var(v)),
                    other => Slot::Fixed(other.as_value().expect("ground term")),
                })
                .collect(),
        })
        .collect();
    let head = q.head().iter().map(&mut var).collect();
    (
        Pattern {
            atoms,
            num_vars: vars.len(),
        },
        head,
    )
}

/// All head-variable images over homomorphisms of the query body into `inst`.
pub fn evaluate_query(q: &ConjunctiveQuery, inst: &Instance) -> Result<AnswerSet, ModelError> {
    q.check_schema(inst.schema())?;
    let (pattern, head) = compile_query(q);
    let index = FactIndex::from_instance(inst);
    let mut tuples = BTreeSet::new();
    solver::search(
        &pattern,
        &index,
        vec![None; pattern.num_vars],
        SearchOptions::default(),
        |asg| {
            tuples.insert(
                head.iter()
                    .map(|&i| asg[i].clone().expect("head variables are safe"))
                    .collect(),
            );
            ControlFlow::Continue(())
        },
    );
    Ok(AnswerSet {
        tuples,
        null_free: false,
        lower_bound: false,
    })
}

/// Certain answers of `q` on the source instance `source` under `m`.
pub fn certain_answers(
    q: &ConjunctiveQuery,
    source: &Instance,
    m: &SchemaMapping,
    budget: &ChaseConfig,
) -> Result<AnswerSet, ContainmentError> {
    if **source.schema() != *m.source {
        return Err(ContainmentError::SchemaMismatch);
    }
    q.check_schema(&m.target)?;
    let result = chase_mapping(source, m, budget)?;
    let target = result.instance.restrict_to(m.target.clone());
    let mut answers = evaluate_query(q, &target)?;
    answers.tuples.retain(|t| t.iter().all(Value::is_const));
    answers.null_free = true;
    answers.lower_bound = !result.terminated();
    Ok(answers)
}

/// The Boolean query whose body is the `schema` part of `inst`, with every
/// null replaced by a variable. `None` when that part is empty.
pub fn boolean_query_of(inst: &Instance, schema: &Schema) -> Option<ConjunctiveQuery> {
    let body: Vec<Atom> = inst
        .facts()
        .filter(|f| schema.arity(&f.predicate) == Some(f.arity()))
        .map(|f| Atom {
            predicate: f.predicate.clone(),
            args: f
                .args
                .iter()
                .map(|v| match v {
                    Value::Null(n) => Term::var(format!("N{}", n.0)),
                    Value::Const(c) => Term::Const(c.clone()),
                })
                .collect(),
        })
        .collect();
    ConjunctiveQuery::new(Vec::new(), body).ok()
}

/// Verdict of the enumeration oracle. Never a proof of containment: it
/// covers only the instances it enumerated.
#[derive(Clone, Debug)]
pub struct OracleVerdict {
    pub outcome: Outcome,
    pub bounded: bool,
    pub instances_checked: usize,
    /// A source instance whose chases admit no homomorphism.
    pub counterexample: Option<Instance>,
    pub max_facts: usize,
    pub domain: Vec<Symbol>,
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Every instance of `schema` with at most `max_facts` facts over the
/// constants `domain`, one representative per renaming of the domain,
/// smallest first.
pub fn enumerate_instances(schema: &Arc<Schema>, domain: &[Symbol], max_facts: usize) -> Vec<Instance> {
    let values: Vec<Value> = domain.iter().cloned().map(Value::Const).collect();
    let mut facts = Vec::new();
    for (name, arity) in schema.relations() {
        let mut tuple = vec![0usize; arity];
        if values.is_empty() {
            continue;
        }
        loop {
            facts.push(Fact::new(
                name.clone(),
                tuple.iter().map(|&i| values[i].clone()).collect(),
            ));
            let Some(pos) = (0..arity).rev().find(|&p| tuple[p] + 1 < values.len()) else {
                break;
            };
            tuple[pos] += 1;
            for t in &mut tuple[pos + 1..] {
                *t = 0;
            }
        }
    }
    let perms: Vec<BTreeMap<Value, Value>> = permutations(values.len())
        .into_iter()
        .map(|p| {
            values
                .iter()
                .cloned()
                .zip(p.into_iter().map(|i| values[i].clone()))
                .collect()
        })
        .collect();

    let mut seen: BTreeSet<Vec<Fact>> = BTreeSet::new();
    let mut out = Vec::new();
    for k in 0..=max_facts.min(facts.len()) {
        for combo in combinations(facts.len(), k) {
            let chosen: Vec<&Fact> = combo.iter().map(|&i| &facts[i]).collect();
            let canonical = perms
                .iter()
                .map(|p| {
                    let mut renamed: Vec<Fact> = chosen.iter().map(|f| f.map_values(|v| p[v].clone())).collect();
                    renamed.sort();
                    renamed
                })
                .min()
                .unwrap_or_default();
            if seen.insert(canonical.clone()) {
                out.push(Instance::from_facts(schema.clone(), canonical).expect("facts built from the schema"));
            }
        }
    }
    out
}

/// Checks `chase_m(I) → chase_m2(I)` for every enumerated source instance.
pub fn oracle_containment(
    m: &SchemaMapping,
    m2: &SchemaMapping,
    max_facts: usize,
    domain: &[Symbol],
    budget: &ChaseConfig,
) -> Result<OracleVerdict, ContainmentError> {
    m.ensure_valid()
        .map_err(|source| ContainmentError::InvalidMapping { which: "left", source })?;
    m2.ensure_valid()
        .map_err(|source| ContainmentError::InvalidMapping { which: "right", source })?;
    if !m.same_schemas(m2) {
        return Err(ContainmentError::SchemaMismatch);
    }
    let mut verdict = OracleVerdict {
        outcome: Outcome::Contained,
        bounded: true,
        instances_checked: 0,
        counterexample: None,
        max_facts,
        domain: domain.to_vec(),
    };
    let mut inconclusive = None;
    for inst in enumerate_instances(&m.source, domain, max_facts) {
        verdict.instances_checked += 1;
        let left = chase_mapping(&inst, m, budget)?;
        let right = chase_mapping(&inst, m2, budget)?;
        if !left.terminated() || !right.terminated() {
            inconclusive.get_or_insert_with(|| format!("chase of {} exceeded the budget", inst.to_string().trim_end()));
            continue;
        }
        if find_homomorphism(&left.instance, &right.instance)?.is_none() {
            verdict.outcome = Outcome::NotContained;
            verdict.counterexample = Some(inst);
            return Ok(verdict);
        }
    }
    if let Some(why) = inconclusive {
        verdict.outcome = Outcome::Inconclusive(why);
    }
    Ok(verdict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_instance, parse_mapping, parse_query, SourceText};

    fn intro() -> SchemaMapping {
        parse_mapping(&SourceText::inline(
            "source { employee/3; } target { person/2; salary/2; }
             st { employee(X,Y,Z) -> person(X,W), salary(X,Y); }
             t { salary(X,Y) -> person(X,Z); }",
        ))
        .unwrap()
    }

    #[test]
    fn evaluation_over_nulls() {
        let schema = Arc::new(Schema::new([("person", 2), ("salary", 2)]).unwrap());
        let i = parse_instance(&"person(john,_1). salary(john,s50).".into(), &schema).unwrap();
        let q = parse_query(&"q(X) :- person(X,Y).".into(), &schema).unwrap();
        let a = evaluate_query(&q, &i).unwrap();
        assert_eq!(
            a.tuples.into_iter().collect::<Vec<_>>(),
            vec![vec![Value::constant("john")]]
        );
        let empty = Instance::new(schema.clone());
        assert!(evaluate_query(&q, &empty).unwrap().is_empty());
    }

    #[test]
    fn boolean_query_true() {
        let schema = Arc::new(Schema::new([("r2", 2), ("r3", 2)]).unwrap());
        let j = parse_instance(&"r2(b,_1). r3(_2,b). r3(_3,b).".into(), &schema).unwrap();
        let q = parse_query(&"q() :- r3(Z,X).".into(), &schema).unwrap();
        let a = evaluate_query(&q, &j).unwrap();
        assert_eq!(a.len(), 1);
        assert!(a.contains(&[]));
    }

    #[test]
    fn intro_certain_answers() {
        let m = intro();
        let i = parse_instance(&"employee(john,50,toys).".into(), &m.source).unwrap();
        let q = parse_query(&"q(X,Y) :- salary(X,Y).".into(), &m.target).unwrap();
        let a = certain_answers(&q, &i, &m, &ChaseConfig::default()).unwrap();
        assert!(a.null_free && !a.lower_bound);
        assert_eq!(a.to_lines(), "(john,50)\n");
        let q = parse_query(&"q(X,W) :- person(X,W).".into(), &m.target).unwrap();
        assert!(certain_answers(&q, &i, &m, &ChaseConfig::default()).unwrap().is_empty());
        let empty = Instance::new(m.source.clone());
        assert!(certain_answers(&q, &empty, &m, &ChaseConfig::default())
            .unwrap()
            .is_empty());
    }

    #[test]
    fn enumeration_is_up_to_renaming() {
        let s = Arc::new(Schema::new([("r", 2)]).unwrap());
        let dom = [Symbol::new("a"), Symbol::new("b")];
        let one: Vec<_> = enumerate_instances(&s, &dom, 1);
        // empty, r(a,a), r(a,b)
        assert_eq!(one.len(), 3);
        // Two facts over two constants: 6 subsets of {aa,ab,ba,bb} up to swapping a and b.
        assert_eq!(enumerate_instances(&s, &dom, 2).len() - 3, 4);
    }

    #[test]
    fn oracle_on_example_mappings() {
        let head = "source { r1/2; } target { r2/2; r3/2; }";
        let m1 = parse_mapping(&SourceText::inline(format!(
            "{head} st {{ r1(X,Y) -> r2(Y,Z); }} t {{ r2(X,Y) -> r3(Z,X); }}"
        )))
        .unwrap();
        let m2 = parse_mapping(&SourceText::inline(format!(
            "{head} st {{ r1(X,Y) -> r2(Y,Z); }} t {{ r2(X,Y) -> r3(Y,X); }}"
        )))
        .unwrap();
        let dom = [Symbol::new("a"), Symbol::new("b")];
        let cfg = ChaseConfig::default();
        let v = oracle_containment(&m1, &m2, 1, &dom, &cfg).unwrap();
        assert_eq!(v.outcome, Outcome::Contained);
        assert!(v.bounded);
        let v = oracle_containment(&m2, &m1, 1, &dom, &cfg).unwrap();
        assert_eq!(v.outcome, Outcome::NotContained);
        assert_eq!(v.counterexample.unwrap().len(), 1);
        assert_eq!(
            oracle_containment(&m2, &m2, 2, &dom, &cfg).unwrap().outcome,
            Outcome::Contained
        );
    }

    #[test]
    fn separating_query_from_chase() {
        let schema = Arc::new(Schema::new([("r1", 2), ("r2", 2), ("r3", 2)]).unwrap());
        let target = Schema::new([("r2", 2), ("r3", 2)]).unwrap();
        let j = parse_instance(&"r1(a,b). r2(b,_1). r3(_1,b).".into(), &schema).unwrap();
        let q = boolean_query_of(&j, &target).unwrap();
        assert_eq!(q.to_string(), "q() :- r2(b,N1), r3(N1,b).");
    }
}
