use std::collections::BTreeMap;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use crate::model::{Symbol, Tgd};

type Position = (Symbol, usize);

/// Weak acyclicity of the position dependency graph.
///
/// For every body variable `x` that also occurs in the head, each body
/// position of `x` gets a regular edge to each head position of `x` and a
/// special edge to each position holding an existential variable. The set is
/// weakly acyclic iff no cycle goes through a special edge. This bounds the
/// restricted chase on every finite instance, but not the oblivious one:
/// `r(X,Y) -> r(X,Z)` is weakly acyclic and its oblivious chase is infinite.
pub fn is_weakly_acyclic(tgds: &[Tgd]) -> bool {
    no_special_cycle(tgds, false)
}

/// Like [`is_weakly_acyclic`], but body variables missing from the head also
/// contribute special edges. Rich acyclicity bounds the oblivious chase.
pub fn is_richly_acyclic(tgds: &[Tgd]) -> bool {
    no_special_cycle(tgds, true)
}

fn no_special_cycle(tgds: &[Tgd], rich: bool) -> bool {
    let mut graph: DiGraph<Position, bool> = DiGraph::new();
    let mut nodes: BTreeMap<Position, NodeIndex> = BTreeMap::new();
    let mut node =
        |g: &mut DiGraph<Position, bool>, p: Position| *nodes.entry(p.clone()).or_insert_with(|| g.add_node(p));

    for tgd in tgds {
        let existentials = tgd.existentials();
        let head_positions: Vec<(Position, &Symbol)> = tgd
            .head
            .iter()
            .flat_map(|a| {
                a.args
                    .iter()
                    .enumerate()
                    .filter_map(move |(i, t)| t.as_var().map(|v| ((a.predicate.clone(), i), v)))
            })
            .collect();
        for atom in &tgd.body {
            for (i, t) in atom.args.iter().enumerate() {
                let Some(x) = t.as_var() else { continue };
                if !rich && !head_positions.iter().any(|(_, v)| *v == x) {
                    continue;
                }
                let from = node(&mut graph, (atom.predicate.clone(), i));
                for (q, v) in &head_positions {
                    let special = existentials.contains(v);
                    if *v == x || special {
                        let to = node(&mut graph, q.clone());
                        graph.add_edge(from, to, special);
                    }
                }
            }
        }
    }

    let mut component = vec![0usize; graph.node_count()];
    for (c, scc) in tarjan_scc(&graph).into_iter().enumerate() {
        for n in scc {
            component[n.index()] = c;
        }
    }
    graph.edge_indices().all(|e| {
        let (a, b) = graph.edge_endpoints(e).expect("edge exists");
        !graph[e] || component[a.index()] != component[b.index()]
    })
}

/// `|Σ| · (W + 1)^W`, where `W` is the largest predicate arity in `tgds`.
/// Zero for an empty set. Saturates instead of overflowing.
pub fn default_level_bound(tgds: &[Tgd]) -> u64 {
    if tgds.is_empty() {
        return 0;
    }
    let w = tgds.iter().map(Tgd::max_arity).max().unwrap_or(0) as u64;
    let power = (w + 1).checked_pow(w as u32).unwrap_or(u64::MAX);
    (tgds.len() as u64).saturating_mul(power)
}
