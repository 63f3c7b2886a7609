//! Maximal independent sets: Luby's algorithm with a priority class, and a
//! sequential greedy pass for subgraphs gathered at one machine.

use serde::{Deserialize, Serialize};

use crate::graph::Graph;
use crate::nodeset::NodeSet;
use crate::rng::RngStream;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LubyRunRecord {
    /// Luby rounds executed over both phases.
    pub iterations: u32,
    /// Nodes that joined in the first round executed.
    pub joined_first_round: NodeSet,
    pub mis: NodeSet,
}

/// Luby's MIS, run to completion on `g[phase_one]` first and then on whatever
/// remains undominated. Node `u` draws from `stream` keyed by its own id.
pub fn luby_mis(g: &Graph, phase_one: &NodeSet, stream: &RngStream) -> LubyRunRecord {
    let labels: Vec<usize> = (0..g.node_count()).collect();
    luby_mis_labeled(g, phase_one, stream, &labels)
}

/// As [`luby_mis`], but node `u` draws randomness (and breaks ties) by
/// `labels[u]`. Gathered subgraphs pass their parent ids here so a node's
/// coins do not depend on how the subgraph was numbered.
pub fn luby_mis_labeled(
    g: &Graph,
    phase_one: &NodeSet,
    stream: &RngStream,
    labels: &[usize],
) -> LubyRunRecord {
    let n = g.node_count();
    assert_eq!(labels.len(), n);
    assert_eq!(phase_one.universe(), n);

    let mut mis = NodeSet::new(n);
    let mut dominated = NodeSet::new(n);
    let mut joined_first_round = NodeSet::new(n);
    let mut iterations = 0u32;

    let phase_two: Vec<usize> = (0..n).filter(|&u| !phase_one.contains(u)).collect();
    let phases = [phase_one.to_vec(), phase_two];
    for (phase, members) in phases.into_iter().enumerate() {
        let coins = stream.child(phase as u64);
        let mut active: Vec<usize> = members
            .into_iter()
            .filter(|&u| !dominated.contains(u))
            .collect();
        let mut is_active = NodeSet::from_nodes(n, active.iter().copied());
        let mut key = vec![(0u64, 0usize); n];
        let mut round = 0u64;
        while !active.is_empty() {
            round += 1;
            iterations += 1;
            for &u in &active {
                key[u] = (coins.draw(round, labels[u] as u64), labels[u]);
            }
            let joiners: Vec<usize> = active
                .iter()
                .copied()
                .filter(|&u| {
                    g.neighbors(u)
                        .iter()
                        .all(|&v| !is_active.contains(v) || key[u] < key[v])
                })
                .collect();
            for &u in &joiners {
                mis.insert(u);
                if iterations == 1 {
                    joined_first_round.insert(u);
                }
                dominated.insert(u);
                for &v in g.neighbors(u) {
                    dominated.insert(v);
                }
            }
            active.retain(|&u| !dominated.contains(u));
            is_active = NodeSet::from_nodes(n, active.iter().copied());
        }
    }

    LubyRunRecord {
        iterations,
        joined_first_round,
        mis,
    }
}

/// Scans `order` and keeps every node with no previously kept neighbor.
/// Panics if `order` is not a permutation of the node ids.
pub fn greedy_mis(g: &Graph, order: &[usize]) -> NodeSet {
    let n = g.node_count();
    assert_eq!(order.len(), n, "order must list every node once");
    let mut seen = NodeSet::new(n);
    let mut mis = NodeSet::new(n);
    for &u in order {
        assert!(seen.insert(u), "order repeats node {u}");
        if g.neighbors(u).iter().all(|&v| !mis.contains(v)) {
            mis.insert(u);
        }
    }
    mis
}

/// A uniformly random order of `g`'s nodes keyed by `labels`.
pub fn random_order(stream: &RngStream, labels: &[usize]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..labels.len()).collect();
    order.sort_by_key(|&u| (stream.draw(0, labels[u] as u64), labels[u]));
    order
}
