//! The three graph primitives the pipeline is written against.
//!
//! Every step of the ruling-set pipeline reduces to one of:
//! a one-hop neighborhood aggregate, a per-bucket neighbor count, or a
//! gather of an induced subgraph at one place. The in-memory backend answers
//! them from a [`Graph`]; the harnesses answer them by replaying an edge
//! stream or by charging Congested Clique rounds. All primitives are
//! order-independent (integer sums, bitwise or, minimum), so every backend
//! produces bit-identical answers.

use crate::error::Result;
use crate::graph::{induced_subgraph, Graph, Induced};
use crate::nodeset::NodeSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fold {
    Sum,
    Or,
    Min,
}

impl Fold {
    pub fn identity(self) -> u64 {
        match self {
            Fold::Sum | Fold::Or => 0,
            Fold::Min => u64::MAX,
        }
    }

    #[inline]
    pub fn apply(self, acc: u64, x: u64) -> u64 {
        match self {
            Fold::Sum => acc + x,
            Fold::Or => acc | x,
            Fold::Min => acc.min(x),
        }
    }
}

/// Resources charged by a backend for one pipeline phase.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PhaseCost {
    pub passes: u64,
    pub rounds: u64,
    pub peak_words: u64,
}

pub trait Backend {
    fn node_count(&self) -> usize;

    /// For every `u` in `alive`, folds `values[v]` over the neighbors `v` of
    /// `u` that are also in `alive`. Nodes outside `alive` get the identity.
    fn aggregate(&mut self, alive: &NodeSet, values: &[u64], fold: Fold) -> Result<Vec<u64>>;

    /// For every `v` in `alive`: bit `b` of the result is set iff at least
    /// `thresholds[b]` alive neighbors of `v` have `buckets[w] == Some(b)`.
    /// `degrees` are degrees inside `alive`; a bucket whose threshold exceeds
    /// a node's degree can never fire for it.
    fn heavy_masks(
        &mut self,
        alive: &NodeSet,
        buckets: &[Option<u8>],
        degrees: &[u64],
        thresholds: &[f64],
    ) -> Result<Vec<u64>>;

    /// The subgraph induced by `members`, numbered in ascending parent order.
    fn gather(&mut self, members: &NodeSet) -> Result<Induced>;

    fn begin_phase(&mut self, _label: &str) {}

    /// Cost accrued since the last call.
    fn take_phase_cost(&mut self) -> PhaseCost {
        PhaseCost::default()
    }
}

/// `set` plus every alive node with an alive neighbor in `set`.
pub fn expand<B: Backend + ?Sized>(backend: &mut B, alive: &NodeSet, set: &NodeSet) -> Result<NodeSet> {
    let n = backend.node_count();
    let indicator: Vec<u64> = (0..n).map(|u| set.contains(u) as u64).collect();
    let hit = backend.aggregate(alive, &indicator, Fold::Or)?;
    let mut out = set.clone();
    for u in alive.iter() {
        if hit[u] != 0 {
            out.insert(u);
        }
    }
    Ok(out)
}

/// Answers primitives directly from an adjacency structure, at no charge.
pub struct GraphBackend<'g> {
    graph: &'g Graph,
}

impl<'g> GraphBackend<'g> {
    pub fn new(graph: &'g Graph) -> Self {
        Self { graph }
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }
}

impl Backend for GraphBackend<'_> {
    fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    fn aggregate(&mut self, alive: &NodeSet, values: &[u64], fold: Fold) -> Result<Vec<u64>> {
        let g = self.graph;
        let mut out = vec![fold.identity(); g.node_count()];
        for u in alive.iter() {
            out[u] = g
                .neighbors(u)
                .iter()
                .filter(|&&v| alive.contains(v))
                .fold(fold.identity(), |acc, &v| fold.apply(acc, values[v]));
        }
        Ok(out)
    }

    fn heavy_masks(
        &mut self,
        alive: &NodeSet,
        buckets: &[Option<u8>],
        _degrees: &[u64],
        thresholds: &[f64],
    ) -> Result<Vec<u64>> {
        let g = self.graph;
        let mut out = vec![0u64; g.node_count()];
        let mut counts = [0u32; 64];
        for v in alive.iter() {
            counts.fill(0);
            for &w in g.neighbors(v) {
                if alive.contains(w) {
                    if let Some(b) = buckets[w] {
                        counts[b as usize] += 1;
                    }
                }
            }
            for (b, &cnt) in counts.iter().enumerate() {
                if cnt > 0 && cnt as f64 >= thresholds[b] {
                    out[v] |= 1 << b;
                }
            }
        }
        Ok(out)
    }

    fn gather(&mut self, members: &NodeSet) -> Result<Induced> {
        Ok(induced_subgraph(self.graph, members))
    }
}
