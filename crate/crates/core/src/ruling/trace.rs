use serde::{Deserialize, Serialize};

use crate::nodeset::NodeSet;

/// One pipeline phase as it appears in the JSON trace.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseTrace {
    pub phase: String,
    /// Nodes of the subgraph gathered in this phase (0 if none).
    pub sub_nodes: u64,
    pub sub_edges: u64,
    pub luby_iters: Option<u32>,
    /// Nodes that first came within two hops of the ruling set in this phase.
    pub newly_covered: u64,
    pub passes: u64,
    pub rounds: u64,
    pub peak_words: u64,
}

/// Where a node's coverage comes from: a ruling node at hop distance 0, 1 or 2.
/// The ruler is the smallest-id ruling node at that distance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub ruler: usize,
    pub distance: u8,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Diagnostic {
    /// A gathered subgraph exceeded `budget_K * n` edges.
    GatherBudget { phase: String, edges: u64, budget: f64 },
    /// A streaming pass needed more words than the memory budget.
    MemoryBudget { phase: String, words: u64, budget: u64 },
    /// A main iteration ran on a graph whose maximum degree exceeds `n^alpha`.
    DegreeAboveTarget { phase: String, max_degree: u64, target: f64 },
}

/// One degree-reduction step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionStep {
    pub step: usize,
    /// `Delta^((3/4)^step)`; nodes are sampled with probability `1 / delta_step`.
    pub delta_step: f64,
    pub sampled: u64,
    pub sampled_edges: u64,
    pub residual_nodes: u64,
    pub residual_max_degree: u64,
}

/// The sets one main iteration worked with, in the ids of the input graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MainRunDetail {
    pub run: u8,
    /// Nodes of the graph the iteration ran on.
    pub members: NodeSet,
    pub vsamp: NodeSet,
    pub vstar: NodeSet,
    /// Every node that joined the ruling set in this iteration.
    pub additions: NodeSet,
    pub luby_iterations: u32,
}
