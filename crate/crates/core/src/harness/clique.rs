//! Congested Clique accounting. Each neighborhood aggregate costs one round.
//! Gathering a subgraph with `E` edges at one node costs
//! `max(1, ceil(E / (n - 1))) + 1` rounds: the receiving node takes at most
//! `n - 1` words per round, and one more round broadcasts the MIS it computes.
//! The same charges describe the MPC setting, where the subgraphs are shipped
//! to one machine one after another.

use serde::{Deserialize, Serialize};

use crate::backend::{Backend, Fold, GraphBackend, PhaseCost};
use crate::config::AlgoConfig;
use crate::error::Result;
use crate::graph::{Graph, Induced};
use crate::nodeset::NodeSet;
use crate::ruling::{run_pipeline, RulingSetResult};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliqueAccount {
    pub rounds: u64,
    /// `(phase, rounds)` in execution order.
    pub phase_rounds: Vec<(String, u64)>,
    /// Most words any single node received in one primitive.
    pub max_node_volume: u64,
}

impl CliqueAccount {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "model": "clique",
            "rounds": self.rounds,
            "peak_words": self.max_node_volume,
        })
    }
}

/// Rounds charged for gathering `edges` edges in an `n`-node clique.
pub fn gather_rounds(edges: u64, n: usize) -> u64 {
    let per_round = n.saturating_sub(1).max(1) as u64;
    edges.div_ceil(per_round).max(1) + 1
}

/// Aggregates charged by a run with `i` reduction steps.
pub fn aggregate_count(reduction_steps: usize) -> u64 {
    23 + 4 * reduction_steps as u64
}

/// Gathers performed by a run with `i` reduction steps.
pub fn gather_count(reduction_steps: usize) -> u64 {
    5 + reduction_steps as u64
}

/// Rounds of a run with `i` reduction steps when every gather fits in `n - 1`
/// edges.
pub fn tight_rounds(reduction_steps: usize) -> u64 {
    aggregate_count(reduction_steps) + 2 * gather_count(reduction_steps)
}

/// Upper bound on the rounds of a run with `i` reduction steps when every
/// gather has at most `k * n` edges.
pub fn round_bound(k: f64, reduction_steps: usize, n: usize) -> u64 {
    let max_edges = (k * n as f64).floor() as u64;
    aggregate_count(reduction_steps) + gather_count(reduction_steps) * gather_rounds(max_edges, n)
}

pub struct CliqueBackend<'g> {
    inner: GraphBackend<'g>,
    phase: String,
    phase_cost: PhaseCost,
    pub account: CliqueAccount,
}

impl<'g> CliqueBackend<'g> {
    pub fn new(g: &'g Graph) -> Self {
        Self {
            inner: GraphBackend::new(g),
            phase: String::new(),
            phase_cost: PhaseCost::default(),
            account: CliqueAccount::default(),
        }
    }

    fn charge(&mut self, rounds: u64, volume: u64) {
        self.account.rounds += rounds;
        self.phase_cost.rounds += rounds;
        self.phase_cost.peak_words = self.phase_cost.peak_words.max(volume);
        self.account.max_node_volume = self.account.max_node_volume.max(volume);
    }

    fn max_alive_degree(&self, alive: &NodeSet) -> u64 {
        let g = self.inner.graph();
        alive
            .iter()
            .map(|u| g.neighbors(u).iter().filter(|&&v| alive.contains(v)).count() as u64)
            .max()
            .unwrap_or(0)
    }
}

impl Backend for CliqueBackend<'_> {
    fn node_count(&self) -> usize {
        self.inner.node_count()
    }

    fn aggregate(&mut self, alive: &NodeSet, values: &[u64], fold: Fold) -> Result<Vec<u64>> {
        let out = self.inner.aggregate(alive, values, fold)?;
        let volume = self.max_alive_degree(alive);
        self.charge(1, volume);
        Ok(out)
    }

    fn heavy_masks(
        &mut self,
        alive: &NodeSet,
        buckets: &[Option<u8>],
        degrees: &[u64],
        thresholds: &[f64],
    ) -> Result<Vec<u64>> {
        let out = self.inner.heavy_masks(alive, buckets, degrees, thresholds)?;
        let volume = self.max_alive_degree(alive);
        self.charge(1, volume);
        Ok(out)
    }

    fn gather(&mut self, members: &NodeSet) -> Result<Induced> {
        let sub = self.inner.gather(members)?;
        let edges = sub.graph.edge_count() as u64;
        self.charge(gather_rounds(edges, self.node_count()), edges);
        Ok(sub)
    }

    fn begin_phase(&mut self, label: &str) {
        self.phase = label.to_string();
    }

    fn take_phase_cost(&mut self) -> PhaseCost {
        let cost = std::mem::take(&mut self.phase_cost);
        self.account.phase_rounds.push((self.phase.clone(), cost.rounds));
        cost
    }
}

/// Runs the pipeline on `g`, charging Congested Clique rounds.
pub fn run_congested_clique(g: &Graph, cfg: &AlgoConfig) -> Result<(RulingSetResult, CliqueAccount)> {
    let mut backend = CliqueBackend::new(g);
    let result = run_pipeline(&mut backend, cfg)?;
    Ok((result, backend.account))
}
