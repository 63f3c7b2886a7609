//! The 2-ruling-set pipeline: degree reduction, two sampled main iterations
//! with a bad-first Luby MIS and a set-aside MIS, then a final MIS on whatever
//! is still uncovered.

mod engine;
mod trace;

use serde::{Deserialize, Serialize};

use crate::backend::GraphBackend;
use crate::classify::{heavy_bucket_nodes, NodeClassification};
use crate::config::AlgoConfig;
use crate::error::{Error, Result};
use crate::graph::{induced_subgraph, Graph, Induced};
use crate::nodeset::NodeSet;
use crate::rng::RngStream;

pub(crate) use engine::run_pipeline;
use engine::Engine;
pub use trace::{Diagnostic, MainRunDetail, PhaseTrace, ReductionStep, Witness};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RulingSetResult {
    pub ruling: NodeSet,
    pub trace: Vec<PhaseTrace>,
    /// Indexed by node.
    pub coverage_witness: Vec<Witness>,
    pub diagnostics: Vec<Diagnostic>,
    pub reduction: Vec<ReductionStep>,
    pub runs: Vec<MainRunDetail>,
}

impl RulingSetResult {
    pub fn max_luby_iterations(&self) -> u32 {
        self.trace.iter().filter_map(|t| t.luby_iters).max().unwrap_or(0)
    }

    /// Largest subgraph gathered by any phase, in edges.
    pub fn max_gather_edges(&self) -> u64 {
        self.trace.iter().map(|t| t.sub_edges).max().unwrap_or(0)
    }

    pub fn phase(&self, label: &str) -> Option<&PhaseTrace> {
        self.trace.iter().find(|t| t.phase == label)
    }
}

/// `min(1, 1/sqrt(deg))`.
pub fn sample_probability(deg: u64) -> f64 {
    if deg <= 1 {
        1.0
    } else {
        1.0 / (deg as f64).sqrt()
    }
}

/// Upper limit on degree-reduction steps: `ceil(log_{4/3}(2/alpha))`.
pub fn max_reduction_steps(alpha: f64) -> usize {
    ((2.0 / alpha).ln() / (4.0f64 / 3.0).ln()).ceil() as usize
}

/// The per-step degrees `Delta_j = Delta^((3/4)^j)` for `j = 1..=i`, where `i`
/// is the first step with `Delta_i <= n^(alpha/2)`, capped at
/// [`max_reduction_steps`]. Empty when `Delta <= n^alpha`.
pub fn reduction_schedule(max_degree: usize, n: usize, alpha: f64) -> Vec<f64> {
    if n < 2 || max_degree as f64 <= (n as f64).powf(alpha) {
        return Vec::new();
    }
    let ln_delta = (max_degree as f64).ln();
    let target = alpha / 2.0 * (n as f64).ln();
    let mut out = Vec::new();
    for j in 1..=max_reduction_steps(alpha) {
        let ln_step = 0.75f64.powi(j as i32) * ln_delta;
        out.push(ln_step.exp());
        if ln_step <= target {
            break;
        }
    }
    out
}

/// Samples every node independently with probability `min(1, 1/sqrt(deg))`.
pub fn sample_vsamp(g: &Graph, stream: &RngStream) -> Result<NodeSet> {
    let n = g.node_count();
    if let Some(u) = (0..n).find(|&u| g.degree(u) == 0) {
        return Err(Error::Contract(format!("node {u} is isolated and cannot be sampled")));
    }
    Ok(NodeSet::from_nodes(
        n,
        (0..n).filter(|&v| stream.coin(0, v as u64, sample_probability(g.degree(v) as u64))),
    ))
}

/// Good nodes with no neighbor in `vsamp`, plus uncovered bad nodes that have a
/// neighbor with at least `heavy_threshold` neighbors in their own bucket.
pub fn compute_set_aside(
    g: &Graph,
    cls: &NodeClassification,
    vsamp: &NodeSet,
    covered: &NodeSet,
    cfg: &AlgoConfig,
) -> NodeSet {
    let n = g.node_count();
    let mut out = NodeSet::from_nodes(
        n,
        (0..n).filter(|&u| cls.is_good(u) && g.neighbors(u).iter().all(|&v| !vsamp.contains(v))),
    );
    out.union_with(&heavy_bucket_nodes(g, cls, cfg.c_setaside).difference(covered));
    out
}

#[derive(Clone, Debug)]
pub struct ReductionOutcome {
    /// MIS nodes of every step.
    pub partial_ruling: NodeSet,
    /// The graph left after removing each step's sample and its neighbors.
    pub residual: Induced,
    pub steps: Vec<ReductionStep>,
    pub trace: Vec<PhaseTrace>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Degree reduction alone. Randomness comes from `cfg.seed`.
pub fn degree_reduction(g: &Graph, cfg: &AlgoConfig) -> Result<ReductionOutcome> {
    cfg.validate()?;
    let mut backend = GraphBackend::new(g);
    let mut engine = Engine::new(&mut backend, cfg);
    let start = engine.start()?;
    let isolated = NodeSet::from_nodes(g.node_count(), (0..g.node_count()).filter(|&u| start.degrees[u] == 0));
    let residual = engine.reduce(&start.degrees)?.union(&isolated);
    let result = engine.into_result(Vec::new());
    Ok(ReductionOutcome {
        partial_ruling: result.ruling.difference(&isolated),
        residual: induced_subgraph(g, &residual),
        steps: result.reduction,
        trace: result.trace.into_iter().filter(|t| t.phase != "degrees").collect(),
        diagnostics: result.diagnostics,
    })
}

#[derive(Clone, Debug)]
pub struct MainIterationOutcome {
    /// `two_hop_covered(g, ruling_additions)`.
    pub covered: NodeSet,
    pub ruling_additions: NodeSet,
    pub detail: MainRunDetail,
    pub trace: Vec<PhaseTrace>,
    pub diagnostics: Vec<Diagnostic>,
}

/// One main iteration on all of `g`. Randomness comes from `cfg.seed`.
pub fn main_iteration(g: &Graph, cfg: &AlgoConfig) -> Result<MainIterationOutcome> {
    cfg.validate()?;
    let mut backend = GraphBackend::new(g);
    let mut engine = Engine::new(&mut backend, cfg);
    engine.main_iteration(1, &g.all_nodes())?;
    let covered = engine.covered.clone();
    let mut result = engine.into_result(Vec::new());
    let detail = result.runs.pop().expect("one run recorded");
    Ok(MainIterationOutcome {
        covered,
        ruling_additions: detail.additions.clone(),
        detail,
        trace: result.trace,
        diagnostics: result.diagnostics,
    })
}

/// The full pipeline on an in-memory graph.
pub fn parallel_two_ruling_set(g: &Graph, cfg: &AlgoConfig) -> Result<RulingSetResult> {
    run_pipeline(&mut GraphBackend::new(g), cfg)
}
