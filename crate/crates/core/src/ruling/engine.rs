//! The pipeline itself, written once against [`Backend`].

use crate::backend::{expand, Backend, Fold};
use crate::classify::{heavy_thresholds, inv_sqrt_fixed, label_from_sum, Label};
use crate::config::AlgoConfig;
use crate::error::{Error, Result};
use crate::graph::Induced;
use crate::mis::{greedy_mis, luby_mis_labeled, random_order};
use crate::nodeset::NodeSet;
use crate::rng::RngStream;

use super::trace::{Diagnostic, MainRunDetail, PhaseTrace, ReductionStep, Witness};
use super::{reduction_schedule, sample_probability, RulingSetResult};

pub(crate) mod tags {
    pub const REDUCE_SAMPLE: u64 = 1;
    pub const REDUCE_ORDER: u64 = 2;
    pub const SAMPLE: u64 = 10;
    pub const LUBY: u64 = 11;
    pub const SETASIDE_ORDER: u64 = 12;
    pub const FINAL_ORDER: u64 = 20;
}

pub(crate) struct Engine<'a, B: Backend + ?Sized> {
    backend: &'a mut B,
    cfg: &'a AlgoConfig,
    n: usize,
    all: NodeSet,
    pub ruling: NodeSet,
    /// Nodes within two hops of `ruling` in the input graph.
    pub covered: NodeSet,
    pub trace: Vec<PhaseTrace>,
    pub diagnostics: Vec<Diagnostic>,
    pub reduction: Vec<ReductionStep>,
    pub runs: Vec<MainRunDetail>,
}

pub(crate) struct Start {
    pub degrees: Vec<u64>,
    pub edges: u64,
}

impl<'a, B: Backend + ?Sized> Engine<'a, B> {
    pub fn new(backend: &'a mut B, cfg: &'a AlgoConfig) -> Self {
        let n = backend.node_count();
        Self {
            backend,
            cfg,
            n,
            all: NodeSet::full(n),
            ruling: NodeSet::new(n),
            covered: NodeSet::new(n),
            trace: Vec::new(),
            diagnostics: Vec::new(),
            reduction: Vec::new(),
            runs: Vec::new(),
        }
    }

    fn record(&mut self, phase: String, sub: Option<&Induced>, luby_iters: Option<u32>, newly: usize) {
        let cost = self.backend.take_phase_cost();
        let (sub_nodes, sub_edges) = sub
            .map(|s| (s.graph.node_count() as u64, s.graph.edge_count() as u64))
            .unwrap_or((0, 0));
        self.trace.push(PhaseTrace {
            phase,
            sub_nodes,
            sub_edges,
            luby_iters,
            newly_covered: newly as u64,
            passes: cost.passes,
            rounds: cost.rounds,
            peak_words: cost.peak_words,
        });
    }

    fn degrees_within(&mut self, alive: &NodeSet) -> Result<Vec<u64>> {
        let ones = vec![1u64; self.n];
        self.backend.aggregate(alive, &ones, Fold::Sum)
    }

    fn gather(&mut self, phase: &str, members: &NodeSet) -> Result<Induced> {
        let sub = self.backend.gather(members)?;
        let budget = self.cfg.budget_k * self.n as f64;
        let edges = sub.graph.edge_count() as u64;
        if edges as f64 > budget {
            self.diagnostics.push(Diagnostic::GatherBudget {
                phase: phase.to_string(),
                edges,
                budget,
            });
        }
        Ok(sub)
    }

    /// Extends `covered` by the two-hop neighborhood of `joined` and returns
    /// how many nodes were newly covered. Two neighborhood scans.
    fn cover(&mut self, joined: &NodeSet) -> Result<usize> {
        let all = self.all.clone();
        let one = expand(self.backend, &all, joined)?;
        let two = expand(self.backend, &all, &one)?;
        let newly = two.difference(&self.covered).len();
        self.covered.union_with(&two);
        Ok(newly)
    }

    fn join(&mut self, nodes: &NodeSet) {
        self.ruling.union_with(nodes);
    }

    /// Degree pass. Isolated nodes join the ruling set right away.
    pub fn start(&mut self) -> Result<Start> {
        self.backend.begin_phase("degrees");
        let all = self.all.clone();
        let degrees = self.degrees_within(&all)?;
        let edges = degrees.iter().sum::<u64>() / 2;
        let isolated = NodeSet::from_nodes(self.n, (0..self.n).filter(|&u| degrees[u] == 0));
        self.join(&isolated);
        self.covered.union_with(&isolated);
        self.record("degrees".into(), None, None, isolated.len());
        Ok(Start { degrees, edges })
    }

    /// Degree reduction; returns the nodes of the residual graph.
    pub fn reduce(&mut self, degrees: &[u64]) -> Result<NodeSet> {
        let max_degree = degrees.iter().copied().max().unwrap_or(0) as usize;
        let mut alive = NodeSet::from_nodes(self.n, (0..self.n).filter(|&u| degrees[u] > 0));
        let schedule = reduction_schedule(max_degree, self.n, self.cfg.alpha);
        let sampler = RngStream::new(self.cfg.seed, tags::REDUCE_SAMPLE);
        let orderer = RngStream::new(self.cfg.seed, tags::REDUCE_ORDER);
        for (idx, &delta_step) in schedule.iter().enumerate() {
            let step = idx + 1;
            let label = format!("reduce-{step}");
            self.backend.begin_phase(&label);
            let rate = 1.0 / delta_step;
            let sampled = NodeSet::from_nodes(
                self.n,
                alive.iter().filter(|&v| sampler.coin(step as u64, v as u64, rate)),
            );
            let sub = self.gather(&label, &sampled)?;
            let order = random_order(&orderer.child(step as u64), &sub.to_parent);
            let mis = sub.lift(&greedy_mis(&sub.graph, &order), self.n);
            self.join(&mis);
            let removed = expand(self.backend, &alive, &sampled)?;
            alive.difference_with(&removed);
            let newly = self.cover(&mis)?;
            let residual_degrees = self.degrees_within(&alive)?;
            self.reduction.push(ReductionStep {
                step,
                delta_step,
                sampled: sampled.len() as u64,
                sampled_edges: sub.graph.edge_count() as u64,
                residual_nodes: alive.len() as u64,
                residual_max_degree: residual_degrees.iter().copied().max().unwrap_or(0),
            });
            self.record(label, Some(&sub), None, newly);
        }
        Ok(alive)
    }

    /// One execution of sample, bad-first Luby, set-aside and set-aside MIS on
    /// the subgraph induced by `alive`.
    pub fn main_iteration(&mut self, run: u8, alive: &NodeSet) -> Result<()> {
        let n = self.n;
        let label = format!("main{run}-sample");
        self.backend.begin_phase(&label);

        let degrees = self.degrees_within(alive)?;
        let max_degree = alive.iter().map(|u| degrees[u]).max().unwrap_or(0);
        let target = (n as f64).powf(self.cfg.alpha);
        if max_degree as f64 > target {
            self.diagnostics.push(Diagnostic::DegreeAboveTarget {
                phase: label.clone(),
                max_degree,
                target,
            });
        }
        let isolated = NodeSet::from_nodes(n, alive.iter().filter(|&u| degrees[u] == 0));
        let active = alive.difference(&isolated);

        let weights: Vec<u64> = degrees.iter().map(|&d| inv_sqrt_fixed(d)).collect();
        let sums = self.backend.aggregate(&active, &weights, Fold::Sum)?;
        let labels: Vec<Option<Label>> = (0..n)
            .map(|u| active.contains(u).then(|| label_from_sum(degrees[u], sums[u], self.cfg.gamma)))
            .collect();
        let buckets: Vec<Option<u8>> = labels.iter().map(|l| l.and_then(Label::bad_bucket)).collect();
        let thresholds = heavy_thresholds(self.cfg.c_setaside);
        let masks = self.backend.heavy_masks(&active, &buckets, &degrees, &thresholds)?;

        let sampler = RngStream::new(self.cfg.seed, tags::SAMPLE).child(run as u64);
        let vsamp = NodeSet::from_nodes(
            n,
            active
                .iter()
                .filter(|&v| sampler.coin(0, v as u64, sample_probability(degrees[v]))),
        );
        const SAMPLED_BIT: u64 = 1 << 63;
        let words: Vec<u64> = (0..n)
            .map(|v| masks[v] | if vsamp.contains(v) { SAMPLED_BIT } else { 0 })
            .collect();
        let flags = self.backend.aggregate(&active, &words, Fold::Or)?;

        let sub = self.gather(&label, &vsamp)?;
        let bad_sampled = NodeSet::from_nodes(n, vsamp.iter().filter(|&v| buckets[v].is_some()));
        let luby_stream = RngStream::new(self.cfg.seed, tags::LUBY).child(run as u64);
        let luby = luby_mis_labeled(&sub.graph, &sub.localize(&bad_sampled), &luby_stream, &sub.to_parent);
        let independent = sub.lift(&luby.mis, n);

        let mut additions = independent.union(&isolated);
        self.join(&additions);
        let local_cover = {
            let one = expand(self.backend, &active, &independent)?;
            expand(self.backend, &active, &one)?
        };
        let newly = self.cover(&additions)?;
        self.record(label, Some(&sub), Some(luby.iterations), newly);

        let label = format!("main{run}-set-aside");
        self.backend.begin_phase(&label);
        let vstar = NodeSet::from_nodes(
            n,
            active.iter().filter(|&u| match buckets[u] {
                None => flags[u] & SAMPLED_BIT == 0,
                Some(b) => flags[u] >> b & 1 == 1 && !local_cover.contains(u),
            }),
        );
        let sub = self.gather(&label, &vstar)?;
        let orderer = RngStream::new(self.cfg.seed, tags::SETASIDE_ORDER).child(run as u64);
        let order = random_order(&orderer, &sub.to_parent);
        let set_aside_mis = sub.lift(&greedy_mis(&sub.graph, &order), n);
        self.join(&set_aside_mis);
        let newly = self.cover(&set_aside_mis)?;
        self.record(label, Some(&sub), None, newly);

        additions.union_with(&set_aside_mis);
        self.runs.push(MainRunDetail {
            run,
            members: alive.clone(),
            vsamp,
            vstar,
            additions,
            luby_iterations: luby.iterations,
        });
        Ok(())
    }

    /// MIS on everything still uncovered.
    pub fn finish_uncovered(&mut self) -> Result<()> {
        self.backend.begin_phase("final");
        let uncovered = self.covered.complement();
        let sub = self.gather("final", &uncovered)?;
        let orderer = RngStream::new(self.cfg.seed, tags::FINAL_ORDER);
        let order = random_order(&orderer, &sub.to_parent);
        let mis = sub.lift(&greedy_mis(&sub.graph, &order), self.n);
        self.join(&mis);
        self.covered = self.all.clone();
        self.record("final".into(), Some(&sub), None, uncovered.len());
        Ok(())
    }

    /// Two min-aggregates name, for every node, the smallest ruler at the
    /// smallest distance.
    pub fn witnesses(&mut self) -> Result<Vec<Witness>> {
        self.backend.begin_phase("witness");
        let n = self.n;
        let all = self.all.clone();
        let own: Vec<u64> = (0..n)
            .map(|u| if self.ruling.contains(u) { u as u64 } else { u64::MAX })
            .collect();
        let one = self.backend.aggregate(&all, &own, Fold::Min)?;
        let two = self.backend.aggregate(&all, &one, Fold::Min)?;
        let witnesses = (0..n)
            .map(|u| {
                if self.ruling.contains(u) {
                    Ok(Witness { ruler: u, distance: 0 })
                } else if one[u] != u64::MAX {
                    Ok(Witness { ruler: one[u] as usize, distance: 1 })
                } else if two[u] != u64::MAX {
                    Ok(Witness { ruler: two[u] as usize, distance: 2 })
                } else {
                    Err(Error::Contract(format!("node {u} is not within two hops of the ruling set")))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        self.record("witness".into(), None, None, 0);
        Ok(witnesses)
    }

    pub fn into_result(self, coverage_witness: Vec<Witness>) -> RulingSetResult {
        RulingSetResult {
            ruling: self.ruling,
            trace: self.trace,
            coverage_witness,
            diagnostics: self.diagnostics,
            reduction: self.reduction,
            runs: self.runs,
        }
    }
}

/// The whole pipeline on any backend.
pub(crate) fn run_pipeline<B: Backend + ?Sized>(backend: &mut B, cfg: &AlgoConfig) -> Result<RulingSetResult> {
    cfg.validate()?;
    let mut engine = Engine::new(backend, cfg);
    let start = engine.start()?;
    if start.edges == 0 {
        let witnesses = (0..engine.n).map(|u| Witness { ruler: u, distance: 0 }).collect();
        return Ok(engine.into_result(witnesses));
    }
    let residual = engine.reduce(&start.degrees)?;
    engine.main_iteration(1, &residual)?;
    let second = engine.covered.complement();
    engine.main_iteration(2, &second)?;
    engine.finish_uncovered()?;
    let witnesses = engine.witnesses()?;
    Ok(engine.into_result(witnesses))
}
