use std::path::PathBuf;

use anyhow::{Context, Result};
use rayon::prelude::*;
use serde::Serialize;

use rulingset::classify::classify_nodes;
use rulingset::graph::parse_edge_list;
use rulingset::harness::stream::{FileStream, MemoryStream};
use rulingset::ruling::{main_iteration, sample_vsamp, Diagnostic, PhaseTrace, ReductionStep, Witness};
use rulingset::verify::{
    check_bad_bucket_bound, check_bad_inc_lower, check_final_residual_size, check_good_coverage_rate,
    check_gsamp_size, check_residual_purity, check_setaside_size, Violation,
};
use rulingset::{
    generate, induced_subgraph, parallel_two_ruling_set, run_congested_clique, run_streaming, two_hop_covered,
    verify_ruling_set, AlgoConfig, GeneratorSpec, Graph, LemmaReport, RngStream, RulingSetResult,
};

pub const SCHEMA: u32 = 1;

/// Samples drawn per trial for the good-node coverage rate.
const COVERAGE_SAMPLES: u64 = 16;

#[derive(Clone, Debug)]
pub enum GraphSource {
    Generated(GeneratorSpec),
    File(PathBuf),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Harness {
    Stream,
    Clique,
    None,
}

impl Harness {
    fn name(self) -> &'static str {
        match self {
            Harness::Stream => "stream",
            Harness::Clique => "clique",
            Harness::None => "none",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Plan {
    pub source: GraphSource,
    pub config: AlgoConfig,
    pub base_seed: u64,
    pub harness: Harness,
    pub trials: u64,
    pub check_lemmas: bool,
    pub beta: usize,
}

#[derive(Serialize)]
pub struct GraphInfo {
    pub source: String,
    pub n: usize,
    pub m: usize,
    pub max_degree: usize,
}

/// A lemma report tagged with the subgraph it was measured on.
#[derive(Serialize)]
pub struct ScopedReport {
    pub scope: String,
    #[serde(flatten)]
    pub report: LemmaReport,
}

/// Everything written to `trial-NNNN.json`.
#[derive(Serialize)]
pub struct Trial {
    pub schema: u32,
    pub trial: u64,
    pub seed: u64,
    pub harness: &'static str,
    pub graph: GraphInfo,
    pub config: AlgoConfig,
    pub valid: bool,
    pub violation: Option<Violation>,
    pub ruling_size: usize,
    pub ruling: Vec<usize>,
    pub account: Option<serde_json::Value>,
    pub trace: Vec<PhaseTrace>,
    pub reduction: Vec<ReductionStep>,
    pub diagnostics: Vec<Diagnostic>,
    pub coverage_witness: Vec<Witness>,
    pub lemmas: Option<Vec<ScopedReport>>,
    /// MPC with `Theta(n)` words per machine is charged as the clique gather model.
    pub mpc_note: &'static str,
}

impl Trial {
    pub fn passes(&self) -> Option<u64> {
        self.account_field("passes")
    }

    pub fn rounds(&self) -> Option<u64> {
        self.account_field("rounds")
    }

    pub fn peak_words(&self) -> Option<u64> {
        self.account_field("peak_words")
    }

    fn account_field(&self, key: &str) -> Option<u64> {
        self.account.as_ref()?.get(key)?.as_u64()
    }

    pub fn max_gather_edges(&self) -> u64 {
        self.trace.iter().map(|t| t.sub_edges).max().unwrap_or(0)
    }

    pub fn max_luby_iterations(&self) -> u32 {
        self.trace.iter().filter_map(|t| t.luby_iters).max().unwrap_or(0)
    }

    pub fn lemma_failures(&self) -> usize {
        self.lemmas.iter().flatten().filter(|r| !r.report.passed()).count()
    }
}

/// A loaded input file. `streamable` is set when the file lists every edge
/// exactly once, so the stream harness can re-read it directly.
struct Loaded {
    graph: Graph,
    path: PathBuf,
    streamable: bool,
}

fn load(path: &PathBuf) -> Result<Loaded> {
    let file = std::fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let (n, edges) = parse_edge_list(std::io::BufReader::new(file)).with_context(|| format!("reading {}", path.display()))?;
    let raw = edges.len();
    let loops = edges.iter().any(|&(u, v)| u == v);
    let graph = Graph::from_edges(n, edges)?;
    Ok(Loaded {
        streamable: !loops && raw == graph.edge_count(),
        graph,
        path: path.clone(),
    })
}

pub fn run_all(plan: &Plan) -> Result<Vec<Trial>> {
    plan.config.validate()?;
    let file = match &plan.source {
        GraphSource::File(path) => Some(load(path)?),
        GraphSource::Generated(spec) => {
            spec.validate()?;
            None
        }
    };
    (0..plan.trials)
        .into_par_iter()
        .map(|t| run_trial(plan, file.as_ref(), t).with_context(|| format!("trial {t}")))
        .collect()
}

fn run_trial(plan: &Plan, file: Option<&Loaded>, t: u64) -> Result<Trial> {
    let seed = plan.base_seed.wrapping_add(t);
    let cfg = plan.config.clone().with_seed(seed);
    let generated;
    let (g, source) = match (&plan.source, file) {
        (GraphSource::Generated(spec), _) => {
            let spec = spec.clone().with_seed(spec.seed.wrapping_add(t));
            generated = generate(&spec)?;
            (&generated, spec.to_string())
        }
        (GraphSource::File(path), Some(loaded)) => (&loaded.graph, path.display().to_string()),
        (GraphSource::File(_), None) => unreachable!("file sources are loaded up front"),
    };
    let (result, account) = match plan.harness {
        Harness::None => (parallel_two_ruling_set(g, &cfg)?, None),
        Harness::Clique => {
            let (r, acc) = run_congested_clique(g, &cfg)?;
            (r, Some(acc.to_json()))
        }
        Harness::Stream => {
            let (r, acc) = match file {
                Some(loaded) if loaded.streamable => run_streaming(&mut FileStream::open(&loaded.path)?, &cfg)?,
                _ => run_streaming(&mut MemoryStream::new(g), &cfg)?,
            };
            (r, Some(acc.to_json()))
        }
    };
    let check = verify_ruling_set(g, &result.ruling, plan.beta);
    let lemmas = plan.check_lemmas.then(|| lemma_reports(g, &cfg, &result));
    Ok(Trial {
        schema: SCHEMA,
        trial: t,
        seed,
        harness: plan.harness.name(),
        graph: GraphInfo {
            source,
            n: g.node_count(),
            m: g.edge_count(),
            max_degree: g.max_degree(),
        },
        config: cfg,
        valid: check.valid,
        violation: check.violation,
        ruling_size: result.ruling.len(),
        ruling: result.ruling.to_vec(),
        account,
        trace: result.trace,
        reduction: result.reduction,
        diagnostics: result.diagnostics,
        coverage_witness: result.coverage_witness,
        lemmas,
        mpc_note: "mpc rounds with Theta(n) words per machine equal the clique charge",
    })
}

fn scoped(scope: &str, reports: impl IntoIterator<Item = LemmaReport>) -> Vec<ScopedReport> {
    reports
        .into_iter()
        .map(|report| ScopedReport {
            scope: scope.to_string(),
            report,
        })
        .collect()
}

/// Lemma checks on the input graph, on one standalone main iteration over the
/// whole graph, and inside each main iteration of the pipeline run.
fn lemma_reports(g: &Graph, cfg: &AlgoConfig, result: &RulingSetResult) -> Vec<ScopedReport> {
    let seed = cfg.seed;
    let k = cfg.budget_k;
    let cls = classify_nodes(g, cfg.gamma);
    let mut out: Vec<ScopedReport> = Vec::new();

    out.extend(scoped("graph", [check_bad_inc_lower(g, &cls, cfg.gamma, cfg.d_min)]));
    out.extend(scoped(
        "graph",
        check_bad_bucket_bound(g, &cls, cfg.gamma, cfg.c_setaside, cfg.d_min, seed),
    ));
    if g.edge_count() > 0 && (0..g.node_count()).all(|u| g.degree(u) > 0) {
        let root = RngStream::new(seed, 0xC0FE);
        out.extend(scoped(
            "graph",
            check_good_coverage_rate(g, &cls, cfg.gamma, cfg.d_min, COVERAGE_SAMPLES, seed, |t| {
                sample_vsamp(g, &root.child(t)).expect("no isolated nodes")
            }),
        ));
    }
    out.extend(scoped(
        "pipeline",
        [check_final_residual_size(&result.trace, g.node_count(), g.edge_count(), k, seed)],
    ));

    if g.edge_count() > 0 {
        if let Ok(m) = main_iteration(g, cfg) {
            out.extend(scoped(
                "standalone",
                [
                    check_gsamp_size(g, &m.detail.vsamp, k, seed),
                    check_setaside_size(g, &m.detail.vstar, k, seed),
                    check_residual_purity(g, &m.covered, &cls, cfg.c_setaside, seed),
                ],
            ));
        }
    }

    for run in &result.runs {
        let sub = induced_subgraph(g, &run.members);
        let sub_cls = classify_nodes(&sub.graph, cfg.gamma);
        let covered = two_hop_covered(&sub.graph, &sub.localize(&run.additions));
        let scope = format!("main{}", run.run);
        out.extend(scoped(
            &scope,
            [
                check_gsamp_size(&sub.graph, &sub.localize(&run.vsamp), k, seed),
                check_setaside_size(&sub.graph, &sub.localize(&run.vstar), k, seed),
                check_residual_purity(&sub.graph, &covered, &sub_cls, cfg.c_setaside, seed),
            ],
        ));
    }
    out
}
