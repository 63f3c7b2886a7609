//! Python bindings: graphs, generators, the ruling-set pipeline, both model
//! harnesses and the verifiers.

use std::path::PathBuf;

use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyAny;

use rulingset::harness::stream::{FileStream, MemoryStream};
use rulingset::{AlgoConfig, Error, NodeSet, RulingSetResult};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io { .. } => PyOSError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn json_to_py<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn node_set(g: &rulingset::Graph, nodes: Vec<usize>) -> PyResult<NodeSet> {
    let n = g.node_count();
    if let Some(&u) = nodes.iter().find(|&&u| u >= n) {
        return Err(PyValueError::new_err(format!("node id {u} out of range for graph with {n} nodes")));
    }
    Ok(NodeSet::from_nodes(n, nodes))
}

/// Undirected simple graph on nodes `0..n`.
#[pyclass(module = "rulingset_py", frozen)]
struct Graph {
    inner: rulingset::Graph,
}

#[pymethods]
impl Graph {
    /// Self-loops are dropped and parallel edges merged.
    #[new]
    fn new(n: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        Ok(Self {
            inner: rulingset::Graph::from_edges(n, edges).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn read_edge_list(path: PathBuf) -> PyResult<Self> {
        Ok(Self {
            inner: rulingset::read_edge_list(&path).map_err(to_py)?,
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.node_count()
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.edge_count()
    }

    #[getter]
    fn max_degree(&self) -> usize {
        self.inner.max_degree()
    }

    fn degree(&self, u: usize) -> PyResult<usize> {
        self.check(u)?;
        Ok(self.inner.degree(u))
    }

    fn neighbors(&self, u: usize) -> PyResult<Vec<usize>> {
        self.check(u)?;
        Ok(self.inner.neighbors(u).to_vec())
    }

    /// Each edge once, as `(u, v)` with `u < v`.
    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.edges().collect()
    }

    fn __repr__(&self) -> String {
        format!("Graph(n={}, m={})", self.inner.node_count(), self.inner.edge_count())
    }
}

impl Graph {
    fn check(&self, u: usize) -> PyResult<()> {
        if u >= self.inner.node_count() {
            return Err(PyValueError::new_err(format!("node {u} out of range")));
        }
        Ok(())
    }
}

/// Pipeline constants. Keyword names follow the JSON config file.
#[pyclass(module = "rulingset_py", frozen)]
struct Config {
    inner: AlgoConfig,
}

#[pymethods]
impl Config {
    #[new]
    #[pyo3(signature = (*, gamma=None, c=None, alpha=None, seed=None, budget_K=None, d_min=None))]
    #[allow(non_snake_case)]
    fn new(
        gamma: Option<f64>,
        c: Option<f64>,
        alpha: Option<f64>,
        seed: Option<u64>,
        budget_K: Option<f64>,
        d_min: Option<usize>,
    ) -> PyResult<Self> {
        let d = AlgoConfig::default();
        let inner = AlgoConfig {
            gamma: gamma.unwrap_or(d.gamma),
            c_setaside: c.unwrap_or(d.c_setaside),
            alpha: alpha.unwrap_or(d.alpha),
            seed: seed.unwrap_or(d.seed),
            budget_k: budget_K.unwrap_or(d.budget_k),
            d_min: d_min.unwrap_or(d.d_min),
        };
        inner.validate().map_err(to_py)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: AlgoConfig::from_json(text).map_err(to_py)?,
        })
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner).expect("config serializes")
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }

    fn __repr__(&self) -> String {
        format!("Config({})", self.to_json())
    }
}

fn config_or_default(config: Option<&Config>, seed: Option<u64>) -> AlgoConfig {
    let cfg = config.map(|c| c.inner.clone()).unwrap_or_default();
    match seed {
        Some(s) => cfg.with_seed(s),
        None => cfg,
    }
}

/// Output of one pipeline run.
#[pyclass(module = "rulingset_py", frozen)]
struct RulingSet {
    inner: RulingSetResult,
}

#[pymethods]
impl RulingSet {
    #[getter]
    fn ruling(&self) -> Vec<usize> {
        self.inner.ruling.to_vec()
    }

    /// `(ruler, distance)` per node.
    #[getter]
    fn coverage_witness(&self) -> Vec<(usize, u8)> {
        self.inner.coverage_witness.iter().map(|w| (w.ruler, w.distance)).collect()
    }

    #[getter]
    fn trace<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        json_to_py(py, &self.inner.trace)
    }

    #[getter]
    fn diagnostics<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        json_to_py(py, &self.inner.diagnostics)
    }

    #[getter]
    fn reduction<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        json_to_py(py, &self.inner.reduction)
    }

    #[getter]
    fn max_luby_iterations(&self) -> u32 {
        self.inner.max_luby_iterations()
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner).expect("result serializes")
    }

    fn __len__(&self) -> usize {
        self.inner.ruling.len()
    }

    fn __repr__(&self) -> String {
        format!("RulingSet(size={}, phases={})", self.inner.ruling.len(), self.inner.trace.len())
    }
}

/// `spec` uses the CLI syntax, e.g. `"erdos-renyi:n=1000,avg=8"`.
#[pyfunction]
#[pyo3(signature = (spec, seed=None))]
fn generate(spec: &str, seed: Option<u64>) -> PyResult<Graph> {
    let mut spec: rulingset::GeneratorSpec = spec.parse().map_err(to_py)?;
    if let Some(s) = seed {
        spec = spec.with_seed(s);
    }
    Ok(Graph {
        inner: rulingset::generate(&spec).map_err(to_py)?,
    })
}

#[pyfunction]
#[pyo3(signature = (graph, config=None, seed=None))]
fn parallel_two_ruling_set(py: Python<'_>, graph: &Graph, config: Option<&Config>, seed: Option<u64>) -> PyResult<RulingSet> {
    let cfg = config_or_default(config, seed);
    let inner = py
        .detach(|| rulingset::parallel_two_ruling_set(&graph.inner, &cfg))
        .map_err(to_py)?;
    Ok(RulingSet { inner })
}

/// Runs the pipeline as a multi-pass stream over the edges of `graph`, or of
/// the edge-list file `path`. Returns the result and the pass account.
#[pyfunction]
#[pyo3(signature = (graph=None, config=None, seed=None, path=None, shuffle_seed=None))]
fn run_streaming<'py>(
    py: Python<'py>,
    graph: Option<&Graph>,
    config: Option<&Config>,
    seed: Option<u64>,
    path: Option<PathBuf>,
    shuffle_seed: Option<u64>,
) -> PyResult<(RulingSet, Bound<'py, PyAny>)> {
    let cfg = config_or_default(config, seed);
    let (result, account) = match (graph, path) {
        (Some(g), None) => py.detach(|| match shuffle_seed {
            Some(s) => rulingset::run_streaming(&mut MemoryStream::shuffled(&g.inner, s), &cfg),
            None => rulingset::run_streaming(&mut MemoryStream::new(&g.inner), &cfg),
        }),
        (None, Some(p)) => py.detach(|| rulingset::run_streaming(&mut FileStream::open(&p)?, &cfg)),
        _ => return Err(PyValueError::new_err("pass exactly one of graph or path")),
    }
    .map_err(to_py)?;
    Ok((RulingSet { inner: result }, json_to_py(py, &account.to_json())?))
}

/// Runs the pipeline with Congested Clique round accounting.
#[pyfunction]
#[pyo3(signature = (graph, config=None, seed=None))]
fn run_congested_clique<'py>(
    py: Python<'py>,
    graph: &Graph,
    config: Option<&Config>,
    seed: Option<u64>,
) -> PyResult<(RulingSet, Bound<'py, PyAny>)> {
    let cfg = config_or_default(config, seed);
    let (result, account) = py
        .detach(|| rulingset::run_congested_clique(&graph.inner, &cfg))
        .map_err(to_py)?;
    Ok((RulingSet { inner: result }, json_to_py(py, &account.to_json())?))
}

/// `(valid, violation)` where `violation` is `None` or a dict naming the
/// adjacent pair or the uncovered node.
#[pyfunction]
#[pyo3(signature = (graph, nodes, beta=2))]
fn verify_ruling_set<'py>(
    py: Python<'py>,
    graph: &Graph,
    nodes: Vec<usize>,
    beta: usize,
) -> PyResult<(bool, Bound<'py, PyAny>)> {
    if beta == 0 {
        return Err(PyValueError::new_err("beta must be at least 1"));
    }
    let set = node_set(&graph.inner, nodes)?;
    let check = rulingset::verify_ruling_set(&graph.inner, &set, beta);
    Ok((check.valid, json_to_py(py, &check.violation)?))
}

/// Is `nodes` a maximal independent set of `graph`?
#[pyfunction]
fn is_maximal_independent_set(graph: &Graph, nodes: Vec<usize>) -> PyResult<bool> {
    let set = node_set(&graph.inner, nodes)?;
    Ok(rulingset::mis_oracle_check(&graph.inner, &set))
}

#[pymodule]
fn rulingset_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Graph>()?;
    m.add_class::<Config>()?;
    m.add_class::<RulingSet>()?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(parallel_two_ruling_set, m)?)?;
    m.add_function(wrap_pyfunction!(run_streaming, m)?)?;
    m.add_function(wrap_pyfunction!(run_congested_clique, m)?)?;
    m.add_function(wrap_pyfunction!(verify_ruling_set, m)?)?;
    m.add_function(wrap_pyfunction!(is_maximal_independent_set, m)?)?;
    Ok(())
}
