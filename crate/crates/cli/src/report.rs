use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

use crate::experiment::Trial;

#[derive(Serialize)]
struct TrialRow<'a> {
    trial: u64,
    seed: u64,
    graph: &'a str,
    n: usize,
    m: usize,
    max_degree: usize,
    valid: bool,
    ruling_size: usize,
    reduction_steps: usize,
    passes: Option<u64>,
    rounds: Option<u64>,
    peak_words: Option<u64>,
    peak_words_per_n: Option<f64>,
    max_gather_edges: u64,
    gather_edges_per_n: f64,
    luby_iterations: u32,
    diagnostics: usize,
    lemma_failures: Option<usize>,
}

#[derive(Serialize)]
struct AggregateRow {
    metric: &'static str,
    count: usize,
    mean: f64,
    max: f64,
}

fn per_n(x: u64, n: usize) -> f64 {
    x as f64 / n.max(1) as f64
}

fn row(t: &Trial) -> TrialRow<'_> {
    TrialRow {
        trial: t.trial,
        seed: t.seed,
        graph: &t.graph.source,
        n: t.graph.n,
        m: t.graph.m,
        max_degree: t.graph.max_degree,
        valid: t.valid,
        ruling_size: t.ruling_size,
        reduction_steps: t.reduction.len(),
        passes: t.passes(),
        rounds: t.rounds(),
        peak_words: t.peak_words(),
        peak_words_per_n: t.peak_words().map(|w| per_n(w, t.graph.n)),
        max_gather_edges: t.max_gather_edges(),
        gather_edges_per_n: per_n(t.max_gather_edges(), t.graph.n),
        luby_iterations: t.max_luby_iterations(),
        diagnostics: t.diagnostics.len(),
        lemma_failures: t.lemmas.as_ref().map(|_| t.lemma_failures()),
    }
}

fn aggregate(rows: &[TrialRow<'_>]) -> Vec<AggregateRow> {
    let metrics: [(&'static str, fn(&TrialRow<'_>) -> Option<f64>); 6] = [
        ("passes", |r| r.passes.map(|x| x as f64)),
        ("rounds", |r| r.rounds.map(|x| x as f64)),
        ("peak_words_per_n", |r| r.peak_words_per_n),
        ("gather_edges_per_n", |r| Some(r.gather_edges_per_n)),
        ("luby_iterations", |r| Some(r.luby_iterations as f64)),
        ("ruling_size", |r| Some(r.ruling_size as f64)),
    ];
    metrics
        .iter()
        .filter_map(|&(metric, get)| {
            let values: Vec<f64> = rows.iter().filter_map(get).collect();
            if values.is_empty() {
                return None;
            }
            Some(AggregateRow {
                metric,
                count: values.len(),
                mean: values.iter().sum::<f64>() / values.len() as f64,
                max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            })
        })
        .collect()
}

/// Writes `trial-NNNN.json` per trial plus `trials.csv` and `aggregate.csv`.
pub fn write_all(out: &Path, trials: &[Trial]) -> Result<()> {
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    for t in trials {
        let path = out.join(format!("trial-{:04}.json", t.trial));
        let mut bytes = serde_json::to_vec(t)?;
        bytes.push(b'\n');
        fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
    }
    let rows: Vec<TrialRow<'_>> = trials.iter().map(row).collect();
    let mut w = csv::Writer::from_path(out.join("trials.csv"))?;
    for r in &rows {
        w.serialize(r)?;
    }
    w.flush()?;
    let mut w = csv::Writer::from_path(out.join("aggregate.csv"))?;
    for r in aggregate(&rows) {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
