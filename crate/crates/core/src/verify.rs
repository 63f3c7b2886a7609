//! Independent checks. Nothing here calls the MIS or pipeline code: every
//! check recomputes what it needs from a graph and node sets.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::classify::{Label, NodeClassification};
use crate::graph::Graph;
use crate::nodeset::NodeSet;
use crate::ruling::PhaseTrace;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// Two members of the set are adjacent.
    Adjacent { u: usize, v: usize },
    /// A node farther than `beta` hops from the set.
    Uncovered { node: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RulingCheck {
    pub valid: bool,
    pub violation: Option<Violation>,
}

/// Is `s` independent in `g` with every node within `beta` hops of it?
pub fn verify_ruling_set(g: &Graph, s: &NodeSet, beta: usize) -> RulingCheck {
    assert!(beta >= 1, "beta must be at least 1");
    let fail = |violation| RulingCheck {
        valid: false,
        violation: Some(violation),
    };
    for u in s.iter() {
        if let Some(&v) = g.neighbors(u).iter().find(|&&v| s.contains(v)) {
            return fail(Violation::Adjacent { u: u.min(v), v: u.max(v) });
        }
    }
    let mut dist = vec![usize::MAX; g.node_count()];
    let mut queue: VecDeque<usize> = s.iter().collect();
    for u in s.iter() {
        dist[u] = 0;
    }
    while let Some(u) = queue.pop_front() {
        if dist[u] == beta {
            continue;
        }
        for &v in g.neighbors(u) {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    match dist.iter().position(|&d| d == usize::MAX) {
        Some(node) => fail(Violation::Uncovered { node }),
        None => RulingCheck {
            valid: true,
            violation: None,
        },
    }
}

/// Independent, and no node outside `mis` could be added.
pub fn mis_oracle_check(g: &Graph, mis: &NodeSet) -> bool {
    (0..g.node_count()).all(|u| {
        let hit = g.neighbors(u).iter().any(|&v| mis.contains(v));
        mis.contains(u) != hit
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Vacuous,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub lemma: String,
    pub d: Option<u64>,
    pub measured: f64,
    pub bound: f64,
    pub status: Status,
    pub seed: u64,
}

impl LemmaReport {
    /// `measured <= bound`, vacuous when the bound is at least `trivial_max`.
    fn at_most(lemma: &str, d: Option<u64>, measured: f64, bound: f64, trivial_max: f64, seed: u64) -> Self {
        let status = if measured > bound {
            Status::Fail
        } else if bound >= trivial_max {
            Status::Vacuous
        } else {
            Status::Pass
        };
        Self {
            lemma: lemma.to_string(),
            d,
            measured,
            bound,
            status,
            seed,
        }
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

fn induced_edges(g: &Graph, s: &NodeSet) -> usize {
    s.iter()
        .map(|u| g.neighbors(u).iter().filter(|&&v| v > u && s.contains(v)).count())
        .sum()
}

/// Edges of `G[vsamp]` against `k * n`.
pub fn check_gsamp_size(g: &Graph, vsamp: &NodeSet, k: f64, seed: u64) -> LemmaReport {
    let n = g.node_count() as f64;
    let m = g.edge_count() as f64;
    LemmaReport::at_most("gsamp-size", None, induced_edges(g, vsamp) as f64, k * n, m.max(1.0), seed)
}

/// Edges of `G[vstar]` against `k * n`.
pub fn check_setaside_size(g: &Graph, vstar: &NodeSet, k: f64, seed: u64) -> LemmaReport {
    let n = g.node_count() as f64;
    let m = g.edge_count() as f64;
    LemmaReport::at_most("setaside-size", None, induced_edges(g, vstar) as f64, k * n, m.max(1.0), seed)
}

/// Edges of the final uncovered subgraph, read off the `final` trace entry.
pub fn check_final_residual_size(trace: &[PhaseTrace], n: usize, m: usize, k: f64, seed: u64) -> LemmaReport {
    let edges = trace
        .iter()
        .find(|t| t.phase == "final")
        .map_or(0, |t| t.sub_edges);
    LemmaReport::at_most("final-residual-size", None, edges as f64, k * n as f64, (m as f64).max(1.0), seed)
}

fn log2_clamped(d: f64) -> f64 {
    d.max(2.0).log2()
}

/// The set-aside threshold, recomputed here.
fn heavy_count(d: f64, c: f64) -> f64 {
    c * d.sqrt() * log2_clamped(d).powi(5)
}

/// Bad nodes of bucket `d` with a neighbor carrying at least the heavy count of
/// bucket-`d` neighbors.
fn heavy_nodes(g: &Graph, cls: &NodeClassification, c: f64) -> NodeSet {
    let n = g.node_count();
    let mut out = NodeSet::new(n);
    for v in 0..n {
        let mut per_bucket: BTreeMap<u8, usize> = BTreeMap::new();
        for &w in g.neighbors(v) {
            if let Label::Bad { bucket } = cls.label(w) {
                *per_bucket.entry(bucket).or_default() += 1;
            }
        }
        for (&b, &cnt) in &per_bucket {
            if cnt as f64 >= heavy_count(2f64.powi(b as i32), c) {
                for &w in g.neighbors(v) {
                    if cls.bucket(w) == Some(b) {
                        out.insert(w);
                    }
                }
            }
        }
    }
    out
}

/// Smallest degree a neighbor must have to count as "high" for a bad node of
/// degree `deg`: `deg^2 / (4 gamma^2 log2(deg)^2)`.
fn high_degree_cutoff(deg: f64, gamma: f64) -> f64 {
    let l = deg.log2();
    deg * deg / (4.0 * gamma * gamma * l * l)
}

/// For each bucket `d = 2^b >= d_min`: `|B_d|` minus its heavy part, against
/// `2 c |V_{>= d'}| log2(d)^5 / sqrt(d)`, where `d'` is the smallest high-degree
/// cutoff over degrees in `[d, 2d)`.
pub fn check_bad_bucket_bound(
    g: &Graph,
    cls: &NodeClassification,
    gamma: f64,
    c: f64,
    d_min: usize,
    seed: u64,
) -> Vec<LemmaReport> {
    let heavy = heavy_nodes(g, cls, c);
    let max_b = match cls.max_bucket() {
        Some(b) => b,
        None => return Vec::new(),
    };
    let mut degrees: Vec<usize> = g.degrees();
    degrees.sort_unstable();
    let mut reports = Vec::new();
    for b in 1..=max_b {
        let d = 1u64 << b;
        if (d as usize) < d_min {
            continue;
        }
        let bucket = cls.bucket_members(b);
        let light = bucket.difference(&heavy).len();
        // the cutoff grows with the degree from 8 on
        let cutoff = (d..(2 * d).min(8).max(d + 1))
            .map(|deg| high_degree_cutoff(deg as f64, gamma))
            .fold(f64::INFINITY, f64::min);
        let above = degrees.len() - degrees.partition_point(|&x| (x as f64) < cutoff);
        let df = d as f64;
        let bound = 2.0 * c * above as f64 * df.log2().powi(5) / df.sqrt();
        reports.push(LemmaReport::at_most(
            "bad-bucket-bound",
            Some(d),
            light as f64,
            bound,
            bucket.len() as f64,
            seed,
        ));
    }
    reports
}

/// Every node outside `covered` must be bad and not heavy. `measured` is the
/// number of offenders.
pub fn check_residual_purity(
    g: &Graph,
    covered: &NodeSet,
    cls: &NodeClassification,
    c: f64,
    seed: u64,
) -> LemmaReport {
    let uncovered = covered.complement();
    let heavy = heavy_nodes(g, cls, c);
    let offenders = uncovered
        .iter()
        .filter(|&u| cls.is_good(u) || heavy.contains(u))
        .count();
    let status = if offenders > 0 {
        Status::Fail
    } else if uncovered.is_empty() {
        Status::Vacuous
    } else {
        Status::Pass
    };
    LemmaReport {
        lemma: "residual-purity".into(),
        d: None,
        measured: offenders as f64,
        bound: 0.0,
        status,
        seed,
    }
}

/// 95% Wilson score interval for `hits` successes out of `trials`.
pub fn wilson_interval(hits: u64, trials: u64) -> (f64, f64) {
    const Z: f64 = 1.959_963_984_540_054;
    if trials == 0 {
        return (0.0, 1.0);
    }
    let nt = trials as f64;
    let p = hits as f64 / nt;
    let z2 = Z * Z;
    let denom = 1.0 + z2 / nt;
    let center = (p + z2 / (2.0 * nt)) / denom;
    let half = Z * (p * (1.0 - p) / nt + z2 / (4.0 * nt * nt)).sqrt() / denom;
    let lo = if hits == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if hits == trials { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

/// For each degree `d >= d_min` among good nodes: how often a good node of
/// degree `d` had no sampled neighbor, over `trials` samples drawn by
/// `sampler(trial)`. The bound is `d^(-gamma/2)` widened by the lower half of
/// the 95% Wilson interval around the measured rate.
pub fn check_good_coverage_rate<F>(
    g: &Graph,
    cls: &NodeClassification,
    gamma: f64,
    d_min: usize,
    trials: u64,
    seed: u64,
    mut sampler: F,
) -> Vec<LemmaReport>
where
    F: FnMut(u64) -> NodeSet,
{
    let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for u in 0..g.node_count() {
        let d = g.degree(u);
        if d >= d_min.max(1) && cls.is_good(u) {
            classes.entry(d).or_default().push(u);
        }
    }
    let mut hits: BTreeMap<usize, u64> = BTreeMap::new();
    for t in 0..trials {
        let sample = sampler(t);
        for (&d, members) in &classes {
            let misses = members
                .iter()
                .filter(|&&u| g.neighbors(u).iter().all(|&v| !sample.contains(v)))
                .count() as u64;
            *hits.entry(d).or_default() += misses;
        }
    }
    classes
        .iter()
        .map(|(&d, members)| {
            let node_trials = members.len() as u64 * trials;
            let h = hits[&d];
            let rate = h as f64 / node_trials.max(1) as f64;
            let (lo, _) = wilson_interval(h, node_trials);
            let bound = (d as f64).powf(-gamma / 2.0) + (rate - lo);
            LemmaReport::at_most("good-coverage-rate", Some(d as u64), rate, bound, 1.0, seed)
        })
        .collect()
}

/// Every bad node `u` of degree `d >= d_min` has at least `ceil(d/2)`
/// neighbors of degree at least `d^2 / (4 gamma^2 log2(d)^2)`. `measured` is
/// the number of bad nodes that do not.
pub fn check_bad_inc_lower(g: &Graph, cls: &NodeClassification, gamma: f64, d_min: usize) -> LemmaReport {
    let mut checked = 0usize;
    let offenders = (0..g.node_count())
        .filter(|&u| !cls.is_good(u) && g.degree(u) >= d_min.max(2))
        .inspect(|_| checked += 1)
        .filter(|&u| {
            let d = g.degree(u);
            let cutoff = high_degree_cutoff(d as f64, gamma);
            let high = g
                .neighbors(u)
                .iter()
                .filter(|&&v| g.degree(v) as f64 >= cutoff)
                .count();
            high < d.div_ceil(2)
        })
        .count();
    LemmaReport {
        lemma: "bad-inc-lower".into(),
        d: None,
        measured: offenders as f64,
        bound: 0.0,
        status: match (offenders, checked) {
            (0, 0) => Status::Vacuous,
            (0, _) => Status::Pass,
            _ => Status::Fail,
        },
        seed: 0,
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LabelStability {
    /// Nodes whose label differs between the fixed-point classification and a
    /// floating-point sum in ascending or descending neighbor order.
    pub flipped: Vec<usize>,
    /// Nodes whose floating-point sum lies within `1e-9` of the threshold.
    pub near_threshold: Vec<usize>,
}

/// Recomputes every label in `f64` with the neighbor terms summed in ascending
/// and in descending order and compares with `cls`.
pub fn label_stability(g: &Graph, cls: &NodeClassification, gamma: f64) -> LabelStability {
    let mut out = LabelStability::default();
    let mut terms = Vec::new();
    for u in 0..g.node_count() {
        let d = g.degree(u);
        if d <= 1 {
            continue;
        }
        let threshold = gamma * (d as f64).log2();
        terms.clear();
        terms.extend(g.neighbors(u).iter().map(|&v| 1.0 / (g.degree(v) as f64).sqrt()));
        terms.sort_by(f64::total_cmp);
        let up: f64 = terms.iter().sum();
        let down: f64 = terms.iter().rev().sum();
        let good = cls.is_good(u);
        if (up >= threshold) != good || (down >= threshold) != good {
            out.flipped.push(u);
        }
        if (up - threshold).abs() <= 1e-9 || (down - threshold).abs() <= 1e-9 {
            out.near_threshold.push(u);
        }
    }
    out
}
