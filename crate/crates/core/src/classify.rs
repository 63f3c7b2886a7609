//! Good/bad node classification and the degree buckets of bad nodes.
//!
//! A node `u` of degree `d` is good when `sum_{v in N(u)} 1/sqrt(deg v) >= gamma * log2(d)`.
//! The sum is accumulated in unsigned fixed point (40 fractional bits) so the
//! result does not depend on the order neighbors are visited in; a streamed
//! edge list and a sorted adjacency list classify every node identically.

use serde::{Deserialize, Serialize};

use crate::graph::Graph;
use crate::nodeset::NodeSet;

pub const FIXED_FRAC_BITS: u32 = 40;
const FIXED_ONE: f64 = (1u64 << FIXED_FRAC_BITS) as f64;

/// `1/sqrt(deg)` in fixed point, rounded to nearest. Zero for isolated nodes.
pub fn inv_sqrt_fixed(deg: u64) -> u64 {
    if deg == 0 {
        return 0;
    }
    (FIXED_ONE / (deg as f64).sqrt()).round() as u64
}

pub fn fixed_to_f64(x: u64) -> f64 {
    x as f64 / FIXED_ONE
}

/// Index `i` with `2^i <= deg < 2^(i+1)`.
pub fn degree_bucket(deg: u64) -> u8 {
    debug_assert!(deg > 0);
    (63 - deg.leading_zeros()) as u8
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "label", rename_all = "lowercase")]
pub enum Label {
    Good,
    Bad { bucket: u8 },
}

impl Label {
    pub fn is_good(self) -> bool {
        matches!(self, Label::Good)
    }

    pub fn bad_bucket(self) -> Option<u8> {
        match self {
            Label::Good => None,
            Label::Bad { bucket } => Some(bucket),
        }
    }
}

/// The good/bad threshold `gamma * log2(deg)`.
pub fn good_threshold(deg: u64, gamma: f64) -> f64 {
    if deg <= 1 {
        0.0
    } else {
        gamma * (deg as f64).log2()
    }
}

/// Labels one node from its degree and its fixed-point neighbor sum.
pub fn label_from_sum(deg: u64, sum_fixed: u64, gamma: f64) -> Label {
    if deg == 0 || fixed_to_f64(sum_fixed) >= good_threshold(deg, gamma) {
        Label::Good
    } else {
        Label::Bad {
            bucket: degree_bucket(deg),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeClassification {
    pub labels: Vec<Label>,
}

impl NodeClassification {
    pub fn label(&self, u: usize) -> Label {
        self.labels[u]
    }

    pub fn is_good(&self, u: usize) -> bool {
        self.labels[u].is_good()
    }

    pub fn bucket(&self, u: usize) -> Option<u8> {
        self.labels[u].bad_bucket()
    }

    pub fn bad_nodes(&self) -> NodeSet {
        NodeSet::from_nodes(
            self.labels.len(),
            (0..self.labels.len()).filter(|&u| !self.is_good(u)),
        )
    }

    /// Members of the bucket `B_d` with `d = 2^bucket`.
    pub fn bucket_members(&self, bucket: u8) -> NodeSet {
        NodeSet::from_nodes(
            self.labels.len(),
            (0..self.labels.len()).filter(|&u| self.bucket(u) == Some(bucket)),
        )
    }

    pub fn max_bucket(&self) -> Option<u8> {
        self.labels.iter().filter_map(|l| l.bad_bucket()).max()
    }
}

/// Labels every node of `g`.
pub fn classify_nodes(g: &Graph, gamma: f64) -> NodeClassification {
    let weights: Vec<u64> = (0..g.node_count())
        .map(|v| inv_sqrt_fixed(g.degree(v) as u64))
        .collect();
    let labels = (0..g.node_count())
        .map(|u| {
            let sum: u64 = g.neighbors(u).iter().map(|&v| weights[v]).sum();
            label_from_sum(g.degree(u) as u64, sum, gamma)
        })
        .collect();
    NodeClassification { labels }
}

/// Minimum number of same-bucket neighbors that makes a node "heavy" for bucket
/// `b`: `c * sqrt(d) * log2(max(d, 2))^5` with `d = 2^b`.
pub fn heavy_threshold(bucket: u8, c: f64) -> f64 {
    let d = 2f64.powi(bucket as i32);
    let log = d.max(2.0).log2();
    c * d.sqrt() * log.powi(5)
}

/// Thresholds for every bucket a graph on `n` nodes can have.
pub fn heavy_thresholds(c: f64) -> Vec<f64> {
    (0..64u8).map(|b| heavy_threshold(b, c)).collect()
}

/// Bad nodes `u in B_d` with a neighbor carrying at least `heavy_threshold(d)`
/// neighbors in `B_d`.
pub fn heavy_bucket_nodes(g: &Graph, cls: &NodeClassification, c: f64) -> NodeSet {
    let thresholds = heavy_thresholds(c);
    let mut masks = vec![0u64; g.node_count()];
    let mut counts = [0u32; 64];
    for (v, mask) in masks.iter_mut().enumerate() {
        counts.fill(0);
        for &w in g.neighbors(v) {
            if let Some(b) = cls.bucket(w) {
                counts[b as usize] += 1;
            }
        }
        for (b, &cnt) in counts.iter().enumerate() {
            if cnt > 0 && cnt as f64 >= thresholds[b] {
                *mask |= 1 << b;
            }
        }
    }
    NodeSet::from_nodes(
        g.node_count(),
        (0..g.node_count()).filter(|&u| match cls.bucket(u) {
            Some(b) => g.neighbors(u).iter().any(|&v| masks[v] >> b & 1 == 1),
            None => false,
        }),
    )
}
