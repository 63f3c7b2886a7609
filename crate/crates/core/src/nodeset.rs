//! Fixed-universe node sets backed by a bitset.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A subset of `[0, universe)` with O(1) membership and a cached cardinality.
#[derive(Clone, PartialEq, Eq)]
pub struct NodeSet {
    words: Vec<u64>,
    universe: usize,
    len: usize,
}

impl NodeSet {
    pub fn new(universe: usize) -> Self {
        Self {
            words: vec![0; universe.div_ceil(64)],
            universe,
            len: 0,
        }
    }

    pub fn full(universe: usize) -> Self {
        let mut set = Self::new(universe);
        for w in set.words.iter_mut() {
            *w = u64::MAX;
        }
        if universe % 64 != 0 {
            if let Some(last) = set.words.last_mut() {
                *last = (1u64 << (universe % 64)) - 1;
            }
        }
        set.len = universe;
        set
    }

    /// Builds a set from node ids; panics if an id is outside the universe.
    pub fn from_nodes<I: IntoIterator<Item = usize>>(universe: usize, nodes: I) -> Self {
        let mut set = Self::new(universe);
        for u in nodes {
            set.insert(u);
        }
        set
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn contains(&self, u: usize) -> bool {
        u < self.universe && self.words[u >> 6] & (1u64 << (u & 63)) != 0
    }

    /// Returns true if `u` was not already present.
    #[inline]
    pub fn insert(&mut self, u: usize) -> bool {
        assert!(u < self.universe, "node {u} outside universe {}", self.universe);
        let word = &mut self.words[u >> 6];
        let bit = 1u64 << (u & 63);
        let fresh = *word & bit == 0;
        *word |= bit;
        self.len += fresh as usize;
        fresh
    }

    /// Returns true if `u` was present.
    #[inline]
    pub fn remove(&mut self, u: usize) -> bool {
        if u >= self.universe {
            return false;
        }
        let word = &mut self.words[u >> 6];
        let bit = 1u64 << (u & 63);
        let present = *word & bit != 0;
        *word &= !bit;
        self.len -= present as usize;
        present
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let bit = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + bit)
            })
        })
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    fn assert_same_universe(&self, other: &NodeSet) {
        assert_eq!(self.universe, other.universe, "node sets over different universes");
    }

    fn recount(&mut self) {
        self.len = self.words.iter().map(|w| w.count_ones() as usize).sum();
    }

    pub fn union_with(&mut self, other: &NodeSet) {
        self.assert_same_universe(other);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= *b;
        }
        self.recount();
    }

    pub fn intersect_with(&mut self, other: &NodeSet) {
        self.assert_same_universe(other);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= *b;
        }
        self.recount();
    }

    pub fn difference_with(&mut self, other: &NodeSet) {
        self.assert_same_universe(other);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !*b;
        }
        self.recount();
    }

    pub fn union(&self, other: &NodeSet) -> NodeSet {
        let mut out = self.clone();
        out.union_with(other);
        out
    }

    pub fn intersection(&self, other: &NodeSet) -> NodeSet {
        let mut out = self.clone();
        out.intersect_with(other);
        out
    }

    pub fn difference(&self, other: &NodeSet) -> NodeSet {
        let mut out = self.clone();
        out.difference_with(other);
        out
    }

    /// Complement within the universe.
    pub fn complement(&self) -> NodeSet {
        NodeSet::full(self.universe).difference(self)
    }

    pub fn is_subset(&self, other: &NodeSet) -> bool {
        self.assert_same_universe(other);
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &NodeSet) -> bool {
        self.assert_same_universe(other);
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }
}

impl std::fmt::Debug for NodeSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Serialized as `{"universe": n, "nodes": [..]}` with ascending ids.
impl Serialize for NodeSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            universe: usize,
            nodes: Vec<usize>,
        }
        Repr {
            universe: self.universe,
            nodes: self.to_vec(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for NodeSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            universe: usize,
            nodes: Vec<usize>,
        }
        let repr = Repr::deserialize(deserializer)?;
        if let Some(&bad) = repr.nodes.iter().find(|&&u| u >= repr.universe) {
            return Err(serde::de::Error::custom(format!(
                "node {bad} outside universe {}",
                repr.universe
            )));
        }
        Ok(NodeSet::from_nodes(repr.universe, repr.nodes))
    }
}
