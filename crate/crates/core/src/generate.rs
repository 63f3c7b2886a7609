//! Seeded random graph families, described by strings such as
//! `erdos-renyi:n=4096,avg=16` or `bad-bipartite:n=65552,hubs=16,k=16`.
//! An optional `seed=` parameter fixes the generator seed.

use std::collections::HashSet;
use std::hash::{BuildHasherDefault, Hasher};
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Family {
    /// Each pair is an edge independently with probability `p`.
    ErdosRenyi { p: f64 },
    /// Uniform-ish `d`-regular graph: a circulant graph scrambled by
    /// degree-preserving edge swaps.
    DRegular { d: usize },
    /// Erased configuration model with Pareto degrees `P(deg >= x) ~ x^(1 - exponent)`.
    PowerLaw { exponent: f64, min_deg: usize },
    /// `hubs` hub nodes; every other node is joined to `k` distinct hubs.
    /// The low-degree side is bad as soon as hubs are large.
    BadBipartite { hubs: usize, k: usize },
    Matching,
    /// Disjoint stars with `leaves` leaves each; the last one may be smaller.
    StarForest { leaves: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    #[serde(flatten)]
    pub family: Family,
    pub n: usize,
    pub seed: u64,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidGenerator(msg.into())
}

impl GeneratorSpec {
    pub fn new(family: Family, n: usize, seed: u64) -> Self {
        Self { family, n, seed }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn family_name(&self) -> &'static str {
        match self.family {
            Family::ErdosRenyi { .. } => "erdos-renyi",
            Family::DRegular { .. } => "d-regular",
            Family::PowerLaw { .. } => "power-law",
            Family::BadBipartite { .. } => "bad-bipartite",
            Family::Matching => "matching",
            Family::StarForest { .. } => "star-forest",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        match self.family {
            Family::ErdosRenyi { p } if !(0.0..=1.0).contains(&p) => Err(invalid(format!("p = {p} is not a probability"))),
            Family::DRegular { d } if d >= n.max(1) => Err(invalid(format!("d = {d} needs more than {n} nodes"))),
            Family::DRegular { d } if n * d % 2 == 1 => Err(invalid(format!("n * d = {n} * {d} is odd"))),
            Family::PowerLaw { exponent, .. } if exponent <= 1.0 => Err(invalid("exponent must exceed 1")),
            Family::PowerLaw { min_deg, .. } if min_deg == 0 => Err(invalid("min_deg must be positive")),
            Family::BadBipartite { hubs, k } if k == 0 || k > hubs || hubs > n => {
                Err(invalid(format!("bad-bipartite needs 1 <= k <= hubs <= n, got k={k}, hubs={hubs}, n={n}")))
            }
            Family::Matching if n % 2 == 1 => Err(invalid(format!("a perfect matching needs even n, got {n}"))),
            Family::StarForest { leaves: 0 } => Err(invalid("leaves must be positive")),
            _ => Ok(()),
        }
    }
}

impl FromStr for GeneratorSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut params = std::collections::BTreeMap::new();
        for kv in rest.split(',').map(str::trim).filter(|kv| !kv.is_empty()) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| invalid(format!("expected key=value, got `{kv}`")))?;
            params.insert(k.trim().to_string(), v.trim().to_string());
        }
        let mut take = |key: &str| params.remove(key);
        fn num<T: FromStr>(key: &str, v: Option<String>) -> Result<Option<T>> {
            v.map(|v| v.parse::<T>().map_err(|_| invalid(format!("bad value `{v}` for `{key}`"))))
                .transpose()
        }
        let n: usize = num("n", take("n"))?.ok_or_else(|| invalid("missing `n`"))?;
        let seed: u64 = num("seed", take("seed"))?.unwrap_or(0);
        let family = match name.trim() {
            "erdos-renyi" => {
                let p: Option<f64> = num("p", take("p"))?;
                let avg: Option<f64> = num("avg", take("avg"))?;
                let p = match (p, avg) {
                    (Some(p), None) => p,
                    (None, Some(a)) => (a / (n.max(2) - 1) as f64).min(1.0),
                    _ => return Err(invalid("erdos-renyi takes exactly one of `p` or `avg`")),
                };
                Family::ErdosRenyi { p }
            }
            "d-regular" => Family::DRegular {
                d: num("d", take("d"))?.ok_or_else(|| invalid("missing `d`"))?,
            },
            "power-law" => Family::PowerLaw {
                exponent: num("exponent", take("exponent"))?.unwrap_or(2.5),
                min_deg: num("min_deg", take("min_deg"))?.unwrap_or(2),
            },
            "bad-bipartite" => {
                let hubs = num("hubs", take("hubs"))?.unwrap_or(16);
                Family::BadBipartite {
                    hubs,
                    k: num("k", take("k"))?.unwrap_or(hubs),
                }
            }
            "matching" => Family::Matching,
            "star-forest" => Family::StarForest {
                leaves: num("leaves", take("leaves"))?.unwrap_or(8),
            },
            other => return Err(invalid(format!("unknown family `{other}`"))),
        };
        if let Some(k) = params.keys().next() {
            return Err(invalid(format!("unknown parameter `{k}` for {name}")));
        }
        let spec = GeneratorSpec { family, n, seed };
        spec.validate()?;
        Ok(spec)
    }
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:n={}", self.family_name(), self.n)?;
        match self.family {
            Family::ErdosRenyi { p } => write!(f, ",p={p}")?,
            Family::DRegular { d } => write!(f, ",d={d}")?,
            Family::PowerLaw { exponent, min_deg } => write!(f, ",exponent={exponent},min_deg={min_deg}")?,
            Family::BadBipartite { hubs, k } => write!(f, ",hubs={hubs},k={k}")?,
            Family::Matching => {}
            Family::StarForest { leaves } => write!(f, ",leaves={leaves}")?,
        }
        write!(f, ",seed={}", self.seed)
    }
}

pub fn generate(spec: &GeneratorSpec) -> Result<Graph> {
    spec.validate()?;
    let n = spec.n;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let edges = match spec.family {
        Family::ErdosRenyi { p } => erdos_renyi(n, p, &mut rng),
        Family::DRegular { d } => d_regular(n, d, &mut rng),
        Family::PowerLaw { exponent, min_deg } => power_law(n, exponent, min_deg, &mut rng),
        Family::BadBipartite { hubs, k } => {
            let mut pool: Vec<usize> = (0..hubs).collect();
            let mut edges = Vec::with_capacity((n - hubs) * k);
            for u in hubs..n {
                let (chosen, _) = pool.partial_shuffle(&mut rng, k);
                edges.extend(chosen.iter().map(|&h| (h, u)));
            }
            edges
        }
        Family::Matching => {
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut rng);
            perm.chunks(2).map(|c| (c[0], c[1])).collect()
        }
        Family::StarForest { leaves } => {
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut rng);
            perm.chunks(leaves + 1)
                .flat_map(|c| c[1..].iter().map(move |&l| (c[0], l)))
                .collect()
        }
    };
    Graph::from_edges(n, edges)
}

/// Skips over non-edges geometrically, so the cost is linear in `n + m`.
fn erdos_renyi(n: usize, p: f64, rng: &mut impl Rng) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    if p <= 0.0 || n < 2 {
        return edges;
    }
    if p >= 1.0 {
        return (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    }
    let log_q = (1.0 - p).ln();
    let (mut v, mut w) = (1usize, -1i64);
    while v < n {
        let r: f64 = rng.random();
        w += 1 + ((1.0 - r).ln() / log_q).floor() as i64;
        while w >= v as i64 && v < n {
            w -= v as i64;
            v += 1;
        }
        if v < n {
            edges.push((w as usize, v));
        }
    }
    edges
}

fn d_regular(n: usize, d: usize, rng: &mut impl Rng) -> Vec<(usize, usize)> {
    let mut edges: Vec<(usize, usize)> = Vec::with_capacity(n * d / 2);
    for u in 0..n {
        for s in 1..=d / 2 {
            edges.push((u, (u + s) % n));
        }
        if d % 2 == 1 && u < n / 2 {
            edges.push((u, u + n / 2));
        }
    }
    if d + 1 == n {
        return edges;
    }
    let key = |a: usize, b: usize| (a.min(b) as u64) << 32 | a.max(b) as u64;
    let mut present: HashSet<u64, BuildHasherDefault<EdgeKeyHasher>> = edges.iter().map(|&(a, b)| key(a, b)).collect();
    let m = edges.len();
    for _ in 0..m {
        let i = rng.random_range(0..m);
        let j = rng.random_range(0..m);
        let (a, b) = edges[i];
        let (c, e) = edges[j];
        let (c, e) = if rng.random::<bool>() { (c, e) } else { (e, c) };
        // (a,b),(c,e) -> (a,c),(b,e)
        if a == c || b == e || a == e || b == c {
            continue;
        }
        if present.contains(&key(a, c)) || present.contains(&key(b, e)) {
            continue;
        }
        present.remove(&key(a, b));
        present.remove(&key(c, e));
        present.insert(key(a, c));
        present.insert(key(b, e));
        edges[i] = (a, c);
        edges[j] = (b, e);
    }
    edges
}

/// Edge keys are already well spread; one multiply is enough mixing.
#[derive(Default)]
struct EdgeKeyHasher(u64);

impl Hasher for EdgeKeyHasher {
    fn finish(&self) -> u64 {
        self.0
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 = (self.0 ^ b as u64).wrapping_mul(0x100_0000_01b3);
        }
    }

    fn write_u64(&mut self, x: u64) {
        self.0 = (x ^ x >> 29).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    }
}

fn power_law(n: usize, exponent: f64, min_deg: usize, rng: &mut impl Rng) -> Vec<(usize, usize)> {
    let cap = n.saturating_sub(1).max(1) as f64;
    let mut stubs = Vec::new();
    for u in 0..n {
        let x: f64 = 1.0 - rng.random::<f64>();
        let deg = (min_deg as f64 * x.powf(-1.0 / (exponent - 1.0))).floor().min(cap) as usize;
        stubs.extend(std::iter::repeat_n(u, deg));
    }
    stubs.shuffle(rng);
    stubs.chunks_exact(2).map(|c| (c[0], c[1])).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::classify_nodes;

    fn gen(s: &str) -> Graph {
        generate(&s.parse().unwrap()).unwrap()
    }

    #[test]
    fn matching_is_disjoint_edges() {
        let g = gen("matching:n=8");
        assert_eq!(g.edge_count(), 4);
        assert!((0..8).all(|u| g.degree(u) == 1));
    }

    #[test]
    fn complete_regular_case() {
        let g = gen("d-regular:n=8,d=7");
        assert_eq!(g.edge_count(), 28);
    }

    #[test]
    fn regular_degrees_hold_after_swaps() {
        for (n, d) in [(100, 4), (101, 6), (64, 7), (500, 16)] {
            let g = gen(&format!("d-regular:n={n},d={d},seed=3"));
            assert!((0..n).all(|u| g.degree(u) == d), "n={n} d={d}");
        }
    }

    #[test]
    fn infeasible_parameters_rejected() {
        assert!("d-regular:n=7,d=3".parse::<GeneratorSpec>().is_err());
        assert!("d-regular:n=4,d=4".parse::<GeneratorSpec>().is_err());
        assert!("matching:n=7".parse::<GeneratorSpec>().is_err());
        assert!("erdos-renyi:n=10,p=2".parse::<GeneratorSpec>().is_err());
        assert!("erdos-renyi:n=10,q=2".parse::<GeneratorSpec>().is_err());
        assert!("torus:n=10".parse::<GeneratorSpec>().is_err());
    }

    #[test]
    fn erdos_renyi_density() {
        let g = gen("erdos-renyi:n=2000,avg=10,seed=1");
        let avg = 2.0 * g.edge_count() as f64 / 2000.0;
        assert!((avg - 10.0).abs() < 0.5, "avg {avg}");
        assert_eq!(gen("erdos-renyi:n=6,p=1").edge_count(), 15);
    }

    #[test]
    fn deterministic_in_seed() {
        let a = gen("power-law:n=500,exponent=2.2,seed=9");
        let b = gen("power-law:n=500,exponent=2.2,seed=9");
        assert_eq!(a, b);
        assert_ne!(a, gen("power-law:n=500,exponent=2.2,seed=10"));
    }

    #[test]
    fn display_round_trips() {
        let s: GeneratorSpec = "bad-bipartite:n=100,hubs=8,k=4,seed=2".parse().unwrap();
        assert_eq!(s.to_string().parse::<GeneratorSpec>().unwrap(), s);
    }

    #[test]
    fn star_forest_shape() {
        let g = gen("star-forest:n=20,leaves=4");
        assert_eq!(g.edge_count(), 16);
        assert_eq!(g.max_degree(), 4);
    }

    #[test]
    fn bipartite_low_side_is_bad() {
        let g = gen("bad-bipartite:n=4112,hubs=16,k=16");
        let cls = classify_nodes(&g, 1.0);
        assert!((16..4112).all(|u| cls.bucket(u) == Some(4)));
        assert!((0..16).all(|u| cls.is_good(u)));
    }
}
