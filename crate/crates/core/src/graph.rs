//! Immutable undirected simple graphs in CSR form, plus the distance utilities
//! shared by the pipeline and the verifiers.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::{Error, Result};
use crate::nodeset::NodeSet;

/// Undirected simple graph. Neighbor lists are sorted ascending, symmetric,
/// and free of self-loops and duplicates.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<usize>,
}

impl Graph {
    /// Builds a graph on `n` nodes from an arbitrary edge list. Pairs are
    /// symmetrized and deduplicated; self-loops are dropped.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Graph>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut pairs = Vec::new();
        for (u, v) in edges {
            for node in [u, v] {
                if node >= n {
                    return Err(Error::NodeOutOfRange { node, n });
                }
            }
            if u != v {
                pairs.push((u, v));
            }
        }
        // bucket both directions by source, then sort and dedup each list
        let mut offsets = vec![0usize; n + 1];
        for &(u, v) in &pairs {
            offsets[u + 1] += 1;
            offsets[v + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut fill = offsets.clone();
        let mut targets = vec![0usize; offsets[n]];
        for &(u, v) in &pairs {
            targets[fill[u]] = v;
            fill[u] += 1;
            targets[fill[v]] = u;
            fill[v] += 1;
        }
        drop(pairs);
        let mut write = 0;
        let mut start = 0;
        for u in 0..n {
            let end = offsets[u + 1];
            let list = &mut targets[start..end];
            list.sort_unstable();
            let mut last = usize::MAX;
            let begin = write;
            for i in start..end {
                let v = targets[i];
                if v != last {
                    targets[write] = v;
                    write += 1;
                    last = v;
                }
            }
            offsets[u] = begin;
            start = end;
        }
        offsets[n] = write;
        targets.truncate(write);
        Ok(Graph { offsets, targets })
    }

    pub fn empty(n: usize) -> Graph {
        Graph {
            offsets: vec![0; n + 1],
            targets: Vec::new(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    #[inline]
    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.targets[self.offsets[u]..self.offsets[u + 1]]
    }

    #[inline]
    pub fn degree(&self, u: usize) -> usize {
        self.offsets[u + 1] - self.offsets[u]
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.node_count()).map(|u| self.degree(u)).collect()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.node_count()).map(|u| self.degree(u)).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.node_count() && self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.node_count()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .filter(move |&&v| u < v)
                .map(move |&v| (u, v))
        })
    }

    pub fn all_nodes(&self) -> NodeSet {
        NodeSet::full(self.node_count())
    }
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.node_count())
            .field("m", &self.edge_count())
            .finish()
    }
}

/// Alias kept for callers that think in terms of the operation rather than the constructor.
pub fn build_graph<I>(n: usize, edges: I) -> Result<Graph>
where
    I: IntoIterator<Item = (usize, usize)>,
{
    Graph::from_edges(n, edges)
}

/// Induced subgraph together with the table mapping local ids back to parent ids.
#[derive(Clone, Debug)]
pub struct Induced {
    pub graph: Graph,
    /// `to_parent[local]` is the parent id; strictly increasing.
    pub to_parent: Vec<usize>,
}

impl Induced {
    pub fn to_local(&self, parent: usize) -> Option<usize> {
        self.to_parent.binary_search(&parent).ok()
    }

    /// Maps a parent-universe set into local ids, dropping non-members.
    pub fn localize(&self, set: &NodeSet) -> NodeSet {
        NodeSet::from_nodes(
            self.to_parent.len(),
            self.to_parent
                .iter()
                .enumerate()
                .filter(|(_, &p)| set.contains(p))
                .map(|(i, _)| i),
        )
    }

    /// Maps a local set back into the parent universe.
    pub fn lift(&self, local: &NodeSet, parent_universe: usize) -> NodeSet {
        NodeSet::from_nodes(parent_universe, local.iter().map(|i| self.to_parent[i]))
    }
}

pub fn induced_subgraph(g: &Graph, s: &NodeSet) -> Induced {
    let to_parent = s.to_vec();
    let mut local = vec![usize::MAX; g.node_count()];
    for (i, &p) in to_parent.iter().enumerate() {
        local[p] = i;
    }
    let mut offsets = Vec::with_capacity(to_parent.len() + 1);
    let mut targets = Vec::new();
    offsets.push(0);
    for &p in &to_parent {
        // Parent lists are sorted and the remap is monotone, so local lists stay sorted.
        targets.extend(
            g.neighbors(p)
                .iter()
                .filter(|&&v| s.contains(v))
                .map(|&v| local[v]),
        );
        offsets.push(targets.len());
    }
    Induced {
        graph: Graph { offsets, targets },
        to_parent,
    }
}

/// Hop distance from `sources`, capped at `radius`; `None` marks nodes farther away.
pub fn bfs_distance(g: &Graph, sources: &NodeSet, radius: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; g.node_count()];
    let mut frontier: Vec<usize> = sources.iter().collect();
    for &u in &frontier {
        dist[u] = Some(0);
    }
    for level in 1..=radius {
        let mut next = Vec::new();
        for &u in &frontier {
            for &v in g.neighbors(u) {
                if dist[v].is_none() {
                    dist[v] = Some(level);
                    next.push(v);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    dist
}

/// Nodes within two hops of `ruling`.
pub fn two_hop_covered(g: &Graph, ruling: &NodeSet) -> NodeSet {
    let dist = bfs_distance(g, ruling, 2);
    NodeSet::from_nodes(
        g.node_count(),
        dist.iter()
            .enumerate()
            .filter(|(_, d)| d.is_some())
            .map(|(u, _)| u),
    )
}

pub(crate) enum EdgeLine {
    Blank,
    Header(usize),
    Edge(usize, usize),
}

/// One line of the edge-list format.
pub(crate) fn parse_edge_line(line: &str, lineno: usize) -> Result<EdgeLine> {
    let line = line.trim();
    if line.is_empty() || line.starts_with('#') {
        return Ok(EdgeLine::Blank);
    }
    let err = |message: String| Error::Parse { line: lineno, message };
    let mut fields = line.split_whitespace();
    let first = fields.next().unwrap_or_default();
    let second = fields.next();
    if fields.next().is_some() {
        return Err(err(format!("expected two fields, got `{line}`")));
    }
    let parse_id = |s: &str| s.parse::<usize>().map_err(|_| err(format!("bad node id `{s}`")));
    if first == "n" {
        let count = second.ok_or_else(|| err("missing node count after `n`".into()))?;
        return Ok(EdgeLine::Header(parse_id(count)?));
    }
    let second = second.ok_or_else(|| err(format!("expected two fields, got `{line}`")))?;
    Ok(EdgeLine::Edge(parse_id(first)?, parse_id(second)?))
}

/// Parses the whitespace-separated edge-list format: one `u v` pair per line,
/// `#` comments, and an optional `n <count>` header. Without a header the node
/// count is one more than the largest id seen.
pub fn parse_edge_list<R: BufRead>(reader: R) -> Result<(usize, Vec<(usize, usize)>)> {
    let mut declared = None;
    let mut edges = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::Parse {
            line: lineno,
            message: e.to_string(),
        })?;
        match parse_edge_line(&line, lineno)? {
            EdgeLine::Blank => {}
            EdgeLine::Header(n) => {
                if declared.is_some() || !edges.is_empty() {
                    return Err(Error::Parse {
                        line: lineno,
                        message: "`n` header must come before any edge".into(),
                    });
                }
                declared = Some(n);
            }
            EdgeLine::Edge(u, v) => edges.push((u, v)),
        }
    }
    let n = match declared {
        Some(n) => {
            if let Some(&(u, v)) = edges.iter().find(|&&(u, v)| u >= n || v >= n) {
                return Err(Error::NodeOutOfRange { node: u.max(v), n });
            }
            n
        }
        None => edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0),
    };
    Ok((n, edges))
}

pub fn read_edge_list(path: &Path) -> Result<Graph> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let (n, edges) = parse_edge_list(BufReader::new(file))?;
    Graph::from_edges(n, edges)
}

/// Writes `g` in the edge-list format, header included.
pub fn write_edge_list<W: std::io::Write>(g: &Graph, mut out: W) -> std::io::Result<()> {
    writeln!(out, "n {}", g.node_count())?;
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}")?;
    }
    Ok(())
}
