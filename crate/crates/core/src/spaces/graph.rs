use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet, VecDeque};

use crate::error::{Error, Result};

use super::FiniteMetricSpace;

/// Length tolerance for declaring two shortest paths tied.
pub const TIE_TOL: f64 = 1e-9;

/// Largest path count representable without loss in an `f64`.
pub const MAX_EXACT_COUNT: u64 = 1 << 53;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub length: f64,
}

/// Undirected simple graph with positive edge lengths.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicGraph {
    vertex_count: usize,
    edges: Vec<Edge>,
}

impl GeodesicGraph {
    pub fn new(vertex_count: usize, edges: Vec<Edge>) -> Result<Self> {
        if vertex_count == 0 {
            return Err(Error::InvalidGraph("graph has no vertices".into()));
        }
        let mut seen = HashSet::new();
        for e in &edges {
            if e.u >= vertex_count || e.v >= vertex_count {
                return Err(Error::InvalidGraph(format!(
                    "edge ({}, {}) references a vertex outside 0..{vertex_count}",
                    e.u, e.v
                )));
            }
            if e.u == e.v {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {}", e.u)));
            }
            if !(e.length.is_finite() && e.length > 0.0) {
                return Err(Error::InvalidGraph(format!(
                    "edge ({}, {}) has non-positive length {}",
                    e.u, e.v, e.length
                )));
            }
            if !seen.insert((e.u.min(e.v), e.u.max(e.v))) {
                return Err(Error::InvalidGraph(format!(
                    "duplicate edge ({}, {})",
                    e.u, e.v
                )));
            }
        }
        Ok(Self {
            vertex_count,
            edges,
        })
    }

    /// Graph with unit-length edges.
    pub fn unit(vertex_count: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let edges = pairs
            .iter()
            .map(|&(u, v)| Edge { u, v, length: 1.0 })
            .collect();
        Self::new(vertex_count, edges)
    }

    /// Cycle graph on `n` vertices with unit edges; `cycle(4)` is the 4-cut.
    pub fn cycle(n: usize) -> Result<Self> {
        let pairs: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Self::unit(n, &pairs)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn has_unit_lengths(&self) -> bool {
        self.edges.iter().all(|e| e.length == 1.0)
    }

    /// Returns a copy with one more edge.
    pub fn with_edge(&self, edge: Edge) -> Result<Self> {
        let mut edges = self.edges.clone();
        edges.push(edge);
        Self::new(self.vertex_count, edges)
    }

    fn adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.vertex_count];
        for e in &self.edges {
            adj[e.u].push((e.v, e.length));
            adj[e.v].push((e.u, e.length));
        }
        adj
    }
}

/// All-pairs shortest-path lengths and geodesic counts, row-major.
pub(crate) struct ShortestPaths {
    pub n: usize,
    pub dist: Vec<f64>,
    pub counts: Vec<u64>,
}

pub(crate) fn all_pairs(g: &GeodesicGraph) -> Result<ShortestPaths> {
    let n = g.vertex_count;
    let adj = g.adjacency();
    let unit = g.has_unit_lengths();
    let mut dist = Vec::with_capacity(n * n);
    let mut counts = Vec::with_capacity(n * n);
    for s in 0..n {
        let (d, c) = if unit {
            bfs(&adj, s)?
        } else {
            dijkstra(&adj, s)?
        };
        if let Some(v) = d.iter().position(|x| x.is_infinite()) {
            return Err(Error::Disconnected { u: s, v });
        }
        dist.extend(d);
        counts.extend(c);
    }
    // Ties are resolved per source, so symmetrize against float noise.
    for i in 0..n {
        for j in (i + 1)..n {
            let m = dist[i * n + j].min(dist[j * n + i]);
            dist[i * n + j] = m;
            dist[j * n + i] = m;
        }
    }
    Ok(ShortestPaths { n, dist, counts })
}

fn add_count(acc: u64, add: u64, u: usize, v: usize) -> Result<u64> {
    match acc.checked_add(add) {
        Some(c) if c <= MAX_EXACT_COUNT => Ok(c),
        _ => Err(Error::CountOverflow { u, v }),
    }
}

fn bfs(adj: &[Vec<(usize, f64)>], s: usize) -> Result<(Vec<f64>, Vec<u64>)> {
    let n = adj.len();
    let mut level = vec![usize::MAX; n];
    let mut count = vec![0u64; n];
    level[s] = 0;
    count[s] = 1;
    let mut queue = VecDeque::from([s]);
    while let Some(u) = queue.pop_front() {
        for &(v, _) in &adj[u] {
            if level[v] == usize::MAX {
                level[v] = level[u] + 1;
                queue.push_back(v);
            }
            if level[v] == level[u] + 1 {
                count[v] = add_count(count[v], count[u], s, v)?;
            }
        }
    }
    let dist = level
        .iter()
        .map(|&l| if l == usize::MAX { f64::INFINITY } else { l as f64 })
        .collect();
    count[s] = 0;
    Ok((dist, count))
}

#[derive(PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

fn dijkstra(adj: &[Vec<(usize, f64)>], s: usize) -> Result<(Vec<f64>, Vec<u64>)> {
    let n = adj.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut count = vec![0u64; n];
    let mut done = vec![false; n];
    dist[s] = 0.0;
    count[s] = 1;
    let mut heap = BinaryHeap::from([Entry(0.0, s)]);
    while let Some(Entry(d, u)) = heap.pop() {
        if done[u] {
            continue;
        }
        done[u] = true;
        for &(v, w) in &adj[u] {
            if done[v] {
                continue;
            }
            let nd = d + w;
            if nd < dist[v] - TIE_TOL {
                dist[v] = nd;
                count[v] = count[u];
                heap.push(Entry(nd, v));
            } else if (nd - dist[v]).abs() <= TIE_TOL {
                count[v] = add_count(count[v], count[u], s, v)?;
            }
        }
    }
    count[s] = 0;
    Ok((dist, count))
}

/// Shortest-path metric of a connected graph.
pub fn graph_metric(g: &GeodesicGraph) -> Result<FiniteMetricSpace> {
    let sp = all_pairs(g)?;
    let labels = (0..sp.n).map(|i| i.to_string()).collect();
    Ok(FiniteMetricSpace::from_trusted(labels, sp.dist))
}
