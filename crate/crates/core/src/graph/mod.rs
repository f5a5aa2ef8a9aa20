//! Geometric graphs over agent realizations.
//!
//! A [`Realization`] is an ordered list of agent positions plus a sensing
//! radius; the order is the vertex labeling. [`build_geometric_graph`] joins
//! every pair within the radius (boundary inclusive). Relabeling, bandwidth
//! bounds and random geometric graph sampling live in the submodules.

mod bounds;
pub mod io;
mod relabel;
mod rgg;

pub use bounds::{
    diameter_bound, min_bandwidth_bruteforce, phi_max, scan_statistic_sorted, strip_count,
    strip_count_process, BRUTEFORCE_MAX_VERTICES,
};
pub use relabel::{phi_of_relabeling, vertex_relabel};
pub use rgg::{sample_rgg, sample_rgg_with, RggConfig};

use crate::banded::DenseSymMatrix;
use std::collections::VecDeque;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("spatial dimension {0} not supported (expected 1..=3)")]
    UnsupportedDimension(usize),
    #[error("position array of length {len} is not a multiple of dimension {dim}")]
    RaggedPositions { len: usize, dim: usize },
    #[error("non-finite coordinate at vertex {0}")]
    NonFinitePosition(usize),
    #[error("sensing radius must be positive and finite, got {0}")]
    InvalidRadius(f64),
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("vertex {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("not a permutation of 0..{0}")]
    InvalidPermutation(usize),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("exhaustive search limited to {max} vertices, graph has {n}")]
    TooLarge { n: usize, max: usize },
    #[error("invalid random graph configuration: {0}")]
    InvalidConfig(String),
}

pub type GraphResult<T> = Result<T, GraphError>;

/// Agent positions (row-major, `dim` coordinates per vertex) and sensing radius.
#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    dim: usize,
    coords: Vec<f64>,
    radius: f64,
}

impl Realization {
    pub fn new(dim: usize, coords: Vec<f64>, radius: f64) -> GraphResult<Self> {
        if !(1..=3).contains(&dim) {
            return Err(GraphError::UnsupportedDimension(dim));
        }
        if coords.len() % dim != 0 {
            return Err(GraphError::RaggedPositions {
                len: coords.len(),
                dim,
            });
        }
        if let Some(idx) = coords.iter().position(|c| !c.is_finite()) {
            return Err(GraphError::NonFinitePosition(idx / dim));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(GraphError::InvalidRadius(radius));
        }
        Ok(Self { dim, coords, radius })
    }

    /// Builds from one slice per vertex; all must have the same length.
    pub fn from_points(points: &[Vec<f64>], radius: f64) -> GraphResult<Self> {
        let dim = points.first().map_or(2, Vec::len);
        let mut coords = Vec::with_capacity(points.len() * dim);
        for p in points {
            if p.len() != dim {
                return Err(GraphError::DimensionMismatch {
                    expected: dim,
                    found: p.len(),
                });
            }
            coords.extend_from_slice(p);
        }
        Self::new(dim, coords, radius)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn position(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    /// Flat coordinate vector, which doubles as the stacked state vector.
    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn x_coords(&self) -> Vec<f64> {
        self.coords.iter().step_by(self.dim).copied().collect()
    }

    pub fn with_radius(&self, radius: f64) -> GraphResult<Self> {
        Self::new(self.dim, self.coords.clone(), radius)
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        euclidean(self.position(i), self.position(j))
    }
}

pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Undirected simple graph. Edges are stored as `(lo, hi)` pairs sorted
/// lexicographically; that order also fixes measurement row order downstream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WsnGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl WsnGraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> GraphResult<Self> {
        let mut list = Vec::new();
        for (a, b) in edges {
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            for v in [a, b] {
                if v >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: v, n });
                }
            }
            list.push((a.min(b), a.max(b)));
        }
        list.sort_unstable();
        if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
            return Err(GraphError::DuplicateEdge(w[0].0, w[0].1));
        }
        Ok(Self { n, edges: list })
    }

    pub fn empty(n: usize) -> Self {
        Self { n, edges: Vec::new() }
    }

    pub fn path(n: usize) -> Self {
        Self {
            n,
            edges: (1..n).map(|i| (i - 1, i)).collect(),
        }
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3);
        let mut g = Self::path(n);
        g.edges.push((0, n - 1));
        g.edges.sort_unstable();
        g
    }

    pub fn complete(n: usize) -> Self {
        Self {
            n,
            edges: (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect(),
        }
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Position of edge `(i, j)` (either orientation) in [`Self::edges`].
    pub fn edge_index(&self, i: usize, j: usize) -> Option<usize> {
        self.edges.binary_search(&(i.min(j), i.max(j))).ok()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edge_index(i, j).is_some()
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(i, j) in &self.edges {
            adj[i].push(j);
            adj[j].push(i);
        }
        adj
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(i, j) in &self.edges {
            deg[i] += 1;
            deg[j] += 1;
        }
        deg
    }

    /// Copy without edge number `idx`.
    pub fn without_edge(&self, idx: usize) -> Self {
        let mut edges = self.edges.clone();
        edges.remove(idx);
        Self { n: self.n, edges }
    }

    /// Hop distances from `src`; `None` for unreachable vertices.
    pub fn bfs_distances(&self, src: usize) -> Vec<Option<usize>> {
        let adj = self.adjacency();
        bfs(&adj, src)
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || self.bfs_distances(0).iter().all(Option::is_some)
    }
}

pub(crate) fn bfs(adj: &[Vec<usize>], src: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; adj.len()];
    dist[src] = Some(0);
    let mut queue = VecDeque::from([src]);
    while let Some(u) = queue.pop_front() {
        let du = dist[u].unwrap_or(0);
        for &v in &adj[u] {
            if dist[v].is_none() {
                dist[v] = Some(du + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

/// Vertex relabeling: `map[i]` is the new label of old vertex `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    pub fn new(map: Vec<usize>) -> GraphResult<Self> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &m in &map {
            if m >= n || seen[m] {
                return Err(GraphError::InvalidPermutation(n));
            }
            seen[m] = true;
        }
        Ok(Self { map })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            map: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    pub fn new_label(&self, old: usize) -> usize {
        self.map[old]
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.map.len()];
        for (old, &new) in self.map.iter().enumerate() {
            inv[new] = old;
        }
        Self { map: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &m)| i == m)
    }

    /// Reorders per-vertex blocks of `block` values so that block `i` of the
    /// input lands at block `map[i]` of the output.
    pub fn permute_blocks<T: Copy + Default>(&self, values: &[T], block: usize) -> Vec<T> {
        let mut out = vec![T::default(); values.len()];
        for (old, &new) in self.map.iter().enumerate() {
            out[new * block..(new + 1) * block]
                .copy_from_slice(&values[old * block..(old + 1) * block]);
        }
        out
    }

    pub fn permute_graph(&self, g: &WsnGraph) -> GraphResult<WsnGraph> {
        if g.n != self.map.len() {
            return Err(GraphError::DimensionMismatch {
                expected: self.map.len(),
                found: g.n,
            });
        }
        let mut edges: Vec<_> = g
            .edges
            .iter()
            .map(|&(i, j)| {
                let (a, b) = (self.map[i], self.map[j]);
                (a.min(b), a.max(b))
            })
            .collect();
        edges.sort_unstable();
        Ok(WsnGraph { n: g.n, edges })
    }

    pub fn permute_realization(&self, x: &Realization) -> GraphResult<Realization> {
        if x.len() != self.map.len() {
            return Err(GraphError::DimensionMismatch {
                expected: self.map.len(),
                found: x.len(),
            });
        }
        Ok(Realization {
            dim: x.dim,
            coords: self.permute_blocks(&x.coords, x.dim),
            radius: x.radius,
        })
    }
}

/// Joins every pair of vertices whose Euclidean distance is at most the radius.
pub fn build_geometric_graph(x: &Realization) -> WsnGraph {
    let n = x.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| x.position(a)[0].total_cmp(&x.position(b)[0]));
    let mut edges = Vec::new();
    for (s, &i) in order.iter().enumerate() {
        let xi = x.position(i)[0];
        for &j in &order[s + 1..] {
            if x.position(j)[0] - xi > x.radius {
                break;
            }
            if x.distance(i, j) <= x.radius {
                edges.push((i.min(j), i.max(j)));
            }
        }
    }
    edges.sort_unstable();
    WsnGraph { n, edges }
}

/// Degree matrix minus adjacency matrix.
pub fn laplacian(g: &WsnGraph) -> DenseSymMatrix {
    let mut l = DenseSymMatrix::zeros(g.n);
    for (i, d) in g.degrees().into_iter().enumerate() {
        l.set(i, i, d as f64);
    }
    for &(i, j) in &g.edges {
        l.set(i, j, -1.0);
    }
    l
}

/// Largest label difference over the edges (the Laplacian's bandwidth).
pub fn graph_bandwidth(g: &WsnGraph) -> usize {
    g.edges.iter().map(|&(i, j)| j - i).max().unwrap_or(0)
}

pub fn apply_permutation(
    g: &WsnGraph,
    x: &Realization,
    p: &Permutation,
) -> GraphResult<(WsnGraph, Realization)> {
    if g.n != x.len() {
        return Err(GraphError::DimensionMismatch {
            expected: g.n,
            found: x.len(),
        });
    }
    Ok((p.permute_graph(g)?, p.permute_realization(x)?))
}
