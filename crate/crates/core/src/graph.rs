//! Connectivity ingestion, thresholding to a binary functional graph,
//! incidence and Hodge-Laplacian operators, maximum spanning tree
//! decomposition, and independent-cycle counting.

use crate::error::{CoreError, Result};
use crate::io::{self, MatrixFormat};
use crate::linalg::SpMat;
use serde::{Deserialize, Serialize};
use std::path::Path;

const ASYMMETRY_TOL: f64 = 1e-9;

/// Dense symmetric matrix of pairwise correlations. Diagonal entries are
/// ignored by every consumer (no self-connections).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConnectivityMatrix {
    pub n_nodes: usize,
    values: Vec<f64>, // row-major n x n
}

impl ConnectivityMatrix {
    /// Validate and symmetrize raw rows. Asymmetry up to 1e-9 is averaged
    /// away; anything larger is an error.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(CoreError::NonSquare("empty matrix".into()));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(CoreError::NonSquare(format!(
                    "{n} rows but row {i} has {} columns",
                    row.len()
                )));
            }
            for (j, v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(CoreError::NonFinite { row: i, col: j });
                }
            }
        }
        let mut max_dev = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                max_dev = max_dev.max((rows[i][j] - rows[j][i]).abs());
            }
        }
        if max_dev > ASYMMETRY_TOL {
            return Err(CoreError::Asymmetric { max_dev, tol: ASYMMETRY_TOL });
        }
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                values[i * n + j] = 0.5 * (rows[i][j] + rows[j][i]);
            }
        }
        Ok(Self { n_nodes: n, values })
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n_nodes + j]
    }
}

/// Load a connectivity matrix from CSV or packed-binary.
pub fn load_connectivity(path: &Path, format: MatrixFormat) -> Result<ConnectivityMatrix> {
    ConnectivityMatrix::new(io::read_matrix(path, format)?)
}

/// Binarized graph over a canonical (lexicographic) edge ordering, with the
/// original signed correlation kept as the per-edge signal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionalGraph {
    pub n_nodes: usize,
    /// Node pairs (i, j) with i < j, sorted lexicographically.
    pub edges: Vec<(usize, usize)>,
    pub edge_signals: Vec<f64>,
    /// Connected-component count.
    pub components: usize,
}

impl FunctionalGraph {
    pub fn new(n_nodes: usize, edges: Vec<(usize, usize)>, edge_signals: Vec<f64>) -> Result<Self> {
        if n_nodes == 0 {
            return Err(CoreError::InvalidInput("graph needs at least one node".into()));
        }
        if edges.len() != edge_signals.len() {
            return Err(CoreError::DimensionMismatch(format!(
                "{} edges but {} signals",
                edges.len(),
                edge_signals.len()
            )));
        }
        for w in edges.windows(2) {
            if w[0] >= w[1] {
                return Err(CoreError::InvalidInput(
                    "edges must be strictly sorted lexicographically".into(),
                ));
            }
        }
        for &(i, j) in &edges {
            if i >= j || j >= n_nodes {
                return Err(CoreError::InvalidInput(format!(
                    "edge ({i}, {j}) violates 0 <= i < j < {n_nodes}"
                )));
            }
        }
        let components = {
            let mut uf = UnionFind::new(n_nodes);
            for &(i, j) in &edges {
                uf.union(i, j);
            }
            uf.component_count()
        };
        Ok(Self { n_nodes, edges, edge_signals, components })
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    /// Index of edge (i, j) in the canonical ordering, if present.
    pub fn edge_index(&self, i: usize, j: usize) -> Option<usize> {
        let key = if i < j { (i, j) } else { (j, i) };
        self.edges.binary_search(&key).ok()
    }

    /// Position of edge e in the row-major upper-triangle vectorization of
    /// the node adjacency matrix (length n(n-1)/2).
    pub fn upper_triangle_slot(&self, e: usize) -> usize {
        let (i, j) = self.edges[e];
        let n = self.n_nodes;
        i * n - i * (i + 1) / 2 + (j - i - 1)
    }

    pub fn upper_triangle_len(&self) -> usize {
        self.n_nodes * (self.n_nodes - 1) / 2
    }
}

/// Retain the top `quantile` fraction of upper-triangle entries by absolute
/// value. Always keeps an exact count ceil(q * n(n-1)/2); ties broken in
/// favor of the lexicographically smaller pair. Signals keep their sign.
pub fn threshold_graph(cm: &ConnectivityMatrix, quantile: f64) -> Result<FunctionalGraph> {
    if !(quantile > 0.0 && quantile <= 1.0) {
        return Err(CoreError::InvalidQuantile(quantile));
    }
    let n = cm.n_nodes;
    if n < 2 {
        return Err(CoreError::InvalidInput("thresholding needs at least 2 nodes".into()));
    }
    let m = n * (n - 1) / 2;
    let keep = (quantile * m as f64).ceil() as usize;
    let mut entries: Vec<(usize, usize, f64)> = Vec::with_capacity(m);
    for i in 0..n {
        for j in (i + 1)..n {
            entries.push((i, j, cm.get(i, j)));
        }
    }
    entries.sort_by(|a, b| {
        b.2.abs()
            .partial_cmp(&a.2.abs())
            .unwrap()
            .then_with(|| (a.0, a.1).cmp(&(b.0, b.1)))
    });
    entries.truncate(keep);
    entries.sort_by_key(|&(i, j, _)| (i, j));
    let edges: Vec<(usize, usize)> = entries.iter().map(|&(i, j, _)| (i, j)).collect();
    let signals: Vec<f64> = entries.iter().map(|&(_, _, v)| v).collect();
    FunctionalGraph::new(n, edges, signals)
}

/// Signed node-edge incidence operator. The column for edge (i, j) with
/// i < j carries -1 at row i and +1 at row j.
#[derive(Clone, Debug, PartialEq)]
pub struct IncidenceB1 {
    pub matrix: SpMat, // n_nodes x n_edges
}

pub fn build_b1(g: &FunctionalGraph) -> IncidenceB1 {
    let mut trip = Vec::with_capacity(2 * g.n_edges());
    for (e, &(i, j)) in g.edges.iter().enumerate() {
        trip.push((i, e, -1.0));
        trip.push((j, e, 1.0));
    }
    IncidenceB1 {
        matrix: SpMat::from_triplets(g.n_nodes, g.n_edges(), &trip),
    }
}

/// First-order Hodge Laplacian L1 = B1^T B1 over edges.
#[derive(Clone, Debug, PartialEq)]
pub struct HodgeL1 {
    pub matrix: SpMat, // n_edges x n_edges
}

pub fn build_hodge_l1(b1: &IncidenceB1) -> HodgeL1 {
    HodgeL1 {
        matrix: b1.matrix.transpose().matmul(&b1.matrix),
    }
}

/// Edge partition into a maximum spanning forest B(G) and the remaining
/// edges D(G); q = |D(G)| = E - N + C counts independent cycles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeDecomposition {
    pub tree_edges: Vec<usize>,
    pub extra_edges: Vec<usize>,
    pub q: usize,
}

/// Kruskal over |edge signal| weights, descending; ties broken by canonical
/// edge order so the decomposition is deterministic.
pub fn max_spanning_tree(g: &FunctionalGraph) -> TreeDecomposition {
    let mut order: Vec<usize> = (0..g.n_edges()).collect();
    order.sort_by(|&a, &b| {
        g.edge_signals[b]
            .abs()
            .partial_cmp(&g.edge_signals[a].abs())
            .unwrap()
            .then_with(|| a.cmp(&b))
    });
    let mut uf = UnionFind::new(g.n_nodes);
    let mut tree = Vec::new();
    let mut extra = Vec::new();
    for e in order {
        let (i, j) = g.edges[e];
        if uf.union(i, j) {
            tree.push(e);
        } else {
            extra.push(e);
        }
    }
    tree.sort_unstable();
    extra.sort_unstable();
    let q = extra.len();
    TreeDecomposition { tree_edges: tree, extra_edges: extra, q }
}

/// First Betti number E - N + C.
pub fn betti1(g: &FunctionalGraph) -> usize {
    g.n_edges() + g.components - g.n_nodes
}

/// Disjoint-set forest with union by rank and path halving.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
    components: usize,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
            components: n,
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns true when the two sets were disjoint.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        self.components -= 1;
        true
    }

    pub fn connected(&mut self, a: usize, b: usize) -> bool {
        self.find(a) == self.find(b)
    }

    pub fn component_count(&self) -> usize {
        self.components
    }
}
