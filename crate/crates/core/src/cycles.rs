//! Independent cycle basis extraction and the edge-level cycle adjacency.
//!
//! Each extra edge of the spanning-forest decomposition closes exactly one
//! cycle. Two interchangeable routes recover it: the null eigenvector of the
//! subgraph's Hodge Laplacian, or walking the unique tree path between the
//! extra edge's endpoints. Both produce the same incidence rows.

use crate::error::{CoreError, Result};
use crate::graph::{build_b1, build_hodge_l1, FunctionalGraph, HodgeL1, TreeDecomposition};
use crate::linalg::{symmetric_eigh, SpMat};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Relative support cutoff for entries of the null eigenvector: genuine
/// cycle entries have uniform magnitude, everything else is rounding noise.
const NULLVEC_SUPPORT_TOL: f64 = 1e-6;
/// Absolute cutoff separating the zero eigenvalue from the spectral gap.
const ZERO_EIG_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CycleMethod {
    /// Null eigenvector of the one-cycle subgraph's Hodge Laplacian.
    Nullspace,
    /// Extra edge plus the unique tree path between its endpoints.
    Treepath,
}

/// Binary Q x E matrix; row q marks the edges of basis cycle q. Rows follow
/// the canonical order of the extra edges.
#[derive(Clone, Debug, PartialEq)]
pub struct CycleIncidenceMatrix {
    pub matrix: SpMat,
    pub q: usize,
    pub e: usize,
}

impl CycleIncidenceMatrix {
    /// Edge indices of basis cycle q, ascending.
    pub fn cycle_edges(&self, q: usize) -> &[usize] {
        self.matrix.row(q).0
    }
}

/// Binary symmetric E x E adjacency: edges are neighbors iff they share a
/// node and lie on a common basis cycle. Diagonal marks membership in at
/// least one cycle.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeCycleAdjacency {
    pub matrix: SpMat,
}

impl EdgeCycleAdjacency {
    pub fn n_edges(&self) -> usize {
        self.matrix.rows
    }

    /// Neighborhood lists (including the edge itself when it lies on a
    /// cycle); the convolution domain.
    pub fn neighborhoods(&self) -> Vec<Vec<usize>> {
        (0..self.matrix.rows)
            .map(|i| self.matrix.row(i).0.to_vec())
            .collect()
    }
}

pub fn cycle_incidence(
    g: &FunctionalGraph,
    td: &TreeDecomposition,
    method: CycleMethod,
) -> Result<CycleIncidenceMatrix> {
    if td.tree_edges.len() + td.extra_edges.len() != g.n_edges() || td.q != td.extra_edges.len() {
        return Err(CoreError::InvalidInput(
            "tree decomposition inconsistent with graph".into(),
        ));
    }
    let rows: Vec<Vec<usize>> = match method {
        CycleMethod::Treepath => treepath_rows(g, td),
        CycleMethod::Nullspace => nullspace_rows(g, td)?,
    };
    let mut trip = Vec::new();
    for (q, edges) in rows.iter().enumerate() {
        for &e in edges {
            trip.push((q, e, 1.0));
        }
    }
    Ok(CycleIncidenceMatrix {
        matrix: SpMat::from_triplets(td.q, g.n_edges(), &trip),
        q: td.q,
        e: g.n_edges(),
    })
}

/// Fundamental cycle per extra edge: the edge itself plus the unique path
/// between its endpoints in the spanning forest.
fn treepath_rows(g: &FunctionalGraph, td: &TreeDecomposition) -> Vec<Vec<usize>> {
    // adjacency over tree edges only: node -> (neighbor, edge index)
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); g.n_nodes];
    for &e in &td.tree_edges {
        let (i, j) = g.edges[e];
        adj[i].push((j, e));
        adj[j].push((i, e));
    }
    td.extra_edges
        .iter()
        .map(|&ek| {
            let (src, dst) = g.edges[ek];
            let mut row = tree_path_edges(&adj, g.n_nodes, src, dst);
            row.push(ek);
            row.sort_unstable();
            row
        })
        .collect()
}

/// BFS in the forest from src to dst, returning the path's edge indices.
fn tree_path_edges(
    adj: &[Vec<(usize, usize)>],
    n_nodes: usize,
    src: usize,
    dst: usize,
) -> Vec<usize> {
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; n_nodes];
    let mut visited = vec![false; n_nodes];
    let mut queue = std::collections::VecDeque::new();
    visited[src] = true;
    queue.push_back(src);
    while let Some(u) = queue.pop_front() {
        if u == dst {
            break;
        }
        for &(v, e) in &adj[u] {
            if !visited[v] {
                visited[v] = true;
                parent[v] = Some((u, e));
                queue.push_back(v);
            }
        }
    }
    assert!(visited[dst], "extra edge endpoints must share a tree component");
    let mut path = Vec::new();
    let mut cur = dst;
    while let Some((prev, e)) = parent[cur] {
        path.push(e);
        cur = prev;
    }
    path
}

/// The route used on paper: per extra edge, eigendecompose the Hodge
/// Laplacian of the forest-plus-one-edge subgraph and read the cycle off
/// the support of its null eigenvector.
fn nullspace_rows(g: &FunctionalGraph, td: &TreeDecomposition) -> Result<Vec<Vec<usize>>> {
    let mut rows = Vec::with_capacity(td.q);
    for &ek in &td.extra_edges {
        // subgraph edge set in canonical order, remembering global indices
        let mut sub_edges: Vec<usize> = td.tree_edges.clone();
        sub_edges.push(ek);
        sub_edges.sort_unstable();
        let edges: Vec<(usize, usize)> = sub_edges.iter().map(|&e| g.edges[e]).collect();
        let signals = vec![1.0; edges.len()];
        let sub = FunctionalGraph::new(g.n_nodes, edges, signals)?;
        let l1 = build_hodge_l1(&build_b1(&sub));
        let (eigenvalues, vectors) = symmetric_eigh(&l1.matrix.to_dense())?;
        let nullity = eigenvalues.iter().take_while(|&&l| l.abs() <= ZERO_EIG_TOL).count();
        if nullity != 1 {
            return Err(CoreError::BadNullity { nullity });
        }
        let nullvec = vectors.col(0);
        let max_abs = nullvec.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut row: Vec<usize> = nullvec
            .iter()
            .enumerate()
            .filter(|(_, v)| v.abs() > NULLVEC_SUPPORT_TOL * max_abs)
            .map(|(local, _)| sub_edges[local])
            .collect();
        row.sort_unstable();
        rows.push(row);
    }
    Ok(rows)
}

/// A_E[i][j] = 1 iff L1[i][j] != 0 and (T^T T)[i][j] != 0.
pub fn edge_cycle_adjacency(l1: &HodgeL1, t: &CycleIncidenceMatrix) -> Result<EdgeCycleAdjacency> {
    if l1.matrix.rows != t.e {
        return Err(CoreError::DimensionMismatch(format!(
            "L1 is {}x{} but T has {} edge columns",
            l1.matrix.rows, l1.matrix.cols, t.e
        )));
    }
    let tt = t.matrix.transpose().matmul(&t.matrix);
    let mut trip = Vec::new();
    for i in 0..t.e {
        let (lcols, _) = l1.matrix.row(i);
        for &j in lcols {
            if tt.get(i, j) != 0.0 {
                trip.push((i, j, 1.0));
            }
        }
    }
    Ok(EdgeCycleAdjacency {
        matrix: SpMat::from_triplets(t.e, t.e, &trip),
    })
}

/// GF(2) combination of basis cycles: the symmetric difference of the rows
/// selected by odd coefficients. Returns the edge indices, ascending.
pub fn cycle_basis_combination(t: &CycleIncidenceMatrix, coeffs: &[i64]) -> Result<Vec<usize>> {
    if coeffs.len() != t.q {
        return Err(CoreError::DimensionMismatch(format!(
            "{} coefficients for {} basis cycles",
            coeffs.len(),
            t.q
        )));
    }
    let mut indicator = vec![false; t.e];
    for (q, &a) in coeffs.iter().enumerate() {
        if a.rem_euclid(2) == 1 {
            for &e in t.cycle_edges(q) {
                indicator[e] = !indicator[e];
            }
        }
    }
    Ok(indicator
        .iter()
        .enumerate()
        .filter(|(_, &on)| on)
        .map(|(e, _)| e)
        .collect())
}

#[derive(Serialize, Deserialize)]
pub struct SparseSidecar {
    pub q: usize,
    pub e: usize,
    pub method: String,
}

/// Coordinate-list CSV (`row,col,value`) plus a JSON sidecar `{q, e, method}`.
pub fn export_sparse_csv(
    matrix: &SpMat,
    q: usize,
    e: usize,
    method: &str,
    csv_path: &Path,
    sidecar_path: &Path,
) -> Result<()> {
    let mut out = String::from("row,col,value\n");
    for (r, c, v) in matrix.triplets() {
        out.push_str(&format!("{r},{c},{v}\n"));
    }
    std::fs::write(csv_path, out)?;
    let sidecar = SparseSidecar { q, e, method: method.to_string() };
    std::fs::write(sidecar_path, serde_json::to_string_pretty(&sidecar).unwrap())?;
    Ok(())
}

/// Degree-2 connected single-loop check for one cycle's edge set.
pub fn is_simple_loop(g: &FunctionalGraph, edge_set: &[usize]) -> bool {
    if edge_set.len() < 3 {
        return false;
    }
    let mut degree = std::collections::BTreeMap::new();
    for &e in edge_set {
        let (i, j) = g.edges[e];
        *degree.entry(i).or_insert(0usize) += 1;
        *degree.entry(j).or_insert(0usize) += 1;
    }
    if degree.values().any(|&d| d != 2) {
        return false;
    }
    // connectivity over touched nodes
    let nodes: Vec<usize> = degree.keys().copied().collect();
    let index_of = |n: usize| nodes.binary_search(&n).unwrap();
    let mut uf = crate::graph::UnionFind::new(nodes.len());
    for &e in edge_set {
        let (i, j) = g.edges[e];
        uf.union(index_of(i), index_of(j));
    }
    uf.component_count() == 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::max_spanning_tree;

    fn triangle() -> FunctionalGraph {
        FunctionalGraph::new(3, vec![(0, 1), (0, 2), (1, 2)], vec![0.9, 0.5, 0.1]).unwrap()
    }

    pub(crate) fn k4_uniform() -> (FunctionalGraph, TreeDecomposition) {
        let edges = vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        let g = FunctionalGraph::new(4, edges, vec![1.0; 6]).unwrap();
        let td = max_spanning_tree(&g);
        (g, td)
    }

    #[test]
    fn triangle_single_row() {
        let g = triangle();
        let td = max_spanning_tree(&g);
        for method in [CycleMethod::Treepath, CycleMethod::Nullspace] {
            let t = cycle_incidence(&g, &td, method).unwrap();
            assert_eq!(t.q, 1);
            assert_eq!(t.cycle_edges(0), &[0, 1, 2]);
        }
    }

    #[test]
    fn k4_star_tree_rows() {
        let (g, td) = k4_uniform();
        let t = cycle_incidence(&g, &td, CycleMethod::Treepath).unwrap();
        let dense = t.matrix.to_dense();
        let expected = [
            [1.0, 1.0, 0.0, 1.0, 0.0, 0.0],
            [1.0, 0.0, 1.0, 0.0, 1.0, 0.0],
            [0.0, 1.0, 1.0, 0.0, 0.0, 1.0],
        ];
        for q in 0..3 {
            for e in 0..6 {
                assert_eq!(dense.get(q, e), expected[q][e], "T[{q}][{e}]");
            }
        }
    }

    #[test]
    fn forest_yields_empty_t() {
        let g = FunctionalGraph::new(3, vec![(0, 1), (1, 2)], vec![1.0, 1.0]).unwrap();
        let td = max_spanning_tree(&g);
        let t = cycle_incidence(&g, &td, CycleMethod::Treepath).unwrap();
        assert_eq!(t.q, 0);
        assert_eq!(t.matrix.nnz(), 0);
    }

    #[test]
    fn methods_agree_on_k4() {
        let (g, td) = k4_uniform();
        let a = cycle_incidence(&g, &td, CycleMethod::Treepath).unwrap();
        let b = cycle_incidence(&g, &td, CycleMethod::Nullspace).unwrap();
        assert_eq!(a.matrix, b.matrix);
    }

    #[test]
    fn triangle_adjacency_all_ones() {
        let g = triangle();
        let td = max_spanning_tree(&g);
        let t = cycle_incidence(&g, &td, CycleMethod::Treepath).unwrap();
        let l1 = build_hodge_l1(&build_b1(&g));
        let ae = edge_cycle_adjacency(&l1, &t).unwrap();
        let d = ae.matrix.to_dense();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(d.get(i, j), 1.0);
            }
        }
    }

    #[test]
    fn k4_shared_node_without_shared_cycle() {
        let (g, td) = k4_uniform();
        let t = cycle_incidence(&g, &td, CycleMethod::Treepath).unwrap();
        let l1 = build_hodge_l1(&build_b1(&g));
        let ae = edge_cycle_adjacency(&l1, &t).unwrap();
        // edges 3=(1,2) and 4=(1,3) share node 1 but no basis cycle
        assert_eq!(l1.matrix.get(3, 4).abs(), 1.0);
        assert_eq!(ae.matrix.get(3, 4), 0.0);
        assert_eq!(ae.matrix.get(4, 3), 0.0);
    }

    #[test]
    fn forest_adjacency_zero() {
        let g = FunctionalGraph::new(3, vec![(0, 1), (1, 2)], vec![1.0, 1.0]).unwrap();
        let td = max_spanning_tree(&g);
        let t = cycle_incidence(&g, &td, CycleMethod::Treepath).unwrap();
        let l1 = build_hodge_l1(&build_b1(&g));
        let ae = edge_cycle_adjacency(&l1, &t).unwrap();
        assert_eq!(ae.matrix.nnz(), 0);
    }

    #[test]
    fn combination_identity_and_zero() {
        let (g, td) = k4_uniform();
        let t = cycle_incidence(&g, &td, CycleMethod::Treepath).unwrap();
        assert_eq!(cycle_basis_combination(&t, &[1, 0, 0]).unwrap(), t.cycle_edges(0));
        assert!(cycle_basis_combination(&t, &[0, 0, 0]).unwrap().is_empty());
    }

    #[test]
    fn combination_cancels_shared_edge() {
        let (g, td) = k4_uniform();
        let t = cycle_incidence(&g, &td, CycleMethod::Treepath).unwrap();
        // rows 0 and 1 share edge 0 = (0,1); the sum is the 4-cycle on the rest
        let combined = cycle_basis_combination(&t, &[1, 1, 0]).unwrap();
        assert_eq!(combined, vec![1, 2, 3, 4]);
        assert!(is_simple_loop(&g, &combined));
    }

    #[test]
    fn loop_check_rejects_non_loops() {
        let g = triangle();
        assert!(!is_simple_loop(&g, &[0, 1])); // path, degree-1 endpoints
        assert!(is_simple_loop(&g, &[0, 1, 2]));
    }
}
