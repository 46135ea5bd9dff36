//! Per-sample model input assembled from the topology pipeline.

use crate::cycles::{cycle_incidence, edge_cycle_adjacency, CycleMethod, EdgeCycleAdjacency};
use crate::epec::compute_epec;
use crate::error::{CoreError, Result};
use crate::graph::{
    build_b1, build_hodge_l1, max_spanning_tree, threshold_graph, ConnectivityMatrix,
    FunctionalGraph,
};

/// One graph sample ready for the network: edge features, positional
/// encodings, the attention neighborhoods from A_E, and the mapping of each
/// edge into the upper-triangle vectorization.
#[derive(Clone, Debug)]
pub struct EdgeBatch {
    pub neighborhoods: Vec<Vec<usize>>,
    /// Prefix offsets of the flattened neighborhood lists (length E+1);
    /// attention coefficients are cached in this layout.
    pub nb_ptr: Vec<usize>,
    /// E x input_dim, row-major.
    pub x_e: Vec<f64>,
    pub input_dim: usize,
    /// E x k, row-major.
    pub p_e: Vec<f64>,
    pub k: usize,
    pub label: u8,
    /// Upper-triangle slot per edge.
    pub slots: Vec<usize>,
    pub n_nodes: usize,
    pub n_edges: usize,
}

impl EdgeBatch {
    pub fn new(
        graph: &FunctionalGraph,
        adjacency: &EdgeCycleAdjacency,
        p_e: Vec<f64>,
        k: usize,
        label: u8,
    ) -> Result<Self> {
        let e = graph.n_edges();
        if adjacency.n_edges() != e {
            return Err(CoreError::DimensionMismatch(format!(
                "adjacency over {} edges, graph has {e}",
                adjacency.n_edges()
            )));
        }
        if p_e.len() != e * k {
            return Err(CoreError::DimensionMismatch(format!(
                "encodings have {} values, expected {e} x {k}",
                p_e.len()
            )));
        }
        let slots = (0..e).map(|i| graph.upper_triangle_slot(i)).collect();
        let neighborhoods = adjacency.neighborhoods();
        let mut nb_ptr = Vec::with_capacity(e + 1);
        nb_ptr.push(0);
        for nb in &neighborhoods {
            nb_ptr.push(nb_ptr.last().unwrap() + nb.len());
        }
        Ok(Self {
            neighborhoods,
            nb_ptr,
            x_e: graph.edge_signals.clone(),
            input_dim: 1,
            p_e,
            k,
            label,
            slots,
            n_nodes: graph.n_nodes,
            n_edges: e,
        })
    }

    #[inline]
    pub fn x_row(&self, e: usize) -> &[f64] {
        &self.x_e[e * self.input_dim..(e + 1) * self.input_dim]
    }

    #[inline]
    pub fn p_row(&self, e: usize) -> &[f64] {
        &self.p_e[e * self.k..(e + 1) * self.k]
    }
}

/// Run the full topology pipeline on one connectivity matrix.
pub fn prepare_sample(
    cm: &ConnectivityMatrix,
    label: u8,
    quantile: f64,
    k: usize,
) -> Result<EdgeBatch> {
    let graph = threshold_graph(cm, quantile)?;
    let td = max_spanning_tree(&graph);
    let t = cycle_incidence(&graph, &td, CycleMethod::Treepath)?;
    let l1 = build_hodge_l1(&build_b1(&graph));
    let a_e = edge_cycle_adjacency(&l1, &t)?;
    let ep = compute_epec(&t, k)?;
    EdgeBatch::new(&graph, &a_e, ep.p_e.data, k, label)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_batch_shapes() {
        let cm = ConnectivityMatrix::new(vec![
            vec![0.0, 0.9, 0.5],
            vec![0.9, 0.0, 0.1],
            vec![0.5, 0.1, 0.0],
        ])
        .unwrap();
        let b = prepare_sample(&cm, 1, 1.0, 4).unwrap();
        assert_eq!(b.n_edges, 3);
        assert_eq!(b.x_e, vec![0.9, 0.5, 0.1]);
        assert_eq!(b.neighborhoods.len(), 3);
        assert_eq!(b.neighborhoods[0], vec![0, 1, 2]);
        assert_eq!(b.slots, vec![0, 1, 2]);
    }
}
