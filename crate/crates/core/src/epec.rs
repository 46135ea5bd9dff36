//! Cycle-level Laplacian and edge positional encodings in cycles.
//!
//! Basis cycles become nodes of a cycle graph whose adjacency counts shared
//! edges. Eigenvectors of its Laplacian are positional encodings on cycles;
//! averaging each edge's incident cycle encodings projects them onto edges.

use crate::cycles::CycleIncidenceMatrix;
use crate::error::{CoreError, Result};
use crate::linalg::{symmetric_eigh, DMat, SpMat};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Eigenvalues at or below this are the trivial (per-component) kernel.
const TRIVIAL_EIG_TOL: f64 = 1e-8;

/// Q x Q cycle adjacency (shared-edge counts, zero diagonal), its degree
/// vector, and the Laplacian D_C - A_C.
#[derive(Clone, Debug, PartialEq)]
pub struct CycleLaplacian {
    pub a_c: SpMat,
    pub d_c: Vec<f64>,
    pub l_c: SpMat,
}

pub fn cycle_laplacian(t: &CycleIncidenceMatrix) -> Result<CycleLaplacian> {
    if t.q == 0 {
        return Err(CoreError::NoCycles(
            "cycle Laplacian needs at least one basis cycle".into(),
        ));
    }
    let gram = t.matrix.matmul(&t.matrix.transpose());
    let mut trip: Vec<(usize, usize, f64)> = Vec::new();
    for (r, c, v) in gram.triplets() {
        if r != c {
            trip.push((r, c, v));
        }
    }
    let a_c = SpMat::from_triplets(t.q, t.q, &trip);
    let d_c = a_c.row_sums();
    let mut ltrip = trip.iter().map(|&(r, c, v)| (r, c, -v)).collect::<Vec<_>>();
    for (i, &d) in d_c.iter().enumerate() {
        if d != 0.0 {
            ltrip.push((i, i, d));
        }
    }
    let l_c = SpMat::from_triplets(t.q, t.q, &ltrip);
    Ok(CycleLaplacian { a_c, d_c, l_c })
}

/// Cycle and edge positional encodings. `p_c` and `p_e` always have k
/// columns; when the cycle graph offers fewer than k non-trivial
/// eigenvectors the missing columns stay zero and `effective_k` records how
/// many are real. `eigenvalues` lists the non-trivial frequencies
/// (ascending, length `effective_k`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpecMatrix {
    pub p_c: DMat,
    pub p_e: DMat,
    pub eigenvalues: Vec<f64>,
    pub k: usize,
    pub effective_k: usize,
    /// Set when the graph has no cycles at all (Q == 0): every encoding is
    /// zero by construction.
    pub no_cycles: bool,
}

impl EpecMatrix {
    /// All-zero encodings for a graph without cycles.
    pub fn zeros(n_edges: usize, k: usize) -> Self {
        Self {
            p_c: DMat::zeros(0, k),
            p_e: DMat::zeros(n_edges, k),
            eigenvalues: Vec::new(),
            k,
            effective_k: 0,
            no_cycles: true,
        }
    }
}

/// Project the k smallest non-trivial cycle eigenvectors onto edges:
/// P_E = H_E^+ T^T P_C with H_E the per-edge cycle-count diagonal.
pub fn epec(t: &CycleIncidenceMatrix, cl: &CycleLaplacian, k: usize) -> Result<EpecMatrix> {
    if k == 0 {
        return Err(CoreError::InvalidInput("k must be at least 1".into()));
    }
    let (eigenvalues, vectors) = symmetric_eigh(&cl.l_c.to_dense())?;
    let nontrivial: Vec<usize> = (0..t.q)
        .filter(|&i| eigenvalues[i] > TRIVIAL_EIG_TOL)
        .collect();
    let effective_k = k.min(nontrivial.len());

    let mut p_c = DMat::zeros(t.q, k);
    let mut freq = Vec::with_capacity(effective_k);
    for (col, &src) in nontrivial.iter().take(effective_k).enumerate() {
        let mut v = vectors.col(src);
        canonicalize_sign(&mut v);
        for (row, &val) in v.iter().enumerate() {
            p_c.set(row, col, val);
        }
        freq.push(eigenvalues[src]);
    }

    // per-edge cycle counts (T^T T diagonal) without forming the product
    let mut counts = vec![0.0f64; t.e];
    for q in 0..t.q {
        for &e in t.cycle_edges(q) {
            counts[e] += 1.0;
        }
    }
    let mut p_e = DMat::zeros(t.e, k);
    for q in 0..t.q {
        for &e in t.cycle_edges(q) {
            for col in 0..effective_k {
                let add = p_c.get(q, col) / counts[e];
                p_e.set(e, col, p_e.get(e, col) + add);
            }
        }
    }

    Ok(EpecMatrix {
        p_c,
        p_e,
        eigenvalues: freq,
        k,
        effective_k,
        no_cycles: false,
    })
}

/// Full pipeline entry: handles the no-cycle case with zero encodings.
pub fn compute_epec(t: &CycleIncidenceMatrix, k: usize) -> Result<EpecMatrix> {
    if t.q == 0 {
        if k == 0 {
            return Err(CoreError::InvalidInput("k must be at least 1".into()));
        }
        return Ok(EpecMatrix::zeros(t.e, k));
    }
    let cl = cycle_laplacian(t)?;
    epec(t, &cl, k)
}

/// Make the first entry of largest absolute value positive.
fn canonicalize_sign(v: &mut [f64]) {
    let mut best = 0usize;
    for (i, &x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v[best] < 0.0 {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
}

#[derive(Serialize, Deserialize)]
pub struct EpecSidecar {
    pub k: usize,
    pub effective_k: usize,
    pub eigenvalues: Vec<f64>,
}

/// P_E as CSV (one row per edge, k columns) plus a JSON sidecar.
pub fn export_epec_csv(ep: &EpecMatrix, csv_path: &Path, sidecar_path: &Path) -> Result<()> {
    let mut out = String::new();
    for i in 0..ep.p_e.rows {
        let fields: Vec<String> = ep.p_e.row(i).iter().map(|v| format!("{v}")).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    std::fs::write(csv_path, out)?;
    let sidecar = EpecSidecar {
        k: ep.k,
        effective_k: ep.effective_k,
        eigenvalues: ep.eigenvalues.clone(),
    };
    std::fs::write(sidecar_path, serde_json::to_string_pretty(&sidecar).unwrap())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cycles::{cycle_incidence, CycleMethod};
    use crate::graph::{max_spanning_tree, FunctionalGraph};

    fn incidence(g: &FunctionalGraph) -> CycleIncidenceMatrix {
        let td = max_spanning_tree(g);
        cycle_incidence(g, &td, CycleMethod::Treepath).unwrap()
    }

    fn k4() -> FunctionalGraph {
        FunctionalGraph::new(
            4,
            vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)],
            vec![1.0; 6],
        )
        .unwrap()
    }

    #[test]
    fn single_cycle_trivial_laplacian() {
        let g = FunctionalGraph::new(3, vec![(0, 1), (0, 2), (1, 2)], vec![1.0; 3]).unwrap();
        let t = incidence(&g);
        let cl = cycle_laplacian(&t).unwrap();
        assert_eq!(cl.a_c.to_dense().data, vec![0.0]);
        assert_eq!(cl.l_c.to_dense().data, vec![0.0]);
    }

    #[test]
    fn k4_cycle_laplacian_is_3i_minus_j() {
        let t = incidence(&k4());
        let cl = cycle_laplacian(&t).unwrap();
        let d = cl.l_c.to_dense();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 2.0 } else { -1.0 };
                assert_eq!(d.get(i, j), expect);
            }
        }
        let (eigs, _) = symmetric_eigh(&d).unwrap();
        assert!(eigs[0].abs() < 1e-9);
        assert!((eigs[1] - 3.0).abs() < 1e-9);
        assert!((eigs[2] - 3.0).abs() < 1e-9);
    }

    #[test]
    fn disjoint_triangles_zero_adjacency() {
        let g = FunctionalGraph::new(
            6,
            vec![(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5)],
            vec![1.0; 6],
        )
        .unwrap();
        let t = incidence(&g);
        let cl = cycle_laplacian(&t).unwrap();
        assert_eq!(cl.a_c.nnz(), 0);
        assert_eq!(cl.l_c.nnz(), 0);
    }

    #[test]
    fn no_cycles_is_error_for_laplacian() {
        let g = FunctionalGraph::new(3, vec![(0, 1), (1, 2)], vec![1.0, 1.0]).unwrap();
        let t = incidence(&g);
        assert!(matches!(cycle_laplacian(&t), Err(CoreError::NoCycles(_))));
        let ep = compute_epec(&t, 4).unwrap();
        assert!(ep.no_cycles);
        assert_eq!(ep.p_e, DMat::zeros(2, 4));
    }

    #[test]
    fn triangle_pads_all_columns() {
        let g = FunctionalGraph::new(3, vec![(0, 1), (0, 2), (1, 2)], vec![1.0; 3]).unwrap();
        let t = incidence(&g);
        let ep = compute_epec(&t, 2).unwrap();
        assert_eq!(ep.effective_k, 0);
        assert_eq!(ep.p_e, DMat::zeros(3, 2));
        assert!(!ep.no_cycles);
    }

    #[test]
    fn k4_edge_encoding_is_mean_of_cycles() {
        let t = incidence(&k4());
        let ep = compute_epec(&t, 1).unwrap();
        assert_eq!(ep.effective_k, 1);
        assert!((ep.eigenvalues[0] - 3.0).abs() < 1e-9);
        // tree edges 0,1,2 average two cycles; extras copy one
        // edge 0=(0,1) is in cycles 0 and 1
        let expect0 = 0.5 * (ep.p_c.get(0, 0) + ep.p_c.get(1, 0));
        assert!((ep.p_e.get(0, 0) - expect0).abs() < 1e-12);
        // edge 3=(1,2) only in cycle 0
        assert!((ep.p_e.get(3, 0) - ep.p_c.get(0, 0)).abs() < 1e-12);
    }

    #[test]
    fn edge_outside_cycles_gets_zero_row() {
        // triangle plus a pendant edge (3 is a leaf)
        let g = FunctionalGraph::new(
            4,
            vec![(0, 1), (0, 2), (0, 3), (1, 2)],
            vec![1.0, 1.0, 1.0, 1.0],
        )
        .unwrap();
        let t = incidence(&g);
        let ep = compute_epec(&t, 3).unwrap();
        let pendant = g.edge_index(0, 3).unwrap();
        for col in 0..3 {
            assert_eq!(ep.p_e.get(pendant, col), 0.0);
        }
    }

    #[test]
    fn sign_canonicalization_deterministic() {
        let t = incidence(&k4());
        let a = compute_epec(&t, 2).unwrap();
        let b = compute_epec(&t, 2).unwrap();
        assert_eq!(a, b);
        for col in 0..a.effective_k {
            let column = a.p_c.col(col);
            let mut best = 0;
            for (i, v) in column.iter().enumerate() {
                if v.abs() > column[best].abs() {
                    best = i;
                }
            }
            assert!(column[best] > 0.0);
        }
    }
}
