//! Symmetric eigendecomposition via cyclic Jacobi rotations.
//!
//! Adequate for the matrix sizes in this pipeline (cycle Laplacians and
//! per-cycle Hodge Laplacians, a few hundred rows at most) and fully
//! deterministic: fixed sweep order, no pivoting heuristics.

use super::dense::DMat;
use crate::error::{CoreError, Result};

const SYMMETRY_TOL: f64 = 1e-10;
const MAX_SWEEPS: usize = 100;

/// Decompose a symmetric matrix into eigenvalues (ascending) and orthonormal
/// eigenvectors (columns of the returned matrix, matching eigenvalue order).
pub fn symmetric_eigh(m: &DMat) -> Result<(Vec<f64>, DMat)> {
    if m.rows != m.cols {
        return Err(CoreError::DimensionMismatch(format!(
            "eigh expects a square matrix, got {}x{}",
            m.rows, m.cols
        )));
    }
    let dev = m.symmetry_deviation();
    if dev > SYMMETRY_TOL {
        return Err(CoreError::NotSymmetric(dev));
    }
    let n = m.rows;
    if n == 0 {
        return Ok((Vec::new(), DMat::zeros(0, 0)));
    }

    let mut a = m.clone();
    // enforce exact symmetry so rotations stay consistent
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (a.get(i, j) + a.get(j, i));
            a.set(i, j, v);
            a.set(j, i, v);
        }
    }
    let mut v = DMat::identity(n);
    let scale = a.max_abs().max(1.0);
    let tol = 1e-14 * scale;

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a.get(p, q).abs();
            }
        }
        if off <= tol * (n as f64) {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                if apq.abs() <= tol * 1e-2 {
                    continue;
                }
                let app = a.get(p, p);
                let aqq = a.get(q, q);
                let theta = 0.5 * (aqq - app) / apq;
                let t = if theta.abs() > 1e12 {
                    0.5 / theta
                } else {
                    let s = theta.signum();
                    s / (theta.abs() + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // rows/cols p and q of A
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, c * akp - s * akq);
                    a.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, c * apk - s * aqk);
                    a.set(q, k, s * apk + c * aqk);
                }
                // accumulate rotations into V
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }
    if !converged {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a.get(p, q).abs();
            }
        }
        return Err(CoreError::EigenNonConvergence { n, residual: off });
    }

    let mut order: Vec<usize> = (0..n).collect();
    let eig: Vec<f64> = (0..n).map(|i| a.get(i, i)).collect();
    order.sort_by(|&i, &j| eig[i].partial_cmp(&eig[j]).unwrap());

    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig[i]).collect();
    let mut vectors = DMat::zeros(n, n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for r in 0..n {
            vectors.set(r, new_col, v.get(r, old_col));
        }
    }

    verify_residuals(m, &eigenvalues, &vectors)?;
    Ok((eigenvalues, vectors))
}

fn verify_residuals(m: &DMat, eigenvalues: &[f64], vectors: &DMat) -> Result<()> {
    let n = m.rows;
    let norm_bound = eigenvalues
        .iter()
        .fold(0.0f64, |acc, &l| acc.max(l.abs()))
        .max(1.0);
    for (k, &lambda) in eigenvalues.iter().enumerate() {
        let mut res = 0.0f64;
        for i in 0..n {
            let mut mv = 0.0;
            for j in 0..n {
                mv += m.get(i, j) * vectors.get(j, k);
            }
            let r = mv - lambda * vectors.get(i, k);
            res += r * r;
        }
        let res = res.sqrt();
        if res > 1e-8 * norm_bound {
            return Err(CoreError::EigenNonConvergence { n, residual: res });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_eigenvalues() {
        let (l, _) = symmetric_eigh(&DMat::identity(3)).unwrap();
        for v in l {
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn diagonal_sorted_ascending() {
        let m = DMat::from_rows(&[
            vec![3.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 2.0],
        ]);
        let (l, _) = symmetric_eigh(&m).unwrap();
        assert!((l[0] - 1.0).abs() < 1e-12);
        assert!((l[1] - 2.0).abs() < 1e-12);
        assert!((l[2] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_asymmetric() {
        let m = DMat::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]);
        assert!(matches!(symmetric_eigh(&m), Err(CoreError::NotSymmetric(_))));
    }

    #[test]
    fn reconstruction_on_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..50 {
            let n = 2 + (trial % 29);
            let mut m = DMat::zeros(n, n);
            for i in 0..n {
                for j in i..n {
                    let v = rng.random_range(-1.0..1.0);
                    m.set(i, j, v);
                    m.set(j, i, v);
                }
            }
            let (l, v) = symmetric_eigh(&m).unwrap();
            // M == V diag(l) V^T
            let mut recon = DMat::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    let mut s = 0.0;
                    for k in 0..n {
                        s += v.get(i, k) * l[k] * v.get(j, k);
                    }
                    recon.set(i, j, s);
                }
            }
            let mut diff = 0.0f64;
            let mut norm = 0.0f64;
            for idx in 0..n * n {
                diff += (recon.data[idx] - m.data[idx]).powi(2);
                norm += m.data[idx].powi(2);
            }
            assert!(
                diff.sqrt() <= 1e-7 * norm.sqrt().max(1.0),
                "reconstruction failed at n={n}: {} vs {}",
                diff.sqrt(),
                norm.sqrt()
            );
        }
    }

    #[test]
    fn deterministic_for_fixed_input() {
        let m = DMat::from_rows(&[
            vec![2.0, -1.0, 0.3],
            vec![-1.0, 1.5, 0.7],
            vec![0.3, 0.7, -0.5],
        ]);
        let (l1, v1) = symmetric_eigh(&m).unwrap();
        let (l2, v2) = symmetric_eigh(&m).unwrap();
        assert_eq!(l1, l2);
        assert_eq!(v1, v2);
    }
}
