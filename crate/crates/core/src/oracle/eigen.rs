//! Dense symmetric eigensolving with a residual check, and clustering of the
//! eigenvalues into a spectrum with multiplicities.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Eigenvalues clustered closer than this are one eigenvalue.
pub const CLUSTER_TOL: f64 = 1e-7;
const RESIDUAL_TOL: f64 = 1e-8;

/// All eigenvalues of a symmetric matrix, after checking
/// `|A v - lambda v| <= 1e-8 |v|` (scaled by the matrix norm) for every pair.
pub fn symmetric_eigenvalues(a: DMatrix<f64>) -> Result<Vec<f64>> {
    let scale = a.amax().max(1.0);
    let eig = SymmetricEigen::new(a.clone());
    let resid = &a * &eig.eigenvectors - &eig.eigenvectors * DMatrix::from_diagonal(&eig.eigenvalues);
    for (j, col) in resid.column_iter().enumerate() {
        let r = col.norm();
        let v = eig.eigenvectors.column(j).norm();
        if !(r <= RESIDUAL_TOL * scale * v) {
            return Err(Error::Oracle(format!("eigenpair {j} has residual {r:e}")));
        }
    }
    Ok(eig.eigenvalues.iter().copied().collect())
}

/// Eigenvalues without vectors, for checks that only need their range.
pub fn symmetric_eigenvalues_unchecked(a: DMatrix<f64>) -> Vec<f64> {
    a.symmetric_eigenvalues().iter().copied().collect()
}

/// Groups values that lie within `CLUSTER_TOL` of their neighbour, in
/// decreasing order. Errors when a gap falls between the tolerance and ten
/// times it, where the grouping would be ambiguous.
pub fn cluster(values: &[f64]) -> Result<Vec<(f64, usize)>> {
    let mut v = values.to_vec();
    v.sort_by(|a, b| b.total_cmp(a));
    let mut out: Vec<(Vec<f64>, usize)> = vec![];
    for (i, &x) in v.iter().enumerate() {
        if i > 0 {
            let gap = v[i - 1] - x;
            if gap > CLUSTER_TOL && gap < 10.0 * CLUSTER_TOL {
                return Err(Error::Oracle(format!("ambiguous eigenvalue cluster near {x} (gap {gap:e})")));
            }
            if gap <= CLUSTER_TOL {
                out.last_mut().expect("a cluster is open").0.push(x);
                continue;
            }
        }
        out.push((vec![x], 0));
    }
    Ok(out.into_iter().map(|(xs, _)| (xs.iter().sum::<f64>() / xs.len() as f64, xs.len())).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_matrix() {
        // path on 3 vertices: 0, +-sqrt(2)
        let a = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0]);
        let ev = symmetric_eigenvalues(a).unwrap();
        let cl = cluster(&ev).unwrap();
        assert_eq!(cl.len(), 3);
        assert!((cl[0].0 - 2f64.sqrt()).abs() < 1e-12);
        assert!(cl[1].0.abs() < 1e-12);
    }

    #[test]
    fn clustering() {
        let cl = cluster(&[1.0, 3.0, 1.0 + 1e-9, -2.0]).unwrap();
        assert_eq!(cl.iter().map(|c| c.1).collect::<Vec<_>>(), vec![1, 2, 1]);
        assert!(cluster(&[1.0, 1.0 + 5e-7]).is_err());
    }
}
