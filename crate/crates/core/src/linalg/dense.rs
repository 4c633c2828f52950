//! Dense helpers used as small-system oracles and inside the eigensolver:
//! LU solve, generalized symmetric eigendecomposition via Cholesky.

use nalgebra::DMatrix;

use super::CsrMatrix;
use crate::{Error, Result};

pub fn to_dense(m: &CsrMatrix) -> DMatrix<f64> {
    let mut d = DMatrix::zeros(m.n_rows(), m.n_cols());
    for (i, j, v) in m.entries() {
        d[(i, j)] += v;
    }
    d
}

/// Solve a x = b by LU with partial pivoting.
pub fn lu_solve(a: &DMatrix<f64>, b: &[f64]) -> Result<Vec<f64>> {
    let n = a.nrows();
    assert_eq!(b.len(), n);
    let rhs = nalgebra::DVector::from_column_slice(b);
    a.clone()
        .lu()
        .solve(&rhs)
        .map(|x| x.as_slice().to_vec())
        .ok_or_else(|| Error::Numeric("LU solve failed: singular matrix".into()))
}

/// All eigenpairs of the symmetric-definite pencil A v = rho M v,
/// ascending. M must be symmetric positive definite.
///
/// Reduction: M = L L^T, B = L^{-1} A L^{-T}, eigen(B), v = L^{-T} y.
pub fn generalized_symmetric_eigen(
    a: &DMatrix<f64>,
    m: &DMatrix<f64>,
) -> Result<Vec<(f64, Vec<f64>)>> {
    let n = a.nrows();
    assert_eq!(m.nrows(), n);
    let chol = m
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Numeric("mass matrix is not positive definite".into()))?;
    let l = chol.l();
    // B = L^{-1} A L^{-T}
    let mut b = a.clone();
    l.solve_lower_triangular_mut(&mut b);
    let mut bt = b.transpose();
    l.solve_lower_triangular_mut(&mut bt);
    // symmetrize against rounding
    let b = (&bt + bt.transpose()) * 0.5;
    let eig = b.symmetric_eigen();
    let mut pairs: Vec<(f64, Vec<f64>)> = (0..n)
        .map(|k| {
            let y = eig.eigenvectors.column(k).into_owned();
            let v = l.transpose().solve_upper_triangular(&y).expect("L^T solve");
            (eig.eigenvalues[k], v.as_slice().to_vec())
        })
        .collect();
    pairs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    Ok(pairs)
}
