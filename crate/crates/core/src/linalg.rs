//! Dense symmetric linear algebra helpers.
//!
//! Matrices are `nalgebra::DMatrix<f64>`; the symmetric eigensolver is backed
//! by `faer`, which is several times faster than nalgebra's on the
//! thousand-row Gram matrices produced by tree balls.

use faer::{Mat, Side};
use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Eigen-decomposition of a symmetric matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors, one per column, in the order of `values`.
    pub vectors: DMatrix<f64>,
}

fn to_faer(a: &DMatrix<f64>) -> Mat<f64> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

/// Full eigen-decomposition; only the lower triangle of `a` is read.
pub fn symmetric_eigen(a: &DMatrix<f64>) -> Result<SymmetricEigen> {
    let n = a.nrows();
    if n == 0 {
        return Ok(SymmetricEigen { values: vec![], vectors: DMatrix::zeros(0, 0) });
    }
    let evd = to_faer(a).self_adjoint_eigen(Side::Lower).map_err(|_| Error::EigenSolverFailed)?;
    let s = evd.S().column_vector();
    let u = evd.U();
    let values = (0..n).map(|i| s[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |i, j| u[(i, j)]);
    Ok(SymmetricEigen { values, vectors })
}

/// Eigenvalues only, ascending.
pub fn symmetric_eigenvalues(a: &DMatrix<f64>) -> Result<Vec<f64>> {
    if a.nrows() == 0 {
        return Ok(vec![]);
    }
    to_faer(a).self_adjoint_eigenvalues(Side::Lower).map_err(|_| Error::EigenSolverFailed)
}

/// Largest absolute entry.
pub fn max_abs(a: &DMatrix<f64>) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Largest `|a_ij - a_ji|`.
pub fn asymmetry(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..i {
            worst = worst.max((a[(i, j)] - a[(j, i)]).abs());
        }
    }
    worst
}

/// `(a + aᵀ) / 2`.
pub fn symmetrize(a: &DMatrix<f64>) -> DMatrix<f64> {
    (a + a.transpose()) * 0.5
}

/// The `m × m` forward shift `S δ_i = δ_{i+1}` (ones on the subdiagonal).
pub fn forward_shift(m: usize) -> DMatrix<f64> {
    DMatrix::from_fn(m, m, |i, j| if i == j + 1 { 1.0 } else { 0.0 })
}
