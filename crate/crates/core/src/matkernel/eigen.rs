use nalgebra::{DMatrix, SymmetricEigen};

use super::{CMatrix, C64};
use crate::error::{Error, Result};

const HERMITIAN_TOLERANCE: f64 = 1e-8;

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: CMatrix,
}

/// Hermitian eigendecomposition. The input is symmetrized as `(A + A†)/2`
/// before decomposition; inputs further than 1e-8 from Hermitian are rejected.
pub fn eigh(a: &CMatrix) -> Result<HermitianEigen> {
    if !a.is_square() {
        return Err(Error::NonSquare { rows: a.rows(), cols: a.cols() });
    }
    let deviation = a.hermiticity_error();
    if !(deviation <= HERMITIAN_TOLERANCE) {
        return Err(Error::NotHermitian { deviation });
    }
    let n = a.rows();
    let sym = DMatrix::<C64>::from_fn(n, n, |i, j| (a[(i, j)] + a[(j, i)].conj()) * 0.5);
    let decomposition = SymmetricEigen::new(sym);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| decomposition.eigenvalues[i].total_cmp(&decomposition.eigenvalues[j]));
    let values = order.iter().map(|&i| decomposition.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| decomposition.eigenvectors[(i, order[j])]);
    Ok(HermitianEigen { values, vectors })
}
