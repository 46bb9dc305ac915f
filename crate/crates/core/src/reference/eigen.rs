use nalgebra::{DMatrix, SymmetricEigen};
use ndarray::{Array1, Array2, ArrayView2};

use crate::error::{ensure_dims, ensure_finite, Result};

/// Eigenpairs of a symmetric matrix, sorted by descending eigenvalue.
///
/// Each eigenvector is unit length, and its largest-magnitude component
/// (first one on ties) is positive.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Array1<f64>,
    /// Eigenvectors as columns.
    pub eigenvectors: Array2<f64>,
}

/// Symmetric eigendecomposition of `(S + Sᵀ) / 2`.
pub fn sym_eigh(s: ArrayView2<'_, f64>) -> Result<EigenDecomposition> {
    let n = s.nrows();
    ensure_dims(n, s.ncols())?;
    ensure_finite(s.iter().copied(), "symmetric matrix")?;
    let sym = DMatrix::from_fn(n, n, |i, j| 0.5 * (s[[i, j]] + s[[j, i]]));
    let eig = SymmetricEigen::new(sym);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));

    let mut values = Array1::zeros(n);
    let mut vectors = Array2::zeros((n, n));
    for (dst, &src) in order.iter().enumerate() {
        values[dst] = eig.eigenvalues[src];
        let col = eig.eigenvectors.column(src);
        let mut pivot = 0;
        for i in 1..n {
            if col[i].abs() > col[pivot].abs() {
                pivot = i;
            }
        }
        let sign = if col[pivot] < 0.0 { -1.0 } else { 1.0 };
        for i in 0..n {
            vectors[[i, dst]] = sign * col[i];
        }
    }
    Ok(EigenDecomposition { eigenvalues: values, eigenvectors: vectors })
}
