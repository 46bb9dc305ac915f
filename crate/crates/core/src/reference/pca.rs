use ndarray::{s, Array1, Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use super::eigen::sym_eigh;
use crate::error::{ensure_dims, ensure_finite, Result, SefError};

/// Kernel eigenvalues at or below this make the unit-norm rescale undefined.
pub const KPCA_EIGEN_FLOOR: f64 = 1e-12;

/// Principal axes of a data matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pca {
    pub mean: Array1<f64>,
    /// `d × m`, orthonormal columns.
    pub components: Array2<f64>,
    /// Variance along each component, descending.
    pub variances: Array1<f64>,
}

impl Pca {
    pub fn transform(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        ensure_dims(self.mean.len(), x.ncols())?;
        Ok((&x - &self.mean).dot(&self.components))
    }
}

/// Top-`m` covariance eigenvectors (data is centered internally).
pub fn pca_fit(x: ArrayView2<'_, f64>, m: usize) -> Result<Pca> {
    let (n, d) = x.dim();
    if m == 0 || m > d {
        return Err(SefError::InvalidParameter(format!(
            "PCA dimensionality must lie in 1..={d}, got {m}"
        )));
    }
    if n == 0 {
        return Err(SefError::InvalidData("PCA needs at least one sample".into()));
    }
    ensure_finite(x.iter().copied(), "data matrix")?;
    let mean = x.mean_axis(Axis(0)).expect("non-empty");
    let centered = &x - &mean;
    let cov = centered.t().dot(&centered) / n as f64;
    let eig = sym_eigh(cov.view())?;
    Ok(Pca {
        mean,
        components: eig.eigenvectors.slice(s![.., ..m]).to_owned(),
        variances: eig.eigenvalues.slice(s![..m]).to_owned(),
    })
}

/// Top-`m` eigenvectors of an uncentered kernel matrix, each rescaled so
/// that `a_kᵀ K a_k = 1`.
pub fn kpca_fit(k: ArrayView2<'_, f64>, m: usize) -> Result<Array2<f64>> {
    let n = k.nrows();
    ensure_dims(n, k.ncols())?;
    if m == 0 || m > n {
        return Err(SefError::InvalidParameter(format!(
            "kernel PCA dimensionality must lie in 1..={n}, got {m}"
        )));
    }
    let eig = sym_eigh(k)?;
    let mut coef = eig.eigenvectors.slice(s![.., ..m]).to_owned();
    for (idx, mut col) in coef.columns_mut().into_iter().enumerate() {
        let lambda = eig.eigenvalues[idx];
        if !(lambda > KPCA_EIGEN_FLOOR) {
            return Err(SefError::DegenerateKernel { index: idx, value: lambda });
        }
        col /= lambda.sqrt();
    }
    Ok(coef)
}
