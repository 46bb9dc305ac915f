use ndarray::{Array2, ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::error::{ensure_dims, Result};
use crate::labels::Labels;

/// Class means; prediction picks the nearest one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NearestCentroid {
    /// `n_classes × d`
    pub centroids: Array2<f64>,
}

impl NearestCentroid {
    pub fn fit(x: ArrayView2<'_, f64>, labels: &Labels) -> Result<Self> {
        ensure_dims(x.nrows(), labels.len())?;
        let mut centroids = Array2::<f64>::zeros((labels.n_classes(), x.ncols()));
        for (c, members) in labels.members().iter().enumerate() {
            let mut row = centroids.row_mut(c);
            for &i in members {
                row += &x.row(i);
            }
            row /= members.len() as f64;
        }
        Ok(Self { centroids })
    }

    /// Nearest centroid by Euclidean distance, ties to the lowest class id.
    pub fn predict(&self, x: ArrayView1<'_, f64>) -> Result<usize> {
        ensure_dims(self.centroids.ncols(), x.len())?;
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (c, centroid) in self.centroids.rows().into_iter().enumerate() {
            let d: f64 = centroid.iter().zip(x.iter()).map(|(a, b)| (a - b) * (a - b)).sum();
            if d < best_d {
                best_d = d;
                best = c;
            }
        }
        Ok(best)
    }

    pub fn predict_all(&self, x: ArrayView2<'_, f64>) -> Result<Vec<usize>> {
        x.rows().into_iter().map(|r| self.predict(r)).collect()
    }
}

/// Fraction of matching entries.
pub fn accuracy(predicted: &[usize], truth: &[usize]) -> f64 {
    if truth.is_empty() {
        return 0.0;
    }
    let hits = predicted.iter().zip(truth).filter(|(a, b)| a == b).count();
    hits as f64 / truth.len() as f64
}
