//! Pairwise geometry, heat-kernel similarities and bandwidth selection.

use ndarray::{Array2, ArrayView2, Axis};
use ndarray::parallel::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Result, SefError};

/// Number of equal-width bins over `[0, 1]` used by the spread criterion.
pub const HISTOGRAM_BINS: usize = 100;

/// Squared Euclidean distances between every pair of rows.
pub fn pairwise_sq_distances(y: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
    ensure_finite(y.iter().copied(), "input matrix")?;
    Ok(sq_distances_unchecked(y))
}

pub(crate) fn sq_distances_unchecked(y: ArrayView2<'_, f64>) -> Array2<f64> {
    let (n, m) = y.dim();
    let y = y.as_standard_layout();
    let flat = y.as_slice().expect("standard layout");
    let mut d = Array2::<f64>::zeros((n, n));
    d.axis_iter_mut(Axis(0))
        .into_par_iter()
        .enumerate()
        .for_each(|(i, mut row)| {
            let yi = &flat[i * m..(i + 1) * m];
            let row = row.as_slice_mut().expect("contiguous row");
            for (j, out) in row.iter_mut().enumerate() {
                if j != i {
                    let yj = &flat[j * m..(j + 1) * m];
                    *out = yi.iter().zip(yj).map(|(a, b)| (a - b) * (a - b)).sum();
                }
            }
        });
    d
}

/// Heat-kernel similarity `exp(-D_ij / sigma)` of a squared-distance matrix.
pub fn gaussian_similarity(d: ArrayView2<'_, f64>, sigma: f64) -> Result<Array2<f64>> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(SefError::InvalidParameter(format!(
            "similarity bandwidth must be positive and finite, got {sigma}"
        )));
    }
    if d.nrows() != d.ncols() {
        return Err(SefError::InvalidData(format!(
            "distance matrix must be square, got {}x{}",
            d.nrows(),
            d.ncols()
        )));
    }
    let mut s = d.mapv(|v| (-v / sigma).exp());
    s.diag_mut().fill(1.0);
    Ok(s)
}

/// Candidate bandwidths for the histogram-spread search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaGrid(Vec<f64>);

impl SigmaGrid {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(SefError::InvalidParameter("bandwidth grid is empty".into()));
        }
        if let Some(bad) = values.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
            return Err(SefError::InvalidParameter(format!(
                "bandwidth grid values must be positive, got {bad}"
            )));
        }
        Ok(Self(values))
    }

    /// `count` values spaced uniformly in log10 between `lo` and `hi`
    /// (both included exactly).
    pub fn log_uniform(lo: f64, hi: f64, count: usize) -> Result<Self> {
        if !(lo > 0.0) || !(hi >= lo) || count == 0 {
            return Err(SefError::InvalidParameter(format!(
                "invalid log grid [{lo}, {hi}] with {count} points"
            )));
        }
        if count == 1 {
            return Self::new(vec![lo]);
        }
        let (a, b) = (lo.log10(), hi.log10());
        let step = (b - a) / (count - 1) as f64;
        let mut values: Vec<f64> = (0..count).map(|i| 10f64.powf(a + step * i as f64)).collect();
        values[0] = lo;
        values[count - 1] = hi;
        Self::new(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn contains(&self, value: f64) -> bool {
        self.0.contains(&value)
    }
}

impl Default for SigmaGrid {
    /// 41 values from `1e-5` to `1e5`, four per decade.
    fn default() -> Self {
        Self::log_uniform(1e-5, 1e5, 41).expect("static grid is valid")
    }
}

/// A bandwidth that is either given or chosen by the spread heuristic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Bandwidth {
    Fixed(f64),
    Auto(SigmaGrid),
}

impl Bandwidth {
    pub fn auto() -> Self {
        Bandwidth::Auto(SigmaGrid::default())
    }

    /// Resolves the bandwidth against a squared-distance (or distance) matrix.
    pub fn resolve(&self, d: ArrayView2<'_, f64>) -> Result<f64> {
        match self {
            Bandwidth::Fixed(v) if *v > 0.0 && v.is_finite() => Ok(*v),
            Bandwidth::Fixed(v) => Err(SefError::InvalidParameter(format!(
                "bandwidth must be positive, got {v}"
            ))),
            Bandwidth::Auto(grid) => estimate_scaling_factor(d, grid),
        }
    }
}

/// Largest bin count of the 100-bin histogram of the off-diagonal entries of
/// `exp(-D / sigma)`. Only the upper triangle is counted; the matrix is
/// symmetric so this halves every bin without moving the argmin.
pub fn histogram_peak(d: ArrayView2<'_, f64>, sigma: f64) -> usize {
    let n = d.nrows();
    let mut bins = [0usize; HISTOGRAM_BINS];
    for i in 0..n {
        for j in (i + 1)..n {
            let s = (-d[[i, j]] / sigma).exp();
            let bin = ((s * HISTOGRAM_BINS as f64) as usize).min(HISTOGRAM_BINS - 1);
            bins[bin] += 1;
        }
    }
    bins.into_iter().max().unwrap_or(0)
}

/// Picks the grid value whose similarity histogram has the smallest peak,
/// i.e. the bandwidth that spreads the similarities the most. Ties go to the
/// smallest bandwidth.
pub fn estimate_scaling_factor(d: ArrayView2<'_, f64>, grid: &SigmaGrid) -> Result<f64> {
    if d.nrows() < 2 || d.nrows() != d.ncols() {
        return Err(SefError::InvalidData(format!(
            "bandwidth search needs a square matrix with at least 2 rows, got {}x{}",
            d.nrows(),
            d.ncols()
        )));
    }
    ensure_finite(d.iter().copied(), "distance matrix")?;
    let mut candidates: Vec<f64> = grid.values().to_vec();
    candidates.sort_by(f64::total_cmp);
    let peaks: Vec<usize> = candidates.par_iter().map(|&s| histogram_peak(d, s)).collect();
    let mut best = candidates[0];
    let mut best_peak = usize::MAX;
    for (sigma, peak) in candidates.into_iter().zip(peaks) {
        if peak < best_peak {
            best_peak = peak;
            best = sigma;
        }
    }
    Ok(best)
}

/// Symmetrized k-nearest-neighbour indicator (with unit diagonal).
/// Distance ties are broken by ascending sample index.
pub fn knn_indicator(x: ArrayView2<'_, f64>, k: usize) -> Result<Array2<bool>> {
    let n = x.nrows();
    if k == 0 || k >= n {
        return Err(SefError::InvalidParameter(format!(
            "neighbour count must lie in 1..{n}, got {k}"
        )));
    }
    ensure_finite(x.iter().copied(), "data matrix")?;
    let d = sq_distances_unchecked(x);
    let mut adj = Array2::from_elem((n, n), false);
    let mut order: Vec<usize> = Vec::with_capacity(n - 1);
    for i in 0..n {
        order.clear();
        order.extend((0..n).filter(|&j| j != i));
        order.sort_by(|&a, &b| d[[i, a]].total_cmp(&d[[i, b]]).then(a.cmp(&b)));
        for &j in &order[..k] {
            adj[[i, j]] = true;
            adj[[j, i]] = true;
        }
        adj[[i, i]] = true;
    }
    Ok(adj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn identical_rows_have_zero_distance() {
        let y = array![[1.5, -2.0], [1.5, -2.0]];
        let d = pairwise_sq_distances(y.view()).unwrap();
        assert_eq!(d, Array2::<f64>::zeros((2, 2)));
    }

    #[test]
    fn three_four_five() {
        let y = array![[0.0, 0.0], [3.0, 4.0]];
        let d = pairwise_sq_distances(y.view()).unwrap();
        assert_eq!(d[[0, 1]], 25.0);
        assert_eq!(d[[1, 0]], 25.0);
    }

    #[test]
    fn non_finite_input_is_rejected() {
        let y = array![[0.0, f64::NAN], [1.0, 2.0]];
        assert!(matches!(
            pairwise_sq_distances(y.view()),
            Err(SefError::InvalidData(_))
        ));
    }

    #[test]
    fn similarity_at_one_bandwidth_is_inverse_e() {
        let d = array![[0.0, 2.5], [2.5, 0.0]];
        let s = gaussian_similarity(d.view(), 2.5).unwrap();
        assert_eq!(s[[0, 0]], 1.0);
        assert!((s[[0, 1]] - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn similarity_rejects_bad_sigma() {
        let d = Array2::<f64>::zeros((2, 2));
        assert!(gaussian_similarity(d.view(), 0.0).is_err());
        assert!(gaussian_similarity(d.view(), -1.0).is_err());
    }

    #[test]
    fn default_grid_shape() {
        let g = SigmaGrid::default();
        assert_eq!(g.values().len(), 41);
        assert_eq!(g.values()[0], 1e-5);
        assert_eq!(g.values()[40], 1e5);
        assert!((g.values()[20] - 1.0).abs() < 1e-12);
        assert!(g.values().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn single_candidate_is_returned() {
        let d = array![[0.0, 1.0, 4.0], [1.0, 0.0, 1.0], [4.0, 1.0, 0.0]];
        let grid = SigmaGrid::new(vec![1.0]).unwrap();
        assert_eq!(estimate_scaling_factor(d.view(), &grid).unwrap(), 1.0);
    }

    #[test]
    fn empty_grid_is_rejected() {
        assert!(matches!(
            SigmaGrid::new(vec![]),
            Err(SefError::InvalidParameter(_))
        ));
    }

    #[test]
    fn ties_go_to_smallest_sigma() {
        // Two points: every sigma puts the single pair in exactly one bin.
        let d = array![[0.0, 1.0], [1.0, 0.0]];
        let grid = SigmaGrid::new(vec![10.0, 0.1, 1.0]).unwrap();
        assert_eq!(estimate_scaling_factor(d.view(), &grid).unwrap(), 0.1);
    }

    #[test]
    fn histogram_excludes_diagonal() {
        let d = array![[0.0, 1e9], [1e9, 0.0]];
        // Off-diagonal similarity is 0 -> one count in bin 0, diagonal ignored.
        assert_eq!(histogram_peak(d.view(), 1.0), 1);
    }
}
