//! Column standardization fitted on training data and reused on new data.

use ndarray::{Array1, Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{ensure_dims, ensure_finite, Result, SefError};

/// Lower bound applied to per-column standard deviations.
pub const STD_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScalingMode {
    /// Zero mean, unit (population) variance per column.
    ZNormalize,
    /// Zero mean only.
    CenterOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreprocessStats {
    pub mode: ScalingMode,
    pub mean: Array1<f64>,
    /// All ones in center-only mode.
    pub std: Array1<f64>,
}

impl PreprocessStats {
    pub fn dims(&self) -> usize {
        self.mean.len()
    }
}

pub fn preprocess_fit(x: ArrayView2<'_, f64>, mode: ScalingMode) -> Result<PreprocessStats> {
    if x.nrows() == 0 {
        return Err(SefError::InvalidData("cannot fit scaling on an empty matrix".into()));
    }
    ensure_finite(x.iter().copied(), "data matrix")?;
    let mean = x.mean_axis(Axis(0)).expect("non-empty");
    let std = match mode {
        ScalingMode::ZNormalize => x.std_axis(Axis(0), 0.0).mapv(|s| s.max(STD_FLOOR)),
        ScalingMode::CenterOnly => Array1::ones(x.ncols()),
    };
    Ok(PreprocessStats { mode, mean, std })
}

pub fn preprocess_apply(x: ArrayView2<'_, f64>, stats: &PreprocessStats) -> Result<Array2<f64>> {
    ensure_dims(stats.dims(), x.ncols())?;
    ensure_finite(x.iter().copied(), "data matrix")?;
    let mut out = x.to_owned();
    for mut row in out.rows_mut() {
        for ((v, m), s) in row.iter_mut().zip(stats.mean.iter()).zip(stats.std.iter()) {
            *v = (*v - m) / s;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn two_point_znormalize() {
        let x = array![[1.0], [3.0]];
        let stats = preprocess_fit(x.view(), ScalingMode::ZNormalize).unwrap();
        let z = preprocess_apply(x.view(), &stats).unwrap();
        assert_eq!(z, array![[-1.0], [1.0]]);
    }

    #[test]
    fn constant_column_maps_to_zero() {
        let x = array![[5.0, 1.0], [5.0, 2.0], [5.0, 4.0]];
        let stats = preprocess_fit(x.view(), ScalingMode::ZNormalize).unwrap();
        assert_eq!(stats.std[0], STD_FLOOR);
        let z = preprocess_apply(x.view(), &stats).unwrap();
        assert!(z.column(0).iter().all(|v| *v == 0.0));
        assert!(z.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn center_only_keeps_scale() {
        let x = array![[1.0, 10.0], [3.0, 30.0]];
        let stats = preprocess_fit(x.view(), ScalingMode::CenterOnly).unwrap();
        let z = preprocess_apply(x.view(), &stats).unwrap();
        assert_eq!(z, array![[-1.0, -10.0], [1.0, 10.0]]);
    }

    #[test]
    fn held_out_rows_use_fit_stats() {
        let train = array![[0.0, 2.0], [2.0, 6.0], [4.0, 4.0]];
        let test = array![[1.0, 1.0], [-3.0, 7.5]];
        let stats = preprocess_fit(train.view(), ScalingMode::ZNormalize).unwrap();
        let z = preprocess_apply(test.view(), &stats).unwrap();

        // scalar oracle
        for c in 0..2 {
            let col: Vec<f64> = train.column(c).to_vec();
            let mean = col.iter().sum::<f64>() / 3.0;
            let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 3.0;
            for r in 0..2 {
                let expected = (test[[r, c]] - mean) / var.sqrt();
                assert!((z[[r, c]] - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn column_mismatch() {
        let x = array![[1.0, 2.0]];
        let stats = preprocess_fit(x.view(), ScalingMode::ZNormalize).unwrap();
        let bad = array![[1.0, 2.0, 3.0]];
        assert!(matches!(
            preprocess_apply(bad.view(), &stats),
            Err(SefError::DimensionMismatch { expected: 2, found: 3 })
        ));
    }
}
