//! Target similarity / mask pairs. Each constructor selects a different
//! dimensionality-reduction behaviour for the same training objective.

use std::collections::HashMap;

use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::error::{ensure_dims, ensure_finite, Result, SefError};
use crate::labels::Labels;
use crate::similarity::{gaussian_similarity, knn_indicator, sq_distances_unchecked, Bandwidth};

/// Target similarities `T` and per-pair weights `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetPair {
    pub target: Array2<f64>,
    pub mask: Array2<f64>,
    /// Bandwidth used to build `target`, for kernels that need one.
    pub sigma: Option<f64>,
}

impl TargetPair {
    pub fn new(target: Array2<f64>, mask: Array2<f64>) -> Result<Self> {
        let pair = Self { target, mask, sigma: None };
        pair.validate()?;
        Ok(pair)
    }

    pub fn len(&self) -> usize {
        self.target.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.target.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.target.nrows();
        if self.target.ncols() != n {
            return Err(SefError::InvalidData("target matrix is not square".into()));
        }
        ensure_dims(n, self.mask.nrows())?;
        ensure_dims(n, self.mask.ncols())?;
        for i in 0..n {
            for j in 0..n {
                let t = self.target[[i, j]];
                if !(0.0..=1.0).contains(&t) {
                    return Err(SefError::InvalidData(format!(
                        "target entry ({i}, {j}) = {t} outside [0, 1]"
                    )));
                }
                if t != self.target[[j, i]] {
                    return Err(SefError::InvalidData(format!(
                        "target is not symmetric at ({i}, {j})"
                    )));
                }
                let m = self.mask[[i, j]];
                if !(0.0..=1.0).contains(&m) {
                    return Err(SefError::InvalidMask(format!(
                        "mask entry ({i}, {j}) = {m} outside [0, 1]"
                    )));
                }
            }
        }
        if self.mask.sum() <= 0.0 {
            return Err(SefError::InvalidMask("mask has zero 1-norm".into()));
        }
        Ok(())
    }
}

fn require_rows(n: usize) -> Result<()> {
    if n < 2 {
        Err(SefError::InvalidParameter(format!(
            "a target needs at least 2 samples, got {n}"
        )))
    } else {
        Ok(())
    }
}

/// All-zero target with a unit mask: spreads the embedding out, PCA-like.
/// The diagonal stays zero; `P_ii = 1` always, so those entries add a
/// constant to the loss and nothing to the gradient.
pub fn target_pca(n: usize) -> Result<TargetPair> {
    require_rows(n)?;
    Ok(TargetPair {
        target: Array2::zeros((n, n)),
        mask: Array2::ones((n, n)),
        sigma: None,
    })
}

/// Same-class pairs get similarity 1, others 0. Cross-class pairs are
/// down-weighted by `1 / (n_classes - 1)` so both halves of the objective
/// carry comparable weight.
pub fn target_lda(labels: &Labels) -> Result<TargetPair> {
    require_rows(labels.len())?;
    labels.require_multiclass()?;
    let n = labels.len();
    let cross = 1.0 / (labels.n_classes() - 1) as f64;
    let ids = labels.ids();
    let target = Array2::from_shape_fn((n, n), |(i, j)| if ids[i] == ids[j] { 1.0 } else { 0.0 });
    let mask = Array2::from_shape_fn((n, n), |(i, j)| if ids[i] == ids[j] { 1.0 } else { cross });
    Ok(TargetPair { target, mask, sigma: None })
}

/// Neighbours get similarity 1; everybody else keeps their input-space
/// heat-kernel similarity with bandwidth `sigma_le`.
pub fn target_le(x: ArrayView2<'_, f64>, k: usize, sigma_le: f64) -> Result<TargetPair> {
    require_rows(x.nrows())?;
    let adj = knn_indicator(x, k)?;
    let original = gaussian_similarity(sq_distances_unchecked(x).view(), sigma_le)?;
    let n = x.nrows();
    let target = Array2::from_shape_fn((n, n), |(i, j)| if adj[[i, j]] { 1.0 } else { original[[i, j]] });
    Ok(TargetPair {
        target,
        mask: Array2::ones((n, n)),
        sigma: Some(sigma_le),
    })
}

/// Neighbours pulled together (1), non-neighbours pushed apart (0).
pub fn target_lap_pca(x: ArrayView2<'_, f64>, k: usize) -> Result<TargetPair> {
    target_lap_pca_weighted(x, k, 1.0)
}

/// [`target_lap_pca`] with mask weight `non_neighbor_weight` on the
/// non-neighbour pairs.
pub fn target_lap_pca_weighted(
    x: ArrayView2<'_, f64>,
    k: usize,
    non_neighbor_weight: f64,
) -> Result<TargetPair> {
    require_rows(x.nrows())?;
    if !(non_neighbor_weight > 0.0 && non_neighbor_weight <= 1.0) {
        return Err(SefError::InvalidParameter(format!(
            "non-neighbour weight must lie in (0, 1], got {non_neighbor_weight}"
        )));
    }
    let adj = knn_indicator(x, k)?;
    let target = adj.mapv(|a| if a { 1.0 } else { 0.0 });
    let mask = adj.mapv(|a| if a { 1.0 } else { non_neighbor_weight });
    Ok(TargetPair { target, mask, sigma: None })
}

/// Heat-kernel similarities of an existing embedding `g` (one row per
/// training sample), so the learned projection imitates that embedding.
pub fn target_clone(g: ArrayView2<'_, f64>, sigma_copy: &Bandwidth) -> Result<TargetPair> {
    require_rows(g.nrows())?;
    ensure_finite(g.iter().copied(), "embedding")?;
    let d = sq_distances_unchecked(g);
    let sigma = sigma_copy.resolve(d.view())?;
    let target = gaussian_similarity(d.view(), sigma)?;
    let n = g.nrows();
    Ok(TargetPair {
        target,
        mask: Array2::ones((n, n)),
        sigma: Some(sigma),
    })
}

/// Source of per-sample decision values for one-vs-one class-pair models.
///
/// `decision(a, b, i)` is the value of the model separating classes `a` and
/// `b` at training sample `i`, or `None` when no such model exists. The
/// result must not depend on the order of `a` and `b`.
pub trait PairwiseDecisions {
    fn decision(&self, a: usize, b: usize, sample: usize) -> Option<f64>;
}

/// Precomputed decision values keyed by the unordered class pair.
#[derive(Debug, Clone, Default)]
pub struct DecisionTable {
    values: HashMap<(usize, usize), Vec<f64>>,
}

impl DecisionTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, a: usize, b: usize, values: Vec<f64>) {
        self.values.insert((a.min(b), a.max(b)), values);
    }
}

impl PairwiseDecisions for DecisionTable {
    fn decision(&self, a: usize, b: usize, sample: usize) -> Option<f64> {
        self.values
            .get(&(a.min(b), a.max(b)))
            .and_then(|v| v.get(sample).copied())
    }
}

/// How same-class pairs are measured when building the SVM distance matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SameClassRule {
    /// Smallest decision difference over every model that involves the class.
    #[default]
    MinOverModels,
    /// Same-class pairs are treated as identical (distance 0).
    Zero,
}

/// Pairwise distances induced by one-vs-one decision values:
/// `|f_ab(x_i) - f_ab(x_j)|` with `(a, b)` the classes of `i` and `j`.
pub fn svm_distances(
    decisions: &impl PairwiseDecisions,
    labels: &Labels,
    rule: SameClassRule,
) -> Result<Array2<f64>> {
    labels.require_multiclass()?;
    let n = labels.len();
    let nc = labels.n_classes();
    let lookup = |a: usize, b: usize, i: usize| -> Result<f64> {
        decisions
            .decision(a, b, i)
            .filter(|v| v.is_finite())
            .ok_or(SefError::MissingModel(a.min(b), a.max(b)))
    };
    // Each sample's values under every model, indexed [class pair][sample].
    let mut per_model = vec![vec![Vec::new(); nc]; nc];
    for a in 0..nc {
        for b in (a + 1)..nc {
            let vals = (0..n).map(|i| lookup(a, b, i)).collect::<Result<Vec<_>>>()?;
            per_model[a][b] = vals.clone();
            per_model[b][a] = vals;
        }
    }
    let mut d = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        for j in (i + 1)..n {
            let (ci, cj) = (labels.get(i), labels.get(j));
            let v = if ci != cj {
                (per_model[ci][cj][i] - per_model[ci][cj][j]).abs()
            } else {
                match rule {
                    SameClassRule::Zero => 0.0,
                    SameClassRule::MinOverModels => (0..nc)
                        .filter(|&o| o != ci)
                        .map(|o| (per_model[ci][o][i] - per_model[ci][o][j]).abs())
                        .fold(f64::INFINITY, f64::min),
                }
            };
            d[[i, j]] = v;
            d[[j, i]] = v;
        }
    }
    Ok(d)
}

/// `T = exp(-D_svm / sigma_svm)` from one-vs-one decision values.
pub fn target_svm(
    decisions: &impl PairwiseDecisions,
    labels: &Labels,
    sigma_svm: &Bandwidth,
) -> Result<TargetPair> {
    target_svm_with_rule(decisions, labels, sigma_svm, SameClassRule::default())
}

pub fn target_svm_with_rule(
    decisions: &impl PairwiseDecisions,
    labels: &Labels,
    sigma_svm: &Bandwidth,
    rule: SameClassRule,
) -> Result<TargetPair> {
    require_rows(labels.len())?;
    let d = svm_distances(decisions, labels, rule)?;
    let sigma = sigma_svm.resolve(d.view())?;
    let target = gaussian_similarity(d.view(), sigma)?;
    let n = labels.len();
    Ok(TargetPair {
        target,
        mask: Array2::ones((n, n)),
        sigma: Some(sigma),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn pca_target_is_zero_with_unit_mask() {
        let t = target_pca(3).unwrap();
        assert_eq!(t.target, Array2::<f64>::zeros((3, 3)));
        assert!(t.mask.iter().all(|m| *m == 1.0));
        assert_eq!(target_pca(2).unwrap().mask.sum(), 4.0);
        assert!(target_pca(1).is_err());
    }

    #[test]
    fn lda_two_classes() {
        let labels = Labels::new(vec![0, 0, 1]).unwrap();
        let t = target_lda(&labels).unwrap();
        assert_eq!(t.target, array![[1.0, 1.0, 0.0], [1.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
        assert_eq!(t.mask, Array2::<f64>::ones((3, 3)));
    }

    #[test]
    fn lda_three_classes_halves_cross_weight() {
        let labels = Labels::new(vec![0, 1, 2, 1]).unwrap();
        let t = target_lda(&labels).unwrap();
        assert_eq!(t.mask[[0, 1]], 0.5);
        assert_eq!(t.mask[[1, 3]], 1.0);
        assert_eq!(t.mask[[2, 3]], 0.5);
    }

    #[test]
    fn lda_single_class_fails() {
        let labels = Labels::new(vec![0, 0, 0]).unwrap();
        assert!(matches!(target_lda(&labels), Err(SefError::InvalidLabels(_))));
    }

    #[test]
    fn le_full_neighbourhood_is_all_ones() {
        let x = array![[0.0], [1.0], [5.0], [11.0]];
        let t = target_le(x.view(), 3, 1.0).unwrap();
        assert!(t.target.iter().all(|v| *v == 1.0));
    }

    #[test]
    fn le_non_neighbour_uses_heat_kernel() {
        // 0 and 3 are far apart; with k = 1 they are not neighbours.
        let x = array![[0.0], [0.1], [2.9], [3.0]];
        let t = target_le(x.view(), 1, 9.0).unwrap();
        assert!((t.target[[0, 3]] - (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(t.target[[0, 1]], 1.0);
    }

    #[test]
    fn neighbour_count_range() {
        let x = array![[0.0], [1.0], [2.0]];
        assert!(target_le(x.view(), 0, 1.0).is_err());
        assert!(target_lap_pca(x.view(), 3).is_err());
    }

    #[test]
    fn lap_pca_non_neighbours_are_zero() {
        let x = array![[0.0], [0.1], [2.9], [3.0]];
        let t = target_lap_pca(x.view(), 1).unwrap();
        assert_eq!(t.target[[0, 3]], 0.0);
        assert_eq!(t.target[[2, 3]], 1.0);
        let full = target_lap_pca(x.view(), 3).unwrap();
        assert!(full.target.iter().all(|v| *v == 1.0));
    }

    #[test]
    fn lap_pca_weighted_mask() {
        let x = array![[0.0], [0.1], [2.9], [3.0]];
        let t = target_lap_pca_weighted(x.view(), 1, 0.25).unwrap();
        assert_eq!(t.mask[[0, 3]], 0.25);
        assert_eq!(t.mask[[0, 1]], 1.0);
    }

    #[test]
    fn clone_duplicates_and_analytic_pair() {
        let g = array![[1.0, 2.0], [1.0, 2.0], [1.0, 4.0]];
        let t = target_clone(g.view(), &Bandwidth::Fixed(4.0)).unwrap();
        assert_eq!(t.target[[0, 1]], 1.0);
        assert!((t.target[[0, 2]] - (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(t.sigma, Some(4.0));
        assert!(target_clone(g.view(), &Bandwidth::Fixed(0.0)).is_err());
    }

    #[test]
    fn svm_target_analytic_pair() {
        let labels = Labels::new(vec![0, 1]).unwrap();
        let mut table = DecisionTable::new();
        table.insert(0, 1, vec![1.0, -1.0]);
        let t = target_svm(&table, &labels, &Bandwidth::Fixed(0.5)).unwrap();
        assert_eq!(t.target[[0, 0]], 1.0);
        assert!((t.target[[0, 1]] - (-2.0f64 / 0.5).exp()).abs() < 1e-15);
    }

    #[test]
    fn svm_target_missing_model() {
        let labels = Labels::new(vec![0, 1, 2]).unwrap();
        let mut table = DecisionTable::new();
        table.insert(0, 1, vec![1.0, -1.0, 0.0]);
        table.insert(1, 2, vec![1.0, -1.0, 0.0]);
        assert!(matches!(
            target_svm(&table, &labels, &Bandwidth::Fixed(1.0)),
            Err(SefError::MissingModel(0, 2))
        ));
    }

    #[test]
    fn svm_same_class_rules() {
        let labels = Labels::new(vec![0, 0, 1, 2]).unwrap();
        let mut table = DecisionTable::new();
        table.insert(0, 1, vec![2.0, 1.5, -1.0, 0.0]);
        table.insert(0, 2, vec![3.0, 0.0, 0.0, -1.0]);
        table.insert(1, 2, vec![0.0, 0.0, 1.0, -1.0]);
        let d = svm_distances(&table, &labels, SameClassRule::MinOverModels).unwrap();
        assert_eq!(d[[0, 1]], 0.5);
        let z = svm_distances(&table, &labels, SameClassRule::Zero).unwrap();
        assert_eq!(z[[0, 1]], 0.0);
        // cross-class pair (1, 3) uses the (0, 2) model
        assert_eq!(d[[1, 3]], 1.0);
    }

    #[test]
    fn validate_catches_bad_mask() {
        let t = Array2::<f64>::eye(2);
        assert!(matches!(
            TargetPair::new(t.clone(), Array2::zeros((2, 2))),
            Err(SefError::InvalidMask(_))
        ));
        assert!(TargetPair::new(t, Array2::from_elem((2, 2), 2.0)).is_err());
    }
}
