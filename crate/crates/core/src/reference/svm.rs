use ndarray::{Array1, ArrayView1, ArrayView2};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_dims, ensure_finite, Result, SefError};
use crate::labels::Labels;
use crate::targets::DecisionTable;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmParams {
    /// Soft-margin constant; the per-pair regularizer is `1 / (C · n_pair)`.
    pub c: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for SvmParams {
    fn default() -> Self {
        Self { c: 1.0, epochs: 200, seed: 42 }
    }
}

/// Binary linear classifier separating `positive` (+1) from `negative` (-1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearSvm {
    pub weights: Array1<f64>,
    pub bias: f64,
    pub positive: usize,
    pub negative: usize,
}

impl LinearSvm {
    /// Raw decision value `wᵀx + b` (not divided by `‖w‖`).
    pub fn decision(&self, x: ArrayView1<'_, f64>) -> f64 {
        self.weights.dot(&x) + self.bias
    }

    /// Hinge-loss subgradient descent with step `1 / (λ t)`. The bias is
    /// handled as an extra constant feature.
    fn train(
        x: ArrayView2<'_, f64>,
        samples: &[(usize, f64)],
        positive: usize,
        negative: usize,
        params: &SvmParams,
        rng: &mut ChaCha8Rng,
    ) -> Self {
        let d = x.ncols();
        let lambda = 1.0 / (params.c * samples.len() as f64);
        let radius = 1.0 / lambda.sqrt();
        let mut w = Array1::<f64>::zeros(d);
        let mut b = 0.0;
        let mut order: Vec<usize> = (0..samples.len()).collect();
        let mut t = 0u64;
        for _ in 0..params.epochs {
            order.shuffle(rng);
            for &idx in &order {
                t += 1;
                let (row, y) = samples[idx];
                let xi = x.row(row);
                let eta = 1.0 / (lambda * t as f64);
                let margin = y * (w.dot(&xi) + b);
                let shrink = 1.0 - eta * lambda;
                w *= shrink;
                b *= shrink;
                if margin < 1.0 {
                    w.scaled_add(eta * y, &xi);
                    b += eta * y;
                }
                let norm = (w.dot(&w) + b * b).sqrt();
                if norm > radius {
                    let f = radius / norm;
                    w *= f;
                    b *= f;
                }
            }
        }
        Self { weights: w, bias: b, positive, negative }
    }
}

/// One linear model per unordered class pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OvoSvmSet {
    pub n_classes: usize,
    /// Ordered by `(positive, negative)` with `positive < negative`.
    pub models: Vec<LinearSvm>,
}

impl OvoSvmSet {
    pub fn model(&self, a: usize, b: usize) -> Option<&LinearSvm> {
        let (lo, hi) = (a.min(b), a.max(b));
        self.models.iter().find(|m| m.positive == lo && m.negative == hi)
    }

    /// Decision value of the `(a, b)` model at `x`.
    pub fn svm_decision(&self, a: usize, b: usize, x: ArrayView1<'_, f64>) -> Result<f64> {
        self.model(a, b)
            .map(|m| m.decision(x))
            .ok_or(SefError::MissingModel(a.min(b), a.max(b)))
    }

    /// Majority vote over all pair models; ties go to the lowest class id.
    pub fn predict(&self, x: ArrayView1<'_, f64>) -> usize {
        let mut votes = vec![0usize; self.n_classes];
        for m in &self.models {
            if m.decision(x) >= 0.0 {
                votes[m.positive] += 1;
            } else {
                votes[m.negative] += 1;
            }
        }
        let best = votes.iter().copied().max().unwrap_or(0);
        votes.iter().position(|&v| v == best).unwrap_or(0)
    }

    /// Decision values of every model on every row of `x`.
    pub fn decision_table(&self, x: ArrayView2<'_, f64>) -> Result<DecisionTable> {
        let mut table = DecisionTable::new();
        for m in &self.models {
            ensure_dims(m.weights.len(), x.ncols())?;
            table.insert(m.positive, m.negative, x.rows().into_iter().map(|r| m.decision(r)).collect());
        }
        Ok(table)
    }
}

/// Trains `n_classes (n_classes - 1) / 2` linear hinge-loss models.
pub fn svm_ovo_fit(x: ArrayView2<'_, f64>, labels: &Labels, params: &SvmParams) -> Result<OvoSvmSet> {
    ensure_dims(x.nrows(), labels.len())?;
    labels.require_multiclass()?;
    ensure_finite(x.iter().copied(), "data matrix")?;
    if !(params.c > 0.0) || params.epochs == 0 {
        return Err(SefError::InvalidParameter(format!(
            "SVM needs C > 0 and at least one epoch, got C = {} and {} epochs",
            params.c, params.epochs
        )));
    }
    let members = labels.members();
    let nc = labels.n_classes();
    let mut models = Vec::with_capacity(nc * (nc - 1) / 2);
    for a in 0..nc {
        for b in (a + 1)..nc {
            let samples: Vec<(usize, f64)> = members[a]
                .iter()
                .map(|&i| (i, 1.0))
                .chain(members[b].iter().map(|&i| (i, -1.0)))
                .collect();
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed ^ ((a as u64) << 32 | b as u64));
            models.push(LinearSvm::train(x, &samples, a, b, params, &mut rng));
        }
    }
    Ok(OvoSvmSet { n_classes: nc, models })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::targets::PairwiseDecisions;
    use ndarray::{array, Array2};

    fn separable() -> (Array2<f64>, Labels) {
        let mut rows = Vec::new();
        let mut ids = Vec::new();
        for i in 0..10 {
            let t = i as f64 * 0.3;
            rows.extend_from_slice(&[-3.0 + t * 0.2, t - 1.5]);
            ids.push(0);
            rows.extend_from_slice(&[3.0 - t * 0.2, 1.5 - t]);
            ids.push(1);
        }
        (Array2::from_shape_vec((20, 2), rows).unwrap(), Labels::new(ids).unwrap())
    }

    #[test]
    fn separable_pair_reaches_zero_hinge() {
        let (x, labels) = separable();
        let set = svm_ovo_fit(x.view(), &labels, &SvmParams { c: 10.0, epochs: 200, seed: 1 }).unwrap();
        assert_eq!(set.models.len(), 1);
        let m = &set.models[0];
        let hinge: f64 = x
            .rows()
            .into_iter()
            .zip(labels.ids())
            .map(|(r, &c)| {
                let y = if c == 0 { 1.0 } else { -1.0 };
                (1.0 - y * m.decision(r)).max(0.0)
            })
            .sum();
        assert_eq!(hinge, 0.0);
        for (r, &c) in x.rows().into_iter().zip(labels.ids()) {
            assert_eq!(set.predict(r), c);
        }
    }

    #[test]
    fn duplicate_point_across_classes_is_finite() {
        let x = array![[0.0, 0.0], [0.0, 0.0], [1.0, 1.0], [-1.0, -1.0]];
        let labels = Labels::new(vec![0, 1, 0, 1]).unwrap();
        let set = svm_ovo_fit(x.view(), &labels, &SvmParams::default()).unwrap();
        assert!(set.models[0].weights.iter().all(|v| v.is_finite()));
        assert!(set.models[0].bias.is_finite());
    }

    #[test]
    fn single_class_is_rejected() {
        let x = array![[0.0], [1.0]];
        let labels = Labels::new(vec![0, 0]).unwrap();
        assert!(matches!(
            svm_ovo_fit(x.view(), &labels, &SvmParams::default()),
            Err(SefError::InvalidLabels(_))
        ));
    }

    #[test]
    fn decision_is_affine() {
        let (x, labels) = separable();
        let set = svm_ovo_fit(x.view(), &labels, &SvmParams::default()).unwrap();
        let (a, b) = (array![0.3, -2.0], array![1.7, 0.4]);
        for alpha in [0.0, 0.25, 0.9, 1.0] {
            let mix = &a * alpha + &b * (1.0 - alpha);
            let lhs = set.svm_decision(0, 1, mix.view()).unwrap();
            let rhs = alpha * set.svm_decision(1, 0, a.view()).unwrap()
                + (1.0 - alpha) * set.svm_decision(0, 1, b.view()).unwrap();
            assert!((lhs - rhs).abs() < 1e-10);
        }
    }

    #[test]
    fn table_holds_every_pair() {
        let x = array![[0.0], [1.0], [2.0], [3.0]];
        let labels = Labels::new(vec![0, 1, 2, 2]).unwrap();
        let set = svm_ovo_fit(x.view(), &labels, &SvmParams::default()).unwrap();
        assert_eq!(set.models.len(), 3);
        let table = set.decision_table(x.view()).unwrap();
        for (a, b) in [(0, 1), (0, 2), (1, 2), (2, 0)] {
            assert!(table.decision(a, b, 3).is_some());
        }
    }
}
