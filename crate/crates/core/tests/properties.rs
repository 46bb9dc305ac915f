//! Property tests for the invariants each module promises.

use ndarray::{Array1, Array2, Axis};
use proptest::prelude::*;

use sef::labels::Labels;
use sef::optimizer::AdamState;
use sef::preprocess::{preprocess_apply, preprocess_fit, ScalingMode};
use sef::projections::{grad_linear, sef_loss};
use sef::reference::{geodesic_distances, pca_fit, svm_ovo_fit, sym_eigh, SvmParams};
use sef::similarity::{
    estimate_scaling_factor, gaussian_similarity, histogram_peak, knn_indicator, pairwise_sq_distances, Bandwidth,
    SigmaGrid,
};
use sef::targets::{
    target_clone, target_lap_pca, target_lda, target_le, target_pca, target_svm, DecisionTable, TargetPair,
};
use sef::trainer::{fit, TrainConfig};

fn matrix(rows: std::ops::RangeInclusive<usize>, cols: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Array2<f64>> {
    (rows, cols).prop_flat_map(|(r, c)| {
        prop::collection::vec(-5.0f64..5.0, r * c).prop_map(move |v| Array2::from_shape_vec((r, c), v).unwrap())
    })
}

/// Labels covering every class in `0..k`, with at least two samples total.
fn labels(n_classes: std::ops::RangeInclusive<usize>, extra: usize) -> impl Strategy<Value = Vec<usize>> {
    n_classes.prop_flat_map(move |k| {
        prop::collection::vec(0..k, 0..=extra).prop_map(move |mut v| {
            v.extend(0..k);
            v
        })
    })
}

fn check_pair(pair: &TargetPair, unit_diagonal: bool) -> Result<(), TestCaseError> {
    let n = pair.len();
    for i in 0..n {
        for j in 0..n {
            let (t, m) = (pair.target[[i, j]], pair.mask[[i, j]]);
            prop_assert!((0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&m));
            prop_assert_eq!(t, pair.target[[j, i]]);
        }
        if unit_diagonal {
            prop_assert_eq!(pair.target[[i, i]], 1.0);
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn similarity_is_symmetric_with_unit_diagonal(y in matrix(1..=12, 1..=4), sigma in 1e-3f64..1e3) {
        let p = gaussian_similarity(pairwise_sq_distances(y.view()).unwrap().view(), sigma).unwrap();
        for i in 0..p.nrows() {
            prop_assert_eq!(p[[i, i]], 1.0);
            for j in 0..p.ncols() {
                prop_assert_eq!(p[[i, j]], p[[j, i]]);
            }
        }
    }

    #[test]
    fn similarity_decreases_with_distance(a in 0.0f64..100.0, b in 0.0f64..100.0, sigma in 1e-2f64..1e2) {
        let d = Array2::from_shape_vec((3, 3), vec![0.0, a, b, a, 0.0, 0.0, b, 0.0, 0.0]).unwrap();
        let p = gaussian_similarity(d.view(), sigma).unwrap();
        if a < b {
            prop_assert!(p[[0, 1]] >= p[[0, 2]]);
        } else {
            prop_assert!(p[[0, 1]] <= p[[0, 2]]);
        }
    }

    #[test]
    fn bandwidth_search_is_the_grid_argmin(y in matrix(2..=25, 1..=5)) {
        let d = pairwise_sq_distances(y.view()).unwrap();
        let grid = SigmaGrid::default();
        let got = estimate_scaling_factor(d.view(), &grid).unwrap();
        let best = grid.values().iter().map(|&s| histogram_peak(d.view(), s)).min().unwrap();
        let first = grid.values().iter().copied().find(|&s| histogram_peak(d.view(), s) == best).unwrap();
        prop_assert_eq!(got, first);
    }

    #[test]
    fn preprocessing_centers_and_scales(x in matrix(2..=20, 1..=5)) {
        for mode in [ScalingMode::ZNormalize, ScalingMode::CenterOnly] {
            let z = preprocess_apply(x.view(), &preprocess_fit(x.view(), mode).unwrap()).unwrap();
            for (j, col) in z.axis_iter(Axis(1)).enumerate() {
                prop_assert!(col.mean().unwrap().abs() < 1e-10);
                let raw_std = x.column(j).std(0.0);
                if mode == ScalingMode::ZNormalize && raw_std > 1e-6 {
                    prop_assert!((col.std(0.0) - 1.0).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn every_target_is_a_valid_pair(x in matrix(4..=15, 1..=4), k in 1usize..4) {
        let n = x.nrows();
        let pca = target_pca(n).unwrap();
        check_pair(&pca, false)?;
        prop_assert!(pca.target.iter().all(|&v| v == 0.0));
        check_pair(&target_le(x.view(), k, 2.0).unwrap(), true)?;
        check_pair(&target_lap_pca(x.view(), k).unwrap(), true)?;
        check_pair(&target_clone(x.view(), &Bandwidth::auto()).unwrap(), true)?;
        let ids: Vec<usize> = (0..n).map(|i| i % 2).collect();
        check_pair(&target_lda(&Labels::new(ids).unwrap()).unwrap(), true)?;
    }

    #[test]
    fn svm_target_is_a_valid_pair(
        ids in labels(2..=4, 12),
        raw in prop::collection::vec(-3.0f64..3.0, 6 * 16),
    ) {
        let labels = Labels::new(ids).unwrap();
        let (n, k) = (labels.len(), labels.n_classes());
        let mut table = DecisionTable::new();
        let mut offset = 0;
        for a in 0..k {
            for b in (a + 1)..k {
                table.insert(a, b, raw[offset..offset + n].to_vec());
                offset += 16;
            }
        }
        check_pair(&target_svm(&table, &labels, &Bandwidth::Fixed(1.5)).unwrap(), true)?;
    }

    #[test]
    fn lda_target_ignores_class_names(ids in labels(2..=5, 15), shift in 1usize..5) {
        let labels = Labels::new(ids.clone()).unwrap();
        let k = labels.n_classes();
        let renamed = Labels::new(ids.iter().map(|c| (c + shift) % k).collect()).unwrap();
        let a = target_lda(&labels).unwrap();
        let b = target_lda(&renamed).unwrap();
        prop_assert_eq!(a.target, b.target);
        prop_assert_eq!(a.mask, b.mask);
    }

    #[test]
    fn le_and_lap_pca_share_the_neighbour_graph(x in matrix(4..=15, 1..=4), k in 1usize..4) {
        let adj = knn_indicator(x.view(), k).unwrap();
        let le = target_le(x.view(), k, 0.7).unwrap();
        let lap = target_lap_pca(x.view(), k).unwrap();
        for ((i, j), &neighbour) in adj.indexed_iter() {
            if neighbour {
                prop_assert_eq!(le.target[[i, j]], 1.0);
                prop_assert_eq!(lap.target[[i, j]], 1.0);
            } else {
                prop_assert_eq!(lap.target[[i, j]], 0.0);
            }
        }
    }

    #[test]
    fn cloning_the_data_itself_gives_its_similarities(x in matrix(2..=12, 1..=4), sigma in 0.1f64..10.0) {
        let clone = target_clone(x.view(), &Bandwidth::Fixed(sigma)).unwrap();
        let direct = gaussian_similarity(pairwise_sq_distances(x.view()).unwrap().view(), sigma).unwrap();
        prop_assert_eq!(clone.target, direct);
    }

    #[test]
    fn loss_is_invariant_under_symmetric_permutation(
        vals in prop::collection::vec(0.0f64..1.0, 3 * 64),
        n in 2usize..8,
        seed in any::<u64>(),
    ) {
        let take = |k: usize| Array2::from_shape_fn((n, n), |(i, j)| vals[k * 64 + i * 8 + j]);
        let (p, t, m) = (take(0), take(1), take(2) + 0.01);
        let mut perm: Vec<usize> = (0..n).collect();
        // Fisher-Yates driven by the proptest seed.
        let mut s = seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let permute = |a: &Array2<f64>| a.select(Axis(0), &perm).select(Axis(1), &perm);
        let before = sef_loss(p.view(), t.view(), m.view()).unwrap();
        let after = sef_loss(permute(&p).view(), permute(&t).view(), permute(&m).view()).unwrap();
        prop_assert!((before - after).abs() <= 1e-12 * before.max(1.0));
    }

    #[test]
    fn gradient_vanishes_when_similarities_match(x in matrix(2..=10, 1..=4), sigma in 0.1f64..10.0) {
        let w = Array2::from_shape_fn((x.ncols(), 2), |(i, j)| 0.3 * (i as f64) - 0.2 * (j as f64) + 0.1);
        let y = x.dot(&w);
        let p = gaussian_similarity(pairwise_sq_distances(y.view()).unwrap().view(), sigma).unwrap();
        let mask = Array2::ones(p.dim());
        let g = grad_linear(x.view(), y.view(), p.view(), p.view(), mask.view(), sigma).unwrap();
        prop_assert!(g.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn adam_never_moves_on_zero_gradient(start in matrix(1..=4, 1..=4), steps in 1usize..50, lr in 1e-6f64..1.0) {
        let mut params = start.clone();
        let mut state = AdamState::new(params.dim());
        let zero = Array2::zeros(params.dim());
        for _ in 0..steps {
            state.step(&mut params, zero.view(), lr).unwrap();
        }
        prop_assert_eq!(params, start);
    }

    #[test]
    fn eigendecomposition_reconstructs(a in matrix(1..=8, 1..=8)) {
        let n = a.nrows().min(a.ncols());
        let a = a.slice(ndarray::s![..n, ..n]).to_owned();
        let s = &a + &a.t();
        let eig = sym_eigh(s.view()).unwrap();
        let v = &eig.eigenvectors;
        let rebuilt = v.dot(&Array2::from_diag(&eig.eigenvalues)).dot(&v.t());
        let norm = s.mapv(|x| x * x).sum().sqrt();
        let err = (&s - &rebuilt).mapv(|x| x * x).sum().sqrt();
        prop_assert!(err <= 1e-8 * norm.max(1e-300) || norm == 0.0);
    }

    #[test]
    fn pca_weights_are_orthonormal(x in matrix(3..=20, 2..=6), m in 1usize..3) {
        let m = m.min(x.ncols());
        let w = pca_fit(x.view(), m).unwrap().components;
        let gram = w.t().dot(&w);
        let eye = Array2::<f64>::eye(m);
        prop_assert!((&gram - &eye).iter().all(|v| v.abs() < 1e-10));
    }

    #[test]
    fn geodesics_form_a_metric(x in matrix(6..=14, 1..=3)) {
        let k = x.nrows() - 1;
        let d = geodesic_distances(x.view(), k).unwrap();
        let n = d.nrows();
        for i in 0..n {
            prop_assert_eq!(d[[i, i]], 0.0);
            for j in 0..n {
                prop_assert_eq!(d[[i, j]], d[[j, i]]);
                for l in 0..n {
                    prop_assert!(d[[i, j]] <= d[[i, l]] + d[[l, j]] + 1e-9);
                }
            }
        }
    }

    #[test]
    fn svm_decisions_are_affine(alpha in 0.0f64..1.0, seed in 0u64..1000) {
        let x = Array2::from_shape_fn((12, 3), |(i, j)| ((i * 5 + j * 3 + seed as usize) % 7) as f64 + (i % 2) as f64 * 4.0);
        let labels = Labels::new((0..12).map(|i| i % 2).collect()).unwrap();
        let svm = svm_ovo_fit(x.view(), &labels, &SvmParams { epochs: 20, seed, ..SvmParams::default() }).unwrap();
        let (x1, x2) = (x.row(0), x.row(5));
        let mix: Array1<f64> = &x1 * alpha + &x2 * (1.0 - alpha);
        let f = |v| svm.svm_decision(0, 1, v).unwrap();
        prop_assert!((f(mix.view()) - (alpha * f(x1) + (1.0 - alpha) * f(x2))).abs() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn fitting_is_deterministic_and_reports_a_grid_bandwidth(x in matrix(6..=15, 2..=4)) {
        let target = target_pca(x.nrows()).unwrap();
        let cfg = TrainConfig { n_iters: 20, ..TrainConfig::linear(1) };
        let (a, ra) = fit(x.view(), &target, &cfg).unwrap();
        let (b, rb) = fit(x.view(), &target, &cfg).unwrap();
        prop_assert_eq!(a, b);
        prop_assert_eq!(&ra, &rb);
        prop_assert!(cfg.sigma_grid.contains(ra.sigma_p));
    }
}
