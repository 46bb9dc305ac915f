//! Small seeded datasets for examples and tests.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::labels::Labels;

/// Isotropic Gaussian blobs with `per_class` samples each. Class centres are
/// drawn uniformly from `[-spread, spread]^dims`.
pub fn gaussian_blobs(
    n_classes: usize,
    per_class: usize,
    dims: usize,
    spread: f64,
    std: f64,
    seed: u64,
) -> (Array2<f64>, Labels) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centres = Array2::from_shape_fn((n_classes, dims), |_| rng.random_range(-spread..=spread));
    let noise = Normal::new(0.0, std).expect("std must be non-negative");
    let n = n_classes * per_class;
    let ids: Vec<usize> = (0..n).map(|i| i % n_classes).collect();
    let x = Array2::from_shape_fn((n, dims), |(i, j)| centres[[ids[i], j]] + noise.sample(&mut rng));
    (x, Labels::new(ids).expect("every class has samples"))
}

/// Points on a Swiss roll: `t ∈ [1.5π, 4.5π]`, height in `[0, height]`.
/// Returns the 3-D points and the unrolled coordinates `(t, h)`.
pub fn swiss_roll(n: usize, height: f64, noise: f64, seed: u64) -> (Array2<f64>, Array2<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let jitter = Normal::new(0.0, noise).expect("noise must be non-negative");
    let mut x = Array2::zeros((n, 3));
    let mut latent = Array2::zeros((n, 2));
    for i in 0..n {
        let t = 1.5 * std::f64::consts::PI * (1.0 + 2.0 * rng.random::<f64>());
        let h = height * rng.random::<f64>();
        x[[i, 0]] = t * t.cos() + jitter.sample(&mut rng);
        x[[i, 1]] = h + jitter.sample(&mut rng);
        x[[i, 2]] = t * t.sin() + jitter.sample(&mut rng);
        latent[[i, 0]] = t;
        latent[[i, 1]] = h;
    }
    (x, latent)
}
