//! Central finite-difference checks of the analytic gradients.

use ndarray::{Array2, ArrayView2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::Result;
use crate::preprocess::{preprocess_apply, preprocess_fit, ScalingMode};
use crate::projections::{
    grad_kernel, grad_linear, grad_ortho_kernel, grad_ortho_linear, kernel_matrix, ortho_penalty_kernel,
    ortho_penalty_linear, sef_loss, KernelSpec,
};
use crate::similarity::{gaussian_similarity, sq_distances_unchecked};

pub const DEFAULT_STEP: f64 = 1e-5;
pub const DEFAULT_TOLERANCE: f64 = 1e-4;
pub const DEFAULT_INSTANCES: usize = 20;

/// Sizes `(n_samples, n_features, n_dims)` of one check instance.
pub type Shape = (usize, usize, usize);

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct GradientResult {
    pub name: &'static str,
    pub max_relative_error: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct GradCheckReport {
    pub seed: u64,
    pub tolerance: f64,
    pub shapes: Vec<Shape>,
    pub gradients: Vec<GradientResult>,
}

impl GradCheckReport {
    pub fn passed(&self) -> bool {
        self.gradients.iter().all(|g| g.passed)
    }
}

/// `max |a - b| / max(‖a‖∞, ‖b‖∞)`, with a floor on the denominator.
pub fn relative_error(analytic: ArrayView2<'_, f64>, numeric: ArrayView2<'_, f64>) -> f64 {
    let diff = analytic
        .iter()
        .zip(numeric.iter())
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    let scale = analytic
        .iter()
        .chain(numeric.iter())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    diff / scale.max(1e-10)
}

/// Central differences of `f` around `theta`.
pub fn numeric_gradient(
    theta: ArrayView2<'_, f64>,
    step: f64,
    mut f: impl FnMut(ArrayView2<'_, f64>) -> Result<f64>,
) -> Result<Array2<f64>> {
    let mut probe = theta.to_owned();
    let mut grad = Array2::zeros(theta.dim());
    for idx in ndarray::indices(theta.dim()) {
        let orig = probe[idx];
        probe[idx] = orig + step;
        let up = f(probe.view())?;
        probe[idx] = orig - step;
        let down = f(probe.view())?;
        probe[idx] = orig;
        grad[idx] = (up - down) / (2.0 * step);
    }
    Ok(grad)
}

fn normal(rng: &mut ChaCha8Rng, rows: usize, cols: usize, scale: f64) -> Array2<f64> {
    Array2::from_shape_simple_fn((rows, cols), || {
        let z: f64 = StandardNormal.sample(rng);
        z * scale
    })
}

fn symmetric_unit(rng: &mut ChaCha8Rng, n: usize) -> Array2<f64> {
    let mut a = Array2::zeros((n, n));
    for i in 0..n {
        for j in i..n {
            let v = rng.random_range(0.0..1.0);
            a[[i, j]] = v;
            a[[j, i]] = v;
        }
    }
    a
}

fn similarity_loss(
    basis: ArrayView2<'_, f64>,
    theta: ArrayView2<'_, f64>,
    t: ArrayView2<'_, f64>,
    m: ArrayView2<'_, f64>,
    sigma: f64,
) -> Result<f64> {
    let y = basis.dot(&theta);
    let p = gaussian_similarity(sq_distances_unchecked(y.view()).view(), sigma)?;
    sef_loss(p.view(), t, m)
}

/// Runs `instances` random checks of all four gradients. With `shape` set,
/// every instance uses it; otherwise sizes are drawn with `n ≤ 10`,
/// `d ≤ 6`, `m ≤ 3`.
pub fn run(seed: u64, shape: Option<Shape>, instances: usize, tolerance: f64) -> Result<GradCheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut shapes = Vec::with_capacity(instances);
    let mut worst = [0.0f64; 4];
    for _ in 0..instances {
        let (n, d, m) = shape.unwrap_or_else(|| {
            (rng.random_range(3..=10), rng.random_range(2..=6), rng.random_range(1..=3))
        });
        shapes.push((n, d, m));

        let raw = normal(&mut rng, n, d, 1.0);
        let x = preprocess_apply(raw.view(), &preprocess_fit(raw.view(), ScalingMode::ZNormalize)?)?;
        let t = symmetric_unit(&mut rng, n);
        let mask = symmetric_unit(&mut rng, n);
        let sigma = rng.random_range(0.5..4.0);

        let w = normal(&mut rng, d, m, 1.0 / (d as f64).sqrt());
        let y = x.dot(&w);
        let p = gaussian_similarity(sq_distances_unchecked(y.view()).view(), sigma)?;
        let analytic = grad_linear(x.view(), y.view(), p.view(), t.view(), mask.view(), sigma)?;
        let numeric = numeric_gradient(w.view(), DEFAULT_STEP, |th| {
            similarity_loss(x.view(), th, t.view(), mask.view(), sigma)
        })?;
        worst[0] = worst[0].max(relative_error(analytic.view(), numeric.view()));

        let k = kernel_matrix(x.view(), x.view(), &KernelSpec::Rbf { gamma: (d as f64).sqrt() })?;
        let a = normal(&mut rng, n, m, 1.0 / (n as f64).sqrt());
        let y = k.dot(&a);
        let p = gaussian_similarity(sq_distances_unchecked(y.view()).view(), sigma)?;
        let analytic = grad_kernel(k.view(), y.view(), p.view(), t.view(), mask.view(), sigma)?;
        let numeric = numeric_gradient(a.view(), DEFAULT_STEP, |th| {
            similarity_loss(k.view(), th, t.view(), mask.view(), sigma)
        })?;
        worst[1] = worst[1].max(relative_error(analytic.view(), numeric.view()));

        let analytic = grad_ortho_linear(w.view())?;
        let numeric = numeric_gradient(w.view(), DEFAULT_STEP, ortho_penalty_linear)?;
        worst[2] = worst[2].max(relative_error(analytic.view(), numeric.view()));

        let analytic = grad_ortho_kernel(a.view(), k.view())?;
        let numeric = numeric_gradient(a.view(), DEFAULT_STEP, |th| ortho_penalty_kernel(th, k.view()))?;
        worst[3] = worst[3].max(relative_error(analytic.view(), numeric.view()));
    }
    let names = ["similarity/linear", "similarity/kernel", "orthonormality/linear", "orthonormality/kernel"];
    let gradients = names
        .iter()
        .zip(worst)
        .map(|(&name, err)| GradientResult { name, max_relative_error: err, passed: err < tolerance })
        .collect();
    Ok(GradCheckReport { seed, tolerance, shapes, gradients })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_run_passes() {
        let report = run(42, None, DEFAULT_INSTANCES, DEFAULT_TOLERANCE).unwrap();
        assert!(report.passed(), "{report:?}");
        assert_eq!(report.shapes.len(), DEFAULT_INSTANCES);
        assert!(report.shapes.iter().all(|&(n, d, m)| n <= 10 && d <= 6 && m <= 3));
    }

    #[test]
    fn fixed_shape_and_determinism() {
        let a = run(3, Some((10, 6, 3)), 4, DEFAULT_TOLERANCE).unwrap();
        let b = run(3, Some((10, 6, 3)), 4, DEFAULT_TOLERANCE).unwrap();
        assert_eq!(a, b);
        assert!(a.shapes.iter().all(|s| *s == (10, 6, 3)));
    }
}
