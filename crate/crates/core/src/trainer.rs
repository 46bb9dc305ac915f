//! End-to-end training: scaling, PCA/KPCA initialization, bandwidth
//! selection and Adam iterations on the combined objective.

use ndarray::{Array2, ArrayView2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{ensure_dims, ensure_finite, Result, SefError};
use crate::optimizer::AdamState;
use crate::preprocess::{preprocess_apply, preprocess_fit, ScalingMode};
use crate::projections::{
    kernel_matrix, Basis, KernelModel, KernelSpec, LinearModel, Objective, ProjectionModel,
};
use crate::reference::{kpca_fit, pca_fit};
use crate::similarity::{estimate_scaling_factor, sq_distances_unchecked, SigmaGrid};
use crate::targets::TargetPair;

pub const LINEAR_ITERS: usize = 500;
pub const KERNEL_ITERS: usize = 1000;
pub const LINEAR_LR: f64 = 1e-3;
pub const KERNEL_LR: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum KernelChoice {
    Fixed { spec: KernelSpec },
    /// RBF whose `gamma²` is picked from the bandwidth grid by the
    /// histogram-spread criterion on the training kernel values.
    RbfAuto,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum ProjectionMode {
    Linear,
    Kernel { kernel: KernelChoice },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Initialization {
    /// PCA (linear) or uncentered KPCA with unit feature-space norm (kernel).
    Pca,
    /// Gaussian weights; seeded by `TrainConfig::seed`.
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub n_iters: usize,
    pub lr: f64,
    pub alpha_p: f64,
    pub dims: usize,
    pub sigma_grid: SigmaGrid,
    pub seed: u64,
    pub mode: ProjectionMode,
    pub init: Initialization,
    pub record_loss: bool,
}

impl TrainConfig {
    /// 500 iterations at `lr = 1e-3`, `alpha_p = 1`.
    pub fn linear(dims: usize) -> Self {
        Self {
            n_iters: LINEAR_ITERS,
            lr: LINEAR_LR,
            alpha_p: 1.0,
            dims,
            sigma_grid: SigmaGrid::default(),
            seed: 42,
            mode: ProjectionMode::Linear,
            init: Initialization::Pca,
            record_loss: false,
        }
    }

    /// 1000 iterations at `lr = 1e-5`, `alpha_p = 0.001`.
    pub fn kernel(dims: usize, kernel: KernelChoice) -> Self {
        Self {
            n_iters: KERNEL_ITERS,
            lr: KERNEL_LR,
            alpha_p: 0.001,
            mode: ProjectionMode::Kernel { kernel },
            ..Self::linear(dims)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_iters == 0 {
            return Err(SefError::InvalidParameter("at least one iteration is required".into()));
        }
        if !(self.lr > 0.0) || !self.lr.is_finite() {
            return Err(SefError::InvalidParameter(format!("learning rate must be positive, got {}", self.lr)));
        }
        if !(0.0..=1.0).contains(&self.alpha_p) {
            return Err(SefError::InvalidParameter(format!("alpha_p must lie in [0, 1], got {}", self.alpha_p)));
        }
        if self.dims == 0 {
            return Err(SefError::InvalidParameter("output dimensionality must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub initial_loss: f64,
    pub final_loss: f64,
    pub sigma_p: f64,
    /// Objective before every update plus the final value.
    pub loss_trace: Option<Vec<f64>>,
    /// Set when `final_loss > initial_loss`.
    pub diverged: bool,
}

fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, scale: f64) -> Array2<f64> {
    Array2::from_shape_simple_fn((rows, cols), || {
        let z: f64 = StandardNormal.sample(rng);
        z * scale
    })
}

fn resolve_kernel(choice: &KernelChoice, x: ArrayView2<'_, f64>, grid: &SigmaGrid) -> Result<KernelSpec> {
    match choice {
        KernelChoice::Fixed { spec } => Ok(*spec),
        KernelChoice::RbfAuto => {
            let d = sq_distances_unchecked(x);
            let gamma_sq = estimate_scaling_factor(d.view(), grid)?;
            Ok(KernelSpec::Rbf { gamma: gamma_sq.sqrt() })
        }
    }
}

/// Learns a projection whose embedded similarities approach `target`.
pub fn fit(x: ArrayView2<'_, f64>, target: &TargetPair, config: &TrainConfig) -> Result<(ProjectionModel, FitReport)> {
    config.validate()?;
    ensure_dims(target.len(), x.nrows())?;
    ensure_dims(target.mask.nrows(), x.nrows())?;
    ensure_finite(x.iter().copied(), "data matrix")?;
    if x.nrows() < 2 {
        return Err(SefError::InvalidData("training needs at least 2 samples".into()));
    }
    let (n, d) = x.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let scaling = match config.mode {
        ProjectionMode::Linear => ScalingMode::ZNormalize,
        ProjectionMode::Kernel { .. } => ScalingMode::CenterOnly,
    };
    let stats = preprocess_fit(x, scaling)?;
    let xp = preprocess_apply(x, &stats)?;

    let (kernel, basis_matrix, mut theta) = match &config.mode {
        ProjectionMode::Linear => {
            if config.dims > d {
                return Err(SefError::InvalidParameter(format!(
                    "cannot project {d} features onto {} dimensions with PCA initialization",
                    config.dims
                )));
            }
            let theta = match config.init {
                Initialization::Pca => pca_fit(xp.view(), config.dims)?.components,
                Initialization::Random => gaussian_matrix(&mut rng, d, config.dims, 1.0 / (d as f64).sqrt()),
            };
            (None, None, theta)
        }
        ProjectionMode::Kernel { kernel } => {
            if config.dims > n {
                return Err(SefError::InvalidParameter(format!(
                    "kernel initialization needs dims <= {n} samples, got {}",
                    config.dims
                )));
            }
            let spec = resolve_kernel(kernel, xp.view(), &config.sigma_grid)?;
            let k = kernel_matrix(xp.view(), xp.view(), &spec)?;
            let theta = match config.init {
                Initialization::Pca => kpca_fit(k.view(), config.dims)?,
                Initialization::Random => {
                    let mut a = gaussian_matrix(&mut rng, n, config.dims, 1.0 / (n as f64).sqrt());
                    for mut col in a.columns_mut() {
                        let norm = col.dot(&k.dot(&col));
                        if norm > 0.0 {
                            col /= norm.sqrt();
                        }
                    }
                    a
                }
            };
            (Some(spec), Some(k), theta)
        }
    };

    let basis = match &basis_matrix {
        Some(k) => Basis::Kernel(k.view()),
        None => Basis::Linear(xp.view()),
    };
    let initial_embedding = basis.embed(theta.view())?;
    let sigma_p = estimate_scaling_factor(
        sq_distances_unchecked(initial_embedding.view()).view(),
        &config.sigma_grid,
    )?;
    let objective = Objective::new(
        basis,
        target.target.view(),
        target.mask.view(),
        sigma_p,
        config.alpha_p,
    )?;

    let mut adam = AdamState::new(theta.dim());
    let mut trace = Vec::with_capacity(config.n_iters + 1);
    for iter in 0..config.n_iters {
        let eval = objective.evaluate(theta.view())?;
        if !eval.total.is_finite() || eval.gradient.iter().any(|g| !g.is_finite()) {
            return Err(SefError::Numerical(format!("objective became non-finite at iteration {iter}")));
        }
        trace.push(eval.total);
        adam.step(&mut theta, eval.gradient.view(), config.lr)?;
    }
    let final_loss = objective.value(theta.view())?;
    if !final_loss.is_finite() {
        return Err(SefError::Numerical("final objective is non-finite".into()));
    }
    trace.push(final_loss);
    let initial_loss = trace[0];

    let model = match kernel {
        Some(spec) => ProjectionModel::Kernel(KernelModel {
            coefficients: theta,
            kernel: spec,
            train: xp,
            stats,
        }),
        None => ProjectionModel::Linear(LinearModel { weights: theta, stats }),
    };
    let report = FitReport {
        initial_loss,
        final_loss,
        sigma_p,
        loss_trace: config.record_loss.then_some(trace),
        diverged: final_loss > initial_loss,
    };
    Ok((model, report))
}

/// Applies the stored scaling, then the learned projection.
pub fn transform(model: &ProjectionModel, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
    let xp = preprocess_apply(x, model.stats())?;
    model.project(xp.view())
}
