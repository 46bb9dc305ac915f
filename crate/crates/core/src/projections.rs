//! Linear and kernel projections, the similarity-matching objective and its
//! analytic gradients.
//!
//! Both projection kinds share one shape: the embedding is `Y = B · Θ` where
//! `B` is the (preprocessed) data matrix for linear models and the training
//! kernel matrix for kernel models, and `Θ` is `W` or `A` respectively. The
//! orthonormality penalty measures `Θᵀ G Θ` against the identity, with
//! `G = I` for linear models and `G = K` for kernel models.

use ndarray::parallel::prelude::*;
use rayon::prelude::*;
use ndarray::{Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{ensure_dims, ensure_finite, Result, SefError};
use crate::preprocess::PreprocessStats;
use crate::similarity::{gaussian_similarity, sq_distances_unchecked};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum KernelSpec {
    /// `exp(-‖a - b‖² / gamma²)`
    Rbf { gamma: f64 },
    /// `aᵀb`
    Linear,
    /// `(aᵀb + coef)^degree`
    Polynomial { degree: u32, coef: f64 },
}

impl KernelSpec {
    fn validate(&self) -> Result<()> {
        match *self {
            KernelSpec::Rbf { gamma } if !(gamma > 0.0) || !gamma.is_finite() => Err(
                SefError::InvalidParameter(format!("RBF gamma must be positive, got {gamma}")),
            ),
            KernelSpec::Polynomial { degree: 0, .. } => Err(SefError::InvalidParameter(
                "polynomial degree must be at least 1".into(),
            )),
            _ => Ok(()),
        }
    }

    fn eval(&self, a: ndarray::ArrayView1<'_, f64>, b: ndarray::ArrayView1<'_, f64>) -> f64 {
        match *self {
            KernelSpec::Rbf { gamma } => {
                let d2: f64 = a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum();
                (-d2 / (gamma * gamma)).exp()
            }
            KernelSpec::Linear => a.dot(&b),
            KernelSpec::Polynomial { degree, coef } => (a.dot(&b) + coef).powi(degree as i32),
        }
    }
}

/// `K_ij = k(a_i, b_j)`; no centering is applied.
pub fn kernel_matrix(
    xa: ArrayView2<'_, f64>,
    xb: ArrayView2<'_, f64>,
    spec: &KernelSpec,
) -> Result<Array2<f64>> {
    spec.validate()?;
    ensure_dims(xb.ncols(), xa.ncols())?;
    let mut k = Array2::<f64>::zeros((xa.nrows(), xb.nrows()));
    k.axis_iter_mut(Axis(0))
        .into_par_iter()
        .enumerate()
        .for_each(|(i, mut row)| {
            let a = xa.row(i);
            for (j, v) in row.iter_mut().enumerate() {
                *v = spec.eval(a, xb.row(j));
            }
        });
    Ok(k)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    /// `d × m`
    pub weights: Array2<f64>,
    pub stats: PreprocessStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelModel {
    /// `N × m`, one coefficient per training sample and output dimension.
    pub coefficients: Array2<f64>,
    pub kernel: KernelSpec,
    /// Preprocessed training data the kernel is evaluated against.
    pub train: Array2<f64>,
    pub stats: PreprocessStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum ProjectionModel {
    Linear(LinearModel),
    Kernel(KernelModel),
}

impl ProjectionModel {
    pub fn stats(&self) -> &PreprocessStats {
        match self {
            ProjectionModel::Linear(m) => &m.stats,
            ProjectionModel::Kernel(m) => &m.stats,
        }
    }

    pub fn output_dims(&self) -> usize {
        match self {
            ProjectionModel::Linear(m) => m.weights.ncols(),
            ProjectionModel::Kernel(m) => m.coefficients.ncols(),
        }
    }

    pub fn input_dims(&self) -> usize {
        self.stats().dims()
    }

    /// Projects already-preprocessed rows.
    pub fn project(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        match self {
            ProjectionModel::Linear(m) => linear_project(m, x),
            ProjectionModel::Kernel(m) => kernel_project(m, x),
        }
    }
}

/// `Y = X · W`
pub fn linear_project(model: &LinearModel, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
    ensure_dims(model.weights.nrows(), x.ncols())?;
    Ok(x.dot(&model.weights))
}

/// `Y = K(X_new, X_train) · A`
pub fn kernel_project(model: &KernelModel, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
    ensure_dims(model.train.ncols(), x.ncols())?;
    ensure_dims(model.train.nrows(), model.coefficients.nrows())?;
    let k = kernel_matrix(x, model.train.view(), &model.kernel)?;
    Ok(k.dot(&model.coefficients))
}

fn mask_norm(mask: ArrayView2<'_, f64>) -> Result<f64> {
    let norm: f64 = mask.iter().map(|v| v.abs()).sum();
    if norm > 0.0 && norm.is_finite() {
        Ok(norm)
    } else {
        Err(SefError::InvalidMask(format!("mask 1-norm must be positive, got {norm}")))
    }
}

fn check_square(n: usize, m: ArrayView2<'_, f64>) -> Result<()> {
    ensure_dims(n, m.nrows())?;
    ensure_dims(n, m.ncols())
}

/// `J_s = 1/(2‖M‖₁) Σ_ij M_ij (P_ij − T_ij)²`
pub fn sef_loss(
    p: ArrayView2<'_, f64>,
    t: ArrayView2<'_, f64>,
    mask: ArrayView2<'_, f64>,
) -> Result<f64> {
    let n = p.nrows();
    check_square(n, p)?;
    check_square(n, t)?;
    check_square(n, mask)?;
    let norm = mask_norm(mask)?;
    let mut acc = 0.0;
    ndarray::Zip::from(p).and(t).and(mask).for_each(|p, t, m| {
        let r = p - t;
        acc += m * r * r;
    });
    Ok(acc / (2.0 * norm))
}

fn gram_deviation(theta: ArrayView2<'_, f64>, metric: Option<ArrayView2<'_, f64>>) -> Result<(Array2<f64>, Array2<f64>)> {
    // returns (G·Θ, ΘᵀGΘ − I)
    let g_theta = match metric {
        Some(k) => {
            check_square(theta.nrows(), k)?;
            k.dot(&theta)
        }
        None => theta.to_owned(),
    };
    let mut dev = theta.t().dot(&g_theta);
    for i in 0..dev.nrows() {
        dev[[i, i]] -= 1.0;
    }
    Ok((g_theta, dev))
}

fn penalty_from_dev(dev: &Array2<f64>) -> f64 {
    let m = dev.nrows() as f64;
    dev.iter().map(|v| v * v).sum::<f64>() / (2.0 * m * m)
}

fn check_params(theta: ArrayView2<'_, f64>) -> Result<()> {
    if theta.ncols() == 0 {
        return Err(SefError::InvalidParameter("projection needs at least one output dimension".into()));
    }
    Ok(())
}

/// `J_p = 1/(2m²) ‖WᵀW − I‖²_F`
pub fn ortho_penalty_linear(w: ArrayView2<'_, f64>) -> Result<f64> {
    check_params(w)?;
    let (_, dev) = gram_deviation(w, None)?;
    Ok(penalty_from_dev(&dev))
}

/// `J_p = 1/(2m²) ‖AᵀKA − I‖²_F`
pub fn ortho_penalty_kernel(a: ArrayView2<'_, f64>, k: ArrayView2<'_, f64>) -> Result<f64> {
    check_params(a)?;
    let (_, dev) = gram_deviation(a, Some(k))?;
    Ok(penalty_from_dev(&dev))
}

/// Column `i` is `2/m² Σ_j (w_iᵀw_j − δ_ij) w_j`.
pub fn grad_ortho_linear(w: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
    check_params(w)?;
    let (gw, dev) = gram_deviation(w, None)?;
    let m = w.ncols() as f64;
    Ok(gw.dot(&dev) * (2.0 / (m * m)))
}

/// Column `i` is `2/m² Σ_j (a_iᵀK a_j − δ_ij) K a_j`.
pub fn grad_ortho_kernel(a: ArrayView2<'_, f64>, k: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
    check_params(a)?;
    let (ka, dev) = gram_deviation(a, Some(k))?;
    let m = a.ncols() as f64;
    Ok(ka.dot(&dev) * (2.0 / (m * m)))
}

/// Gradient of `J_s` with respect to `Θ` for `Y = B·Θ`.
///
/// The double sum over sample pairs collapses to `Bᵀ L Y` with
/// `C_ij = M_ij (P_ij − T_ij) P_ij` and
/// `L = diag(rowsum C + colsum C) − C − Cᵀ`.
fn grad_similarity(
    basis: ArrayView2<'_, f64>,
    y: ArrayView2<'_, f64>,
    p: ArrayView2<'_, f64>,
    t: ArrayView2<'_, f64>,
    mask: ArrayView2<'_, f64>,
    sigma_p: f64,
) -> Result<Array2<f64>> {
    if !(sigma_p > 0.0) || !sigma_p.is_finite() {
        return Err(SefError::InvalidParameter(format!(
            "similarity bandwidth must be positive, got {sigma_p}"
        )));
    }
    let n = basis.nrows();
    ensure_dims(n, y.nrows())?;
    check_square(n, p)?;
    check_square(n, t)?;
    check_square(n, mask)?;
    let norm = mask_norm(mask)?;

    let mut c = Array2::<f64>::zeros((n, n));
    ndarray::Zip::from(&mut c)
        .and(p)
        .and(t)
        .and(mask)
        .for_each(|c, &p, &t, &m| *c = m * (p - t) * p);
    let degree = c.sum_axis(Axis(1)) + c.sum_axis(Axis(0));
    // L·Y without materializing L = diag(degree) − C − Cᵀ.
    let mut ly = &y * &degree.insert_axis(Axis(1));
    ly -= &c.dot(&y);
    ly -= &c.t().dot(&y);
    Ok(basis.t().dot(&ly) * (-2.0 / (sigma_p * norm)))
}

/// `∂J_s/∂W` for `Y = X·W`.
pub fn grad_linear(
    x: ArrayView2<'_, f64>,
    y: ArrayView2<'_, f64>,
    p: ArrayView2<'_, f64>,
    t: ArrayView2<'_, f64>,
    mask: ArrayView2<'_, f64>,
    sigma_p: f64,
) -> Result<Array2<f64>> {
    grad_similarity(x, y, p, t, mask, sigma_p)
}

/// `∂J_s/∂A` for `Y = K·A`.
pub fn grad_kernel(
    k: ArrayView2<'_, f64>,
    y: ArrayView2<'_, f64>,
    p: ArrayView2<'_, f64>,
    t: ArrayView2<'_, f64>,
    mask: ArrayView2<'_, f64>,
    sigma_p: f64,
) -> Result<Array2<f64>> {
    check_square(k.nrows(), k)?;
    grad_similarity(k, y, p, t, mask, sigma_p)
}

/// One pass over all pairs: `P`, `C_ij = M_ij (P_ij − T_ij) P_ij` and the
/// unnormalized loss `Σ M_ij (P_ij − T_ij)²`. Row partial sums are added in
/// row order so the result does not depend on the thread count.
fn similarity_terms(
    y: ArrayView2<'_, f64>,
    t: ArrayView2<'_, f64>,
    mask: ArrayView2<'_, f64>,
    sigma_p: f64,
    want_c: bool,
) -> (Array2<f64>, Option<Array2<f64>>, f64) {
    let (n, m) = y.dim();
    let y = y.as_standard_layout();
    let flat = y.as_slice().expect("standard layout");
    let t = t.as_standard_layout();
    let mask = mask.as_standard_layout();
    let (t, mask) = (t.as_slice().expect("standard layout"), mask.as_slice().expect("standard layout"));
    // P is symmetric: evaluate the strict upper triangle, then mirror it.
    let mut p = vec![0.0; n * n];
    let inv_sigma = 1.0 / sigma_p;
    p.par_chunks_mut(n).enumerate().for_each(|(i, p_row)| {
        let yi = &flat[i * m..(i + 1) * m];
        p_row[i] = 1.0;
        for (j, pv) in p_row.iter_mut().enumerate().skip(i + 1) {
            let yj = &flat[j * m..(j + 1) * m];
            let d: f64 = yi.iter().zip(yj).map(|(a, b)| (a - b) * (a - b)).sum();
            *pv = (-d * inv_sigma).exp();
        }
    });
    for i in 1..n {
        for j in 0..i {
            p[i * n + j] = p[j * n + i];
        }
    }
    let mut c = vec![0.0; if want_c { n * n } else { 0 }];
    let row_terms = |i: usize, c_row: Option<&mut [f64]>| {
        let p_row = &p[i * n..(i + 1) * n];
        let (t_row, m_row) = (&t[i * n..(i + 1) * n], &mask[i * n..(i + 1) * n]);
        let mut acc = 0.0;
        for ((&pv, &tv), &mv) in p_row.iter().zip(t_row).zip(m_row) {
            let r = pv - tv;
            acc += mv * r * r;
        }
        if let Some(c_row) = c_row {
            for (((cv, &pv), &tv), &mv) in c_row.iter_mut().zip(p_row).zip(t_row).zip(m_row) {
                *cv = mv * (pv - tv) * pv;
            }
        }
        acc
    };
    let row_loss: Vec<f64> = if want_c {
        c.par_chunks_mut(n).enumerate().map(|(i, c_row)| row_terms(i, Some(c_row))).collect()
    } else {
        (0..n).into_par_iter().map(|i| row_terms(i, None)).collect()
    };
    let p = Array2::from_shape_vec((n, n), p).expect("n x n");
    let c = want_c.then(|| Array2::from_shape_vec((n, n), c).expect("n x n"));
    let total = row_loss.iter().sum();
    (p, c, total)
}

/// Which parameterization an [`Objective`] differentiates.
#[derive(Debug, Clone, Copy)]
pub enum Basis<'a> {
    /// `Y = X·W`, penalty on `WᵀW`.
    Linear(ArrayView2<'a, f64>),
    /// `Y = K·A`, penalty on `AᵀKA`.
    Kernel(ArrayView2<'a, f64>),
}

impl<'a> Basis<'a> {
    pub fn matrix(&self) -> ArrayView2<'a, f64> {
        match *self {
            Basis::Linear(x) => x,
            Basis::Kernel(k) => k,
        }
    }

    pub fn param_rows(&self) -> usize {
        self.matrix().ncols()
    }

    pub fn embed(&self, theta: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        ensure_dims(self.param_rows(), theta.nrows())?;
        Ok(self.matrix().dot(&theta))
    }
}

/// Everything produced by one evaluation of the combined objective.
#[derive(Debug, Clone)]
pub struct Evaluation {
    /// `(2 − α_p) J_s + α_p J_p`
    pub total: f64,
    pub similarity_loss: f64,
    pub ortho_penalty: f64,
    pub gradient: Array2<f64>,
    pub embedding: Array2<f64>,
    pub similarity: Array2<f64>,
}

/// The combined training objective for a fixed basis, target and bandwidth.
#[derive(Debug, Clone, Copy)]
pub struct Objective<'a> {
    pub basis: Basis<'a>,
    pub target: ArrayView2<'a, f64>,
    pub mask: ArrayView2<'a, f64>,
    pub sigma_p: f64,
    pub alpha_p: f64,
}

impl<'a> Objective<'a> {
    pub fn new(
        basis: Basis<'a>,
        target: ArrayView2<'a, f64>,
        mask: ArrayView2<'a, f64>,
        sigma_p: f64,
        alpha_p: f64,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha_p) {
            return Err(SefError::InvalidParameter(format!(
                "alpha_p must lie in [0, 1], got {alpha_p}"
            )));
        }
        if !(sigma_p > 0.0) || !sigma_p.is_finite() {
            return Err(SefError::InvalidParameter(format!(
                "similarity bandwidth must be positive, got {sigma_p}"
            )));
        }
        let n = basis.matrix().nrows();
        check_square(n, target)?;
        check_square(n, mask)?;
        mask_norm(mask)?;
        if let Basis::Kernel(k) = basis {
            check_square(n, k)?;
        }
        Ok(Self { basis, target, mask, sigma_p, alpha_p })
    }

    /// Similarity matrix of the embedding produced by `theta`.
    pub fn similarity(&self, theta: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        let y = self.basis.embed(theta)?;
        gaussian_similarity(sq_distances_unchecked(y.view()).view(), self.sigma_p)
    }

    fn penalty_parts(&self, theta: ArrayView2<'_, f64>) -> Result<(f64, Array2<f64>)> {
        let metric = match self.basis {
            Basis::Linear(_) => None,
            Basis::Kernel(k) => Some(k),
        };
        let (g_theta, dev) = gram_deviation(theta, metric)?;
        let m = theta.ncols() as f64;
        Ok((penalty_from_dev(&dev), g_theta.dot(&dev) * (2.0 / (m * m))))
    }

    /// Objective value only.
    pub fn value(&self, theta: ArrayView2<'_, f64>) -> Result<f64> {
        check_params(theta)?;
        let y = self.basis.embed(theta)?;
        let (_, _, sum) = similarity_terms(y.view(), self.target, self.mask, self.sigma_p, false);
        let js = sum / (2.0 * mask_norm(self.mask)?);
        let jp = if self.alpha_p > 0.0 { self.penalty_parts(theta)?.0 } else { 0.0 };
        Ok((2.0 - self.alpha_p) * js + self.alpha_p * jp)
    }

    /// Objective value and gradient with respect to `theta`.
    pub fn evaluate(&self, theta: ArrayView2<'_, f64>) -> Result<Evaluation> {
        check_params(theta)?;
        let y = self.basis.embed(theta)?;
        let norm = mask_norm(self.mask)?;
        let (p, c, sum) = similarity_terms(y.view(), self.target, self.mask, self.sigma_p, true);
        let c = c.expect("requested");
        let js = sum / (2.0 * norm);
        let degree = c.sum_axis(Axis(1)) + c.sum_axis(Axis(0));
        let mut ly = &y * &degree.insert_axis(Axis(1));
        ly -= &c.dot(&y);
        ly -= &c.t().dot(&y);
        let mut grad = self.basis.matrix().t().dot(&ly);
        grad *= -2.0 * (2.0 - self.alpha_p) / (self.sigma_p * norm);
        let mut jp = 0.0;
        if self.alpha_p > 0.0 {
            let (value, g) = self.penalty_parts(theta)?;
            jp = value;
            grad.scaled_add(self.alpha_p, &g);
        }
        Ok(Evaluation {
            total: (2.0 - self.alpha_p) * js + self.alpha_p * jp,
            similarity_loss: js,
            ortho_penalty: jp,
            gradient: grad,
            embedding: y,
            similarity: p,
        })
    }
}

/// Combined objective `(2 − α_p) J_s + α_p J_p` and its gradient.
pub fn total_objective_and_grad<'a>(
    basis: Basis<'a>,
    theta: ArrayView2<'_, f64>,
    target: ArrayView2<'a, f64>,
    mask: ArrayView2<'a, f64>,
    sigma_p: f64,
    alpha_p: f64,
) -> Result<(f64, Array2<f64>)> {
    ensure_finite(theta.iter().copied(), "parameters")?;
    let eval = Objective::new(basis, target, mask, sigma_p, alpha_p)?.evaluate(theta)?;
    Ok((eval.total, eval.gradient))
}
