//! Adam with bias-corrected moment estimates.

use ndarray::{Array2, ArrayView2, Zip};

use crate::error::{ensure_dims, Result, SefError};

pub const DEFAULT_BETA1: f64 = 0.9;
pub const DEFAULT_BETA2: f64 = 0.999;
pub const DEFAULT_EPS: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub first_moment: Array2<f64>,
    pub second_moment: Array2<f64>,
    pub step: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl AdamState {
    pub fn new(shape: (usize, usize)) -> Self {
        Self::with_hyperparameters(shape, DEFAULT_BETA1, DEFAULT_BETA2, DEFAULT_EPS)
            .expect("defaults are valid")
    }

    pub fn with_hyperparameters(
        shape: (usize, usize),
        beta1: f64,
        beta2: f64,
        eps: f64,
    ) -> Result<Self> {
        for (name, b) in [("beta1", beta1), ("beta2", beta2)] {
            if !(b > 0.0 && b < 1.0) {
                return Err(SefError::InvalidParameter(format!("{name} must lie in (0, 1), got {b}")));
            }
        }
        if !(eps > 0.0) {
            return Err(SefError::InvalidParameter(format!("eps must be positive, got {eps}")));
        }
        Ok(Self {
            first_moment: Array2::zeros(shape),
            second_moment: Array2::zeros(shape),
            step: 0,
            beta1,
            beta2,
            eps,
        })
    }

    /// One in-place update of `params` along `-grad`.
    pub fn step(&mut self, params: &mut Array2<f64>, grad: ArrayView2<'_, f64>, lr: f64) -> Result<()> {
        ensure_dims(self.first_moment.nrows(), params.nrows())?;
        ensure_dims(self.first_moment.ncols(), params.ncols())?;
        ensure_dims(params.nrows(), grad.nrows())?;
        ensure_dims(params.ncols(), grad.ncols())?;
        if !(lr > 0.0) || !lr.is_finite() {
            return Err(SefError::InvalidParameter(format!("learning rate must be positive, got {lr}")));
        }
        self.step += 1;
        let t = self.step as i32;
        let (b1, b2, eps) = (self.beta1, self.beta2, self.eps);
        let c1 = 1.0 - b1.powi(t);
        let c2 = 1.0 - b2.powi(t);
        Zip::from(params)
            .and(&mut self.first_moment)
            .and(&mut self.second_moment)
            .and(grad)
            .for_each(|p, m, v, &g| {
                *m = b1 * *m + (1.0 - b1) * g;
                *v = b2 * *v + (1.0 - b2) * g * g;
                let m_hat = *m / c1;
                let v_hat = *v / c2;
                *p -= lr * m_hat / (v_hat.sqrt() + eps);
            });
        Ok(())
    }
}

/// Functional form of [`AdamState::step`].
pub fn adam_step(
    params: ArrayView2<'_, f64>,
    grad: ArrayView2<'_, f64>,
    state: &AdamState,
    lr: f64,
) -> Result<(Array2<f64>, AdamState)> {
    let mut p = params.to_owned();
    let mut s = state.clone();
    s.step(&mut p, grad, lr)?;
    Ok((p, s))
}
