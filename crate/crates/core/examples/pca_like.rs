// Unsupervised PCA-like embedding: a zero target pushes every pair apart,
// which maximizes spread much like PCA does.
//
// Run with: cargo run --release --example pca_like

use ndarray::Axis;
use sef::prelude::*;
use sef::preprocess::{preprocess_apply, preprocess_fit, ScalingMode};
use sef::reference::pca_fit;
use sef::synthetic::gaussian_blobs;

fn main() -> sef::Result<()> {
    run_example()
}

pub fn run_example() -> sef::Result<()> {
    let (x, _) = gaussian_blobs(4, 50, 10, 3.0, 1.0, 7);

    let config = TrainConfig { record_loss: true, ..TrainConfig::linear(2) };
    let (model, report) = fit(x.view(), &target_pca(x.nrows())?, &config)?;
    let trace = report.loss_trace.as_deref().unwrap_or_default();
    println!("objective: {:.5} -> {:.5} over {} iterations", report.initial_loss, report.final_loss, trace.len() - 1);
    println!("sigma_P picked by the histogram search: {:e}", report.sigma_p);

    let y = transform(&model, x.view())?;
    let xz = preprocess_apply(x.view(), &preprocess_fit(x.view(), ScalingMode::ZNormalize)?)?;
    let pca = pca_fit(xz.view(), 2)?;
    let spread = |v: &ndarray::Array2<f64>| v.var_axis(Axis(0), 0.0).sum();
    println!("total variance, PCA(2):      {:.3}", spread(&pca.transform(xz.view())?));
    println!("total variance, learned(2):  {:.3}", spread(&y));
    Ok(())
}
