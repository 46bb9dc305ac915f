// Out-of-sample extension by cloning: ISOMAP has no mapping for new points,
// so a kernel projection is trained to reproduce the similarities of an
// ISOMAP embedding and then applied to unseen samples.
//
// Run with: cargo run --release --example clone_isomap

use ndarray::{Array2, Axis};
use sef::prelude::*;
use sef::reference::isomap;
use sef::synthetic::swiss_roll;

/// Absolute Pearson correlation of two columns.
fn abs_corr(a: ndarray::ArrayView1<'_, f64>, b: ndarray::ArrayView1<'_, f64>) -> f64 {
    let (ma, mb) = (a.mean().unwrap_or(0.0), b.mean().unwrap_or(0.0));
    let cov: f64 = a.iter().zip(b).map(|(p, q)| (p - ma) * (q - mb)).sum();
    let va: f64 = a.iter().map(|p| (p - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|q| (q - mb).powi(2)).sum();
    (cov / (va * vb).sqrt()).abs()
}

fn best_match(y: &Array2<f64>, latent: ndarray::ArrayView1<'_, f64>) -> f64 {
    y.axis_iter(Axis(1)).map(|col| abs_corr(col, latent)).fold(0.0, f64::max)
}

fn main() -> sef::Result<()> {
    run_example()
}

pub fn run_example() -> sef::Result<()> {
    let (x, latent) = swiss_roll(400, 10.0, 0.05, 11);
    let (x_train, x_new) = x.view().split_at(Axis(0), 250);
    let angle_new = latent.column(0).slice(ndarray::s![250..]).to_owned();

    let reference = isomap(x_train, 10, 2)?;
    let target = target_clone(reference.view(), &Bandwidth::auto())?;
    println!("clone target bandwidth: {:e}", target.sigma.unwrap_or(f64::NAN));

    let config = TrainConfig::kernel(2, KernelChoice::RbfAuto);
    let (model, report) = fit(x_train, &target, &config)?;
    println!("objective: {:.5} -> {:.5}", report.initial_loss, report.final_loss);

    let y_new = transform(&model, x_new)?;
    println!(
        "unseen points: |corr| between an embedding axis and the roll angle = {:.3}",
        best_match(&y_new, angle_new.view())
    );
    Ok(())
}
