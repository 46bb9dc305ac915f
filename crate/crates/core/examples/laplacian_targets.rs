// Neighbourhood-preserving targets on a Swiss roll. The LE-style target
// keeps the input-space similarities of non-neighbours; the LapPCA-style
// target pushes non-neighbours to zero similarity instead.
//
// Run with: cargo run --release --example laplacian_targets

use ndarray::Array2;
use sef::prelude::*;
use sef::similarity::{knn_indicator, pairwise_sq_distances};
use sef::synthetic::swiss_roll;

/// Fraction of each point's k nearest embedded neighbours that were also
/// among its k nearest input neighbours.
fn neighbourhood_overlap(x: &Array2<f64>, y: &Array2<f64>, k: usize) -> sef::Result<f64> {
    let a = knn_indicator(x.view(), k)?;
    let b = knn_indicator(y.view(), k)?;
    let shared = a.iter().zip(b.iter()).filter(|(p, q)| **p && **q).count();
    Ok(shared as f64 / a.iter().filter(|p| **p).count() as f64)
}

fn main() -> sef::Result<()> {
    run_example()
}

pub fn run_example() -> sef::Result<()> {
    let (x, _) = swiss_roll(200, 10.0, 0.05, 3);
    let k = 8;
    let sigma_le = Bandwidth::auto().resolve(pairwise_sq_distances(x.view())?.view())?;

    let cases = [
        ("LE", target_le(x.view(), k, sigma_le)?),
        ("LapPCA", target_lap_pca(x.view(), k)?),
    ];
    for (name, target) in cases {
        let (model, report) = fit(x.view(), &target, &TrainConfig::linear(2))?;
        let y = transform(&model, x.view())?;
        println!(
            "{name:>6}: loss {:.4} -> {:.4}, neighbourhood overlap {:.3}",
            report.initial_loss,
            report.final_loss,
            neighbourhood_overlap(&x, &y, k)?
        );
    }
    Ok(())
}
