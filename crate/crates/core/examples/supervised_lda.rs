// Supervised embedding with the LDA-style target and a nearest-centroid
// classifier in the learned space. Unlike classical LDA, the number of
// output dimensions is not capped at `classes - 1`.
//
// Run with: cargo run --release --example supervised_lda

use ndarray::Axis;
use sef::prelude::*;
use sef::reference::accuracy;
use sef::synthetic::gaussian_blobs;

fn main() -> sef::Result<()> {
    run_example()
}

pub fn run_example() -> sef::Result<()> {
    // Class ids cycle 0,1,2,3,... so both halves hold every class equally.
    let (x, all) = gaussian_blobs(4, 120, 12, 2.0, 1.5, 1);
    let half = x.nrows() / 2;
    let (x_train, x_test) = x.view().split_at(Axis(0), half);
    let labels = Labels::new(all.ids()[..half].to_vec())?;
    let test_ids = &all.ids()[half..];
    let target = target_lda(&labels)?;

    for dims in [1, 3, 6] {
        let (model, report) = fit(x_train.view(), &target, &TrainConfig::linear(dims))?;
        let ncc = NearestCentroid::fit(transform(&model, x_train.view())?.view(), &labels)?;
        let predicted = ncc.predict_all(transform(&model, x_test.view())?.view())?;
        println!(
            "{dims} dims: loss {:.4} -> {:.4}, NCC accuracy {:.3}",
            report.initial_loss,
            report.final_loss,
            accuracy(&predicted, test_ids)
        );
    }
    Ok(())
}
