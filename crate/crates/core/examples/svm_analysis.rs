// SVM-driven analysis: one-vs-one linear SVMs define the target, and a
// nearest-centroid classifier in the learned space replaces the ensemble
// of binary classifiers at prediction time.
//
// Run with: cargo run --release --example svm_analysis

use std::time::Instant;

use ndarray::Axis;
use sef::prelude::*;
use sef::preprocess::{preprocess_apply, preprocess_fit, ScalingMode};
use sef::reference::{accuracy, svm_ovo_fit};
use sef::synthetic::gaussian_blobs;

fn main() -> sef::Result<()> {
    run_example()
}

pub fn run_example() -> sef::Result<()> {
    let (x, all) = gaussian_blobs(3, 200, 10, 1.5, 1.5, 21);
    let half = x.nrows() / 2;
    let (x_train, x_test) = x.view().split_at(Axis(0), half);
    let labels = Labels::new(all.ids()[..half].to_vec())?;
    let truth = &all.ids()[half..];

    let stats = preprocess_fit(x_train, ScalingMode::ZNormalize)?;
    let (train_z, test_z) = (preprocess_apply(x_train, &stats)?, preprocess_apply(x_test, &stats)?);
    let svms = svm_ovo_fit(train_z.view(), &labels, &SvmParams::default())?;
    let start = Instant::now();
    let svm_pred: Vec<usize> = test_z.rows().into_iter().map(|r| svms.predict(r)).collect();
    let svm_time = start.elapsed();

    let target = target_svm(&svms.decision_table(train_z.view())?, &labels, &Bandwidth::auto())?;
    let config = TrainConfig { alpha_p: 0.001, ..TrainConfig::linear(labels.n_classes()) };
    let (model, _) = fit(x_train, &target, &config)?;
    let ncc = NearestCentroid::fit(transform(&model, x_train)?.view(), &labels)?;
    let start = Instant::now();
    let ncc_pred = ncc.predict_all(transform(&model, x_test)?.view())?;
    let ncc_time = start.elapsed();

    let raw = NearestCentroid::fit(x_train, &labels)?.predict_all(x_test)?;
    println!("raw features + NCC:     {:.3}", accuracy(&raw, truth));
    println!("learned space + NCC:    {:.3}  ({:?} for {} samples)", accuracy(&ncc_pred, truth), ncc_time, truth.len());
    println!("one-vs-one SVM ensemble: {:.3}  ({:?})", accuracy(&svm_pred, truth), svm_time);
    Ok(())
}
