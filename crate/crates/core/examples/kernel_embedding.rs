// Kernel projections: the same target trained through a linear map and
// through RBF and polynomial kernels. Kernel models keep their training
// set and map new points through `K(x_new, X_train) · A`.
//
// Run with: cargo run --release --example kernel_embedding

use ndarray::Axis;
use sef::prelude::*;
use sef::reference::accuracy;
use sef::synthetic::gaussian_blobs;

fn main() -> sef::Result<()> {
    run_example()
}

pub fn run_example() -> sef::Result<()> {
    let (x, all) = gaussian_blobs(3, 80, 6, 2.0, 1.2, 5);
    let half = x.nrows() / 2;
    let (x_train, x_test) = x.view().split_at(Axis(0), half);
    let labels = Labels::new(all.ids()[..half].to_vec())?;
    let target = target_lda(&labels)?;

    let configs = [
        ("linear", TrainConfig::linear(2)),
        ("rbf (auto width)", TrainConfig::kernel(2, KernelChoice::RbfAuto)),
        (
            "polynomial",
            TrainConfig {
                n_iters: 300,
                ..TrainConfig::kernel(2, KernelChoice::Fixed { spec: KernelSpec::Polynomial { degree: 2, coef: 1.0 } })
            },
        ),
    ];
    for (name, config) in configs {
        let (model, report) = fit(x_train, &target, &config)?;
        let ncc = NearestCentroid::fit(transform(&model, x_train)?.view(), &labels)?;
        let acc = accuracy(&ncc.predict_all(transform(&model, x_test)?.view())?, &all.ids()[half..]);
        if let ProjectionModel::Kernel(k) = &model {
            println!("{name:>16}: kernel {:?}", k.kernel);
        }
        println!("{name:>16}: loss {:.4} -> {:.4}, NCC accuracy {acc:.3}", report.initial_loss, report.final_loss);
    }
    Ok(())
}
