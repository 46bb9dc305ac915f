//! Similarity-induced embeddings.
//!
//! A projection (linear, or kernel through coefficients over the training
//! set) is learned so that heat-kernel similarities between projected points
//! match a target similarity matrix. The target decides what kind of
//! reduction you get: PCA-like spreading, class separation, neighbourhood
//! preservation, imitation of another embedding, or SVM-guided analysis.
//!
//! ```no_run
//! use sef::prelude::*;
//!
//! let (x, labels) = sef::synthetic::gaussian_blobs(3, 50, 10, 4.0, 1.0, 7);
//! let target = target_lda(&labels)?;
//! let (model, report) = fit(x.view(), &target, &TrainConfig::linear(2))?;
//! let embedded = transform(&model, x.view())?;
//! assert!(report.final_loss < report.initial_loss);
//! # Ok::<(), sef::SefError>(())
//! ```
//!
//! The runnable programs under `examples/` walk through each capability.

pub mod cli;
pub mod error;
pub mod gradcheck;
pub mod io;
pub mod labels;
pub mod optimizer;
pub mod preprocess;
pub mod projections;
pub mod reference;
pub mod similarity;
pub mod synthetic;
pub mod targets;
pub mod trainer;

pub use error::{Result, SefError};

pub mod prelude {
    pub use crate::labels::Labels;
    pub use crate::projections::{KernelSpec, ProjectionModel};
    pub use crate::reference::{NearestCentroid, SvmParams};
    pub use crate::similarity::{Bandwidth, SigmaGrid};
    pub use crate::targets::{
        target_clone, target_lap_pca, target_lda, target_le, target_pca, target_svm, TargetPair,
    };
    pub use crate::trainer::{fit, transform, FitReport, KernelChoice, TrainConfig};
}
