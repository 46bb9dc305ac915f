//! Classical methods used for initialization, target construction and
//! evaluation.

mod eigen;
mod isomap;
mod ncc;
mod pca;
mod svm;

pub use eigen::{sym_eigh, EigenDecomposition};
pub use isomap::{classical_mds, geodesic_distances, isomap};
pub use ncc::{accuracy, NearestCentroid};
pub use pca::{kpca_fit, pca_fit, Pca, KPCA_EIGEN_FLOOR};
pub use svm::{svm_ovo_fit, LinearSvm, OvoSvmSet, SvmParams};
