//! Every program in examples/ is compiled into this test and run once.

#[allow(dead_code)]
mod pca_like {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/pca_like.rs"));
}

#[test]
fn pca_like_runs() {
    pca_like::run_example().expect("pca_like example should run");
}

#[allow(dead_code)]
mod supervised_lda {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/supervised_lda.rs"));
}

#[test]
fn supervised_lda_runs() {
    supervised_lda::run_example().expect("supervised_lda example should run");
}

#[allow(dead_code)]
mod laplacian_targets {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/laplacian_targets.rs"));
}

#[test]
fn laplacian_targets_runs() {
    laplacian_targets::run_example().expect("laplacian_targets example should run");
}

#[allow(dead_code)]
mod clone_isomap {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/clone_isomap.rs"));
}

#[test]
fn clone_isomap_runs() {
    clone_isomap::run_example().expect("clone_isomap example should run");
}

#[allow(dead_code)]
mod svm_analysis {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/svm_analysis.rs"));
}

#[test]
fn svm_analysis_runs() {
    svm_analysis::run_example().expect("svm_analysis example should run");
}

#[allow(dead_code)]
mod kernel_embedding {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/kernel_embedding.rs"));
}

#[test]
fn kernel_embedding_runs() {
    kernel_embedding::run_example().expect("kernel_embedding example should run");
}

#[allow(dead_code)]
mod gradient_check {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/gradient_check.rs"));
}

#[test]
fn gradient_check_runs() {
    gradient_check::run_example().expect("gradient_check example should run");
}

#[allow(dead_code)]
mod model_files {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/model_files.rs"));
}

#[test]
fn model_files_runs() {
    model_files::run_example().expect("model_files example should run");
}
