// The on-disk formats: build a target, store it, fit from the stored copy,
// save the model and check that the reloaded model projects identically.
// This is the library-level equivalent of
// `sef make-target` → `sef fit` → `sef transform`.
//
// Run with: cargo run --release --example model_files

use sef::io::{read_dataset, read_target, write_embedding_csv, write_target, ModelFile, TargetMeta};
use sef::prelude::*;
use sef::synthetic::gaussian_blobs;

fn main() -> sef::Result<()> {
    run_example()
}

pub fn run_example() -> sef::Result<()> {
    let dir = std::env::temp_dir().join(format!("sef-model-files-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;

    let (x, labels) = gaussian_blobs(3, 25, 5, 3.0, 1.0, 9);
    let names: Vec<String> = labels.ids().iter().map(|c| format!("class-{c}")).collect();
    let data_path = dir.join("data.csv");
    write_embedding_csv(&data_path, x.view(), Some(&names))?;

    let dataset = read_dataset(&data_path)?;
    let (labels, classes) = dataset.labels()?.expect("label column");
    println!("read {} samples, classes {:?}", dataset.len(), classes);

    let target_path = dir.join("lda.target");
    let meta = TargetMeta { kind: "lda".into(), n: dataset.len(), sigma: None, params: Default::default() };
    write_target(&target_path, &meta, &target_lda(&labels)?)?;
    let (meta, target) = read_target(&target_path)?;
    println!("target '{}' for {} samples, {} bytes", meta.kind, meta.n, std::fs::metadata(&target_path)?.len());

    let config = TrainConfig::linear(2);
    let (model, report) = fit(dataset.features.view(), &target, &config)?;
    let model_path = dir.join("model.json");
    ModelFile::new(model.clone(), config, report).save(&model_path)?;

    let reloaded = ModelFile::load(&model_path)?;
    let a = transform(&model, dataset.features.view())?;
    let b = transform(&reloaded.model, dataset.features.view())?;
    let identical = a.iter().zip(b.iter()).all(|(p, q)| p.to_bits() == q.to_bits());
    println!("reloaded model (sigma_P {:e}) reproduces projections bit for bit: {identical}", reloaded.sigma_p);

    let out = dir.join("embedding.csv");
    write_embedding_csv(&out, b.view(), dataset.label_names.as_deref())?;
    println!("embedding written to {}", out.display());
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}
