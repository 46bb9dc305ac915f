//! On-disk formats: CSV datasets and embeddings, model files, target files.
//! Byte layouts are described in `docs/FORMATS.md`.

mod dataset;
mod model_file;
mod target_file;

pub use dataset::{read_dataset, read_matrix_csv, write_embedding_csv, Dataset, LABEL_COLUMN};
pub use model_file::{ModelFile, MODEL_FORMAT, MODEL_VERSION};
pub use target_file::{read_target, write_target, TargetMeta, TARGET_MAGIC, TARGET_VERSION};
