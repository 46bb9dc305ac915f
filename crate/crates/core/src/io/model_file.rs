use std::fs::File;
use std::io::{BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SefError};
use crate::projections::ProjectionModel;
use crate::trainer::{FitReport, TrainConfig};

pub const MODEL_FORMAT: &str = "sef-model";
pub const MODEL_VERSION: u32 = 1;

/// Self-contained JSON document for a fitted projection. Kernel models
/// carry their preprocessed training rows inline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format: String,
    pub version: u32,
    pub sigma_p: f64,
    pub config: TrainConfig,
    pub report: FitReport,
    pub model: ProjectionModel,
}

impl ModelFile {
    pub fn new(model: ProjectionModel, config: TrainConfig, mut report: FitReport) -> Self {
        report.loss_trace = None;
        Self {
            format: MODEL_FORMAT.to_string(),
            version: MODEL_VERSION,
            sigma_p: report.sigma_p,
            config,
            report,
            model,
        }
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut bytes = serde_json::to_vec_pretty(self).map_err(|e| SefError::Format(e.to_string()))?;
        bytes.push(b'\n');
        Ok(bytes)
    }

    pub fn from_slice(bytes: &[u8]) -> Result<Self> {
        // check the header before committing to the full schema
        #[derive(Deserialize)]
        struct Header {
            format: String,
            version: u32,
        }
        let header: Header = serde_json::from_slice(bytes).map_err(|e| SefError::Format(e.to_string()))?;
        Self::check_header(&header.format, header.version)?;
        serde_json::from_slice(bytes).map_err(|e| SefError::Format(e.to_string()))
    }

    fn check_header(format: &str, version: u32) -> Result<()> {
        if format != MODEL_FORMAT {
            return Err(SefError::Format(format!("not a model file (format '{format}')")));
        }
        if version != MODEL_VERSION {
            return Err(SefError::Format(format!(
                "unsupported model version {version}, expected {MODEL_VERSION}"
            )));
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut f = File::create(path)?;
        f.write_all(&self.to_bytes()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut bytes = Vec::new();
        std::io::Read::read_to_end(&mut BufReader::new(File::open(path)?), &mut bytes)?;
        Self::from_slice(&bytes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::targets::target_pca;
    use crate::trainer::{fit, transform};

    #[test]
    fn round_trip_gives_identical_outputs() {
        let (x, _) = crate::synthetic::gaussian_blobs(2, 10, 4, 3.0, 1.0, 5);
        let cfg = TrainConfig { n_iters: 5, ..TrainConfig::linear(2) };
        let (model, report) = fit(x.view(), &target_pca(20).unwrap(), &cfg).unwrap();
        let file = ModelFile::new(model.clone(), cfg, report);
        let back = ModelFile::from_slice(&file.to_bytes().unwrap()).unwrap();
        assert_eq!(back, file);
        let a = transform(&model, x.view()).unwrap();
        let b = transform(&back.model, x.view()).unwrap();
        assert!(a.iter().zip(b.iter()).all(|(p, q)| p.to_bits() == q.to_bits()));
    }

    #[test]
    fn version_is_checked() {
        let bad = br#"{"format":"sef-model","version":99}"#;
        assert!(matches!(ModelFile::from_slice(bad), Err(SefError::Format(_))));
        let other = br#"{"format":"something","version":1}"#;
        assert!(ModelFile::from_slice(other).is_err());
    }
}
