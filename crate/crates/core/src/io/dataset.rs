use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use ndarray::{Array2, ArrayView2};

use crate::error::{ensure_dims, Result, SefError};
use crate::labels::Labels;

/// Name of the optional class column.
pub const LABEL_COLUMN: &str = "label";

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub features: Array2<f64>,
    pub feature_names: Vec<String>,
    /// Raw label strings, one per row, when a `label` column exists.
    pub label_names: Option<Vec<String>>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.features.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.features.nrows() == 0
    }

    /// Dense labels in first-appearance order, with the class name of each id.
    pub fn labels(&self) -> Result<Option<(Labels, Vec<String>)>> {
        self.label_names.as_deref().map(Labels::from_names).transpose()
    }

    /// Labels mapped onto an existing class list; unknown names get ids
    /// after the known ones.
    pub fn labels_against(&self, classes: &[String]) -> Option<Vec<usize>> {
        let names = self.label_names.as_ref()?;
        let mut extra: Vec<&str> = Vec::new();
        Some(
            names
                .iter()
                .map(|n| match classes.iter().position(|c| c == n) {
                    Some(id) => id,
                    None => {
                        let pos = extra.iter().position(|e| e == n).unwrap_or_else(|| {
                            extra.push(n);
                            extra.len() - 1
                        });
                        classes.len() + pos
                    }
                })
                .collect(),
        )
    }
}

fn csv_err(e: csv::Error) -> SefError {
    SefError::Format(e.to_string())
}

/// Parses a header-bearing CSV. Every column except `label` must be numeric.
pub fn parse_dataset(reader: impl Read) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers = rdr.headers().map_err(csv_err)?.clone();
    if headers.is_empty() {
        return Err(SefError::InvalidData("CSV has no header row".into()));
    }
    let label_idx = headers.iter().position(|h| h.trim() == LABEL_COLUMN);
    let feature_names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|(i, _)| Some(*i) != label_idx)
        .map(|(_, h)| h.trim().to_string())
        .collect();
    let mut values = Vec::new();
    let mut labels = label_idx.map(|_| Vec::new());
    let mut rows = 0usize;
    for (line, record) in rdr.records().enumerate() {
        let record = record.map_err(csv_err)?;
        for (i, field) in record.iter().enumerate() {
            if Some(i) == label_idx {
                if let Some(l) = labels.as_mut() {
                    l.push(field.trim().to_string());
                }
                continue;
            }
            let v: f64 = field.trim().parse().map_err(|_| {
                SefError::InvalidData(format!(
                    "row {}, column '{}': '{}' is not a number",
                    line + 1,
                    headers.get(i).unwrap_or("?"),
                    field
                ))
            })?;
            if !v.is_finite() {
                return Err(SefError::InvalidData(format!("row {}: non-finite value", line + 1)));
            }
            values.push(v);
        }
        rows += 1;
    }
    let features = Array2::from_shape_vec((rows, feature_names.len()), values)
        .map_err(|e| SefError::InvalidData(e.to_string()))?;
    Ok(Dataset { features, feature_names, label_names: labels })
}

pub fn read_dataset(path: &Path) -> Result<Dataset> {
    parse_dataset(File::open(path)?)
}

/// Numeric matrix from a CSV, ignoring any `label` column.
pub fn read_matrix_csv(path: &Path) -> Result<Array2<f64>> {
    Ok(read_dataset(path)?.features)
}

/// Writes `dim_0..dim_{m-1}` (plus `label` when given), 17 significant digits.
pub fn write_embedding(
    mut out: impl Write,
    y: ArrayView2<'_, f64>,
    labels: Option<&[String]>,
) -> Result<()> {
    if let Some(l) = labels {
        ensure_dims(y.nrows(), l.len())?;
    }
    let mut w = csv::Writer::from_writer(&mut out);
    let mut header: Vec<String> = (0..y.ncols()).map(|i| format!("dim_{i}")).collect();
    if labels.is_some() {
        header.push(LABEL_COLUMN.to_string());
    }
    w.write_record(&header).map_err(csv_err)?;
    for (i, row) in y.rows().into_iter().enumerate() {
        let mut rec: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        if let Some(l) = labels {
            rec.push(l[i].clone());
        }
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_embedding_csv(path: &Path, y: ArrayView2<'_, f64>, labels: Option<&[String]>) -> Result<()> {
    let file = File::create(path)?;
    write_embedding(std::io::BufWriter::new(file), y, labels)
}
