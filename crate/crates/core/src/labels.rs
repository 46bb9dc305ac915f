use serde::{Deserialize, Serialize};

use crate::error::{Result, SefError};

/// Dense class ids `0..n_classes`, every class present at least once.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Labels {
    ids: Vec<usize>,
    n_classes: usize,
}

impl Labels {
    pub fn new(ids: Vec<usize>) -> Result<Self> {
        if ids.is_empty() {
            return Err(SefError::InvalidLabels("label vector is empty".into()));
        }
        let n_classes = ids.iter().max().map_or(0, |m| m + 1);
        let mut seen = vec![false; n_classes];
        for &c in &ids {
            seen[c] = true;
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(SefError::InvalidLabels(format!("class {missing} has no samples")));
        }
        Ok(Self { ids, n_classes })
    }

    /// Maps arbitrary names to dense ids in order of first appearance.
    /// Returns the labels and the name of each class id.
    pub fn from_names<S: AsRef<str>>(names: &[S]) -> Result<(Self, Vec<String>)> {
        let mut classes: Vec<String> = Vec::new();
        let mut ids = Vec::with_capacity(names.len());
        for name in names {
            let name = name.as_ref();
            let id = match classes.iter().position(|c| c == name) {
                Some(id) => id,
                None => {
                    classes.push(name.to_string());
                    classes.len() - 1
                }
            };
            ids.push(id);
        }
        Ok((Self::new(ids)?, classes))
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn ids(&self) -> &[usize] {
        &self.ids
    }

    pub fn get(&self, i: usize) -> usize {
        self.ids[i]
    }

    /// Sample indices of each class.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n_classes];
        for (i, &c) in self.ids.iter().enumerate() {
            out[c].push(i);
        }
        out
    }

    pub(crate) fn require_multiclass(&self) -> Result<()> {
        if self.n_classes < 2 {
            Err(SefError::InvalidLabels(format!(
                "at least two classes are required, got {}",
                self.n_classes
            )))
        } else {
            Ok(())
        }
    }
}
