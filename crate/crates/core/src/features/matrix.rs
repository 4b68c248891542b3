use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::extract::{extract_behavioral, extract_demographic, extract_linguistic, WindowSpec};
use super::registry::{FeatureColumn, FeatureFamily, FeatureRegistry, FeatureSet};
use crate::data_model::Dataset;
use crate::error::{Error, Result};
use crate::lexicon::Lexicon;
use crate::numerics::DenseMatrix;

/// Users × named features. Column order follows the registry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    pub user_ids: Vec<String>,
    pub columns: Vec<FeatureColumn>,
    pub values: DenseMatrix,
    pub window: WindowSpec,
}

impl FeatureMatrix {
    pub fn column_names(&self) -> Vec<String> {
        self.columns.iter().map(|c| c.name.clone()).collect()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn count(&self, family: FeatureFamily) -> usize {
        self.columns.iter().filter(|c| c.family == family).count()
    }

    /// Columns belonging to `families`, order preserved.
    pub fn select_families(&self, families: FeatureSet) -> FeatureMatrix {
        let keep: Vec<usize> = self
            .columns
            .iter()
            .enumerate()
            .filter(|(_, c)| families.contains(c.family))
            .map(|(i, _)| i)
            .collect();
        FeatureMatrix {
            user_ids: self.user_ids.clone(),
            columns: keep.iter().map(|&i| self.columns[i].clone()).collect(),
            values: self.values.select_columns(&keep),
            window: self.window,
        }
    }

    /// Writes `user_id,<feature...>` CSV.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut w = csv::Writer::from_path(path)?;
        let mut header = vec!["user_id".to_string()];
        header.extend(self.column_names());
        w.write_record(&header)?;
        for (i, id) in self.user_ids.iter().enumerate() {
            let mut row = vec![id.clone()];
            row.extend(self.values.row(i).iter().map(|v| v.to_string()));
            w.write_record(&row)?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    /// Reads a CSV written by [`write_csv`](Self::write_csv). Families are
    /// inferred from the column names; the window is not stored in CSV and is
    /// taken from `window`.
    pub fn read_csv(path: impl AsRef<Path>, window: WindowSpec) -> Result<Self> {
        let path = path.as_ref();
        let mut r = csv::Reader::from_path(path)?;
        let header = r.headers()?.clone();
        if header.get(0) != Some("user_id") {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: 1,
                message: "first column must be user_id".into(),
            });
        }
        let columns = header
            .iter()
            .skip(1)
            .map(|name| {
                FeatureRegistry::family_of(name)
                    .map(|family| FeatureColumn {
                        name: name.to_string(),
                        family,
                    })
                    .ok_or_else(|| Error::Parse {
                        path: path.to_path_buf(),
                        line: 1,
                        message: format!("unknown feature column {name:?}"),
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut user_ids = Vec::new();
        let mut data = Vec::new();
        for (i, rec) in r.records().enumerate() {
            let rec = rec?;
            user_ids.push(rec.get(0).unwrap_or_default().to_string());
            for field in rec.iter().skip(1) {
                data.push(field.parse::<f64>().map_err(|e| Error::Parse {
                    path: path.to_path_buf(),
                    line: i + 2,
                    message: format!("bad number {field:?}: {e}"),
                })?);
            }
        }
        let values = DenseMatrix::from_vec(user_ids.len(), columns.len(), data);
        Ok(Self {
            user_ids,
            columns,
            values,
            window,
        })
    }
}

/// Extracts the requested feature families for every user, in dataset order.
pub fn build_matrix(
    dataset: &Dataset,
    families: FeatureSet,
    window: &WindowSpec,
    lexicon: Option<&Lexicon>,
) -> Result<FeatureMatrix> {
    if families.is_empty() {
        return Err(Error::Config("no feature family selected".into()));
    }
    if !window.is_valid() {
        return Err(Error::Config("window durations must be non-negative".into()));
    }
    if families.linguistic && lexicon.is_none() {
        return Err(Error::Config(
            "linguistic features (L) requested without a lexicon".into(),
        ));
    }
    let registry = FeatureRegistry::new(if families.linguistic { lexicon } else { None });
    let columns: Vec<FeatureColumn> = registry
        .columns()
        .iter()
        .filter(|c| families.contains(c.family))
        .cloned()
        .collect();

    let rows: Vec<Vec<f64>> = dataset
        .records()
        .par_iter()
        .map(|r| {
            let mut row = Vec::with_capacity(columns.len());
            if families.demographic {
                row.extend(extract_demographic(&r.profile));
            }
            if families.behavioral {
                row.extend(extract_behavioral(r, window));
            }
            if let (true, Some(lex)) = (families.linguistic, lexicon) {
                row.extend(extract_linguistic(r, window, lex));
            }
            row
        })
        .collect();
    let values = if rows.is_empty() {
        DenseMatrix::zeros(0, columns.len())
    } else {
        DenseMatrix::from_rows(&rows)
    };
    Ok(FeatureMatrix {
        user_ids: dataset.records().iter().map(|r| r.profile.user_id.clone()).collect(),
        columns,
        values,
        window: *window,
    })
}
