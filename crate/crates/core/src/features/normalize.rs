use serde::{Deserialize, Serialize};

use super::matrix::FeatureMatrix;
use crate::error::{Error, Result};
use crate::numerics::DenseMatrix;

/// Per-column min/max learned from a set of rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationParams {
    pub columns: Vec<String>,
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl NormalizationParams {
    /// Min/max of each column over `rows` only.
    pub fn fit(values: &DenseMatrix, rows: &[usize], columns: Vec<String>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Dimension("normalization needs at least one row".into()));
        }
        if columns.len() != values.cols() {
            return Err(Error::Dimension(format!(
                "{} column names for {} columns",
                columns.len(),
                values.cols()
            )));
        }
        let mut min = vec![f64::INFINITY; values.cols()];
        let mut max = vec![f64::NEG_INFINITY; values.cols()];
        for &i in rows {
            for (j, &v) in values.row(i).iter().enumerate() {
                min[j] = min[j].min(v);
                max[j] = max[j].max(v);
            }
        }
        Ok(Self { columns, min, max })
    }

    /// `(x − min) / (max − min)` clamped to `[0, 1]`; constant columns map to 0.
    pub fn transform(&self, values: &DenseMatrix) -> Result<DenseMatrix> {
        if values.cols() != self.min.len() {
            return Err(Error::Dimension(format!(
                "matrix has {} columns, normalization has {}",
                values.cols(),
                self.min.len()
            )));
        }
        let mut out = values.clone();
        for i in 0..out.rows() {
            for (j, v) in out.row_mut(i).iter_mut().enumerate() {
                *v = self.scale(j, *v);
            }
        }
        Ok(out)
    }

    fn scale(&self, j: usize, v: f64) -> f64 {
        let span = self.max[j] - self.min[j];
        if span <= 0.0 {
            0.0
        } else {
            ((v - self.min[j]) / span).clamp(0.0, 1.0)
        }
    }
}

pub fn fit_normalization(matrix: &FeatureMatrix, rows: &[usize]) -> Result<NormalizationParams> {
    NormalizationParams::fit(&matrix.values, rows, matrix.column_names())
}

pub fn apply_normalization(matrix: &FeatureMatrix, params: &NormalizationParams) -> Result<FeatureMatrix> {
    let names = matrix.column_names();
    if names != params.columns {
        return Err(Error::Dimension(format!(
            "normalization columns {:?} do not match matrix columns {:?}",
            params.columns, names
        )));
    }
    Ok(FeatureMatrix {
        values: params.transform(&matrix.values)?,
        ..matrix.clone()
    })
}
