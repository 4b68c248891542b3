use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::mars::{HingeDirection, HingeTerm};
use super::svr::Kernel;
use crate::error::{Error, Result};
use crate::numerics::DenseMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Stepwise,
    Lasso,
    Mars,
    Svr,
}

impl Algorithm {
    /// Also the tie-break order for picking the best configuration.
    pub const ALL: [Algorithm; 4] = [Algorithm::Stepwise, Algorithm::Lasso, Algorithm::Mars, Algorithm::Svr];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Stepwise => "stepwise",
            Algorithm::Lasso => "lasso",
            Algorithm::Mars => "mars",
            Algorithm::Svr => "svr",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            Algorithm::Stepwise => "Stepwise",
            Algorithm::Lasso => "LASSO",
            Algorithm::Mars => "MARS",
            Algorithm::Svr => "SVR",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown algorithm {s:?} (expected stepwise, lasso, mars or svr)"
                ))
            })
    }
}

/// Algorithm-specific fitted parameters. Feature indices refer to
/// [`TrainedModel::features`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelParams {
    Linear {
        intercept: f64,
        coefficients: Vec<f64>,
    },
    Mars {
        intercept: f64,
        terms: Vec<HingeTerm>,
    },
    Svr {
        kernel: Kernel,
        /// Resolved RBF gamma (unused for the linear kernel).
        gamma: f64,
        bias: f64,
        support_vectors: Vec<Vec<f64>>,
        dual_coefficients: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingInfo {
    pub hyperparameters: serde_json::Value,
    pub iterations: usize,
    pub converged: bool,
    /// Algorithm-specific diagnostics (chosen lambda, GCV, forward-pass RSS...).
    #[serde(default)]
    pub diagnostics: serde_json::Map<String, serde_json::Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub algorithm: Algorithm,
    /// Features the model reads, in the order its parameters use.
    pub features: Vec<String>,
    pub params: ModelParams,
    pub info: TrainingInfo,
}

impl TrainedModel {
    pub fn selected_count(&self) -> usize {
        self.features.len()
    }

    /// Predicts from a matrix whose columns are named by `columns`; only the
    /// model's own features are read.
    pub fn predict(&self, x: &DenseMatrix, columns: &[String]) -> Result<Vec<f64>> {
        if columns.len() != x.cols() {
            return Err(Error::Dimension(format!(
                "{} column names for {} columns",
                columns.len(),
                x.cols()
            )));
        }
        let index: Vec<usize> = self
            .features
            .iter()
            .map(|f| {
                columns
                    .iter()
                    .position(|c| c == f)
                    .ok_or_else(|| Error::MissingColumn(f.clone()))
            })
            .collect::<Result<_>>()?;
        let mut row = vec![0.0; index.len()];
        Ok((0..x.rows())
            .map(|i| {
                let src = x.row(i);
                for (r, &j) in row.iter_mut().zip(&index) {
                    *r = src[j];
                }
                self.predict_row(&row)
            })
            .collect())
    }

    /// Prediction for one row given in [`features`](Self::features) order.
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        match &self.params {
            ModelParams::Linear {
                intercept,
                coefficients,
            } => intercept + crate::numerics::dot(coefficients, row),
            ModelParams::Mars { intercept, terms } => {
                intercept
                    + terms
                        .iter()
                        .map(|t| t.coefficient * hinge(t.direction, row[t.feature], t.knot))
                        .sum::<f64>()
            }
            ModelParams::Svr {
                kernel,
                gamma,
                bias,
                support_vectors,
                dual_coefficients,
            } => {
                bias + support_vectors
                    .iter()
                    .zip(dual_coefficients)
                    .map(|(sv, c)| c * kernel.eval(*gamma, sv, row))
                    .sum::<f64>()
            }
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()? + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

#[inline]
pub(crate) fn hinge(direction: HingeDirection, x: f64, knot: f64) -> f64 {
    match direction {
        HingeDirection::Positive => (x - knot).max(0.0),
        HingeDirection::Negative => (knot - x).max(0.0),
    }
}
