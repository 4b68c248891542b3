use serde::{Deserialize, Serialize};

use super::folds::FoldPlan;
use super::stats::pearson;
use crate::data_model::{Dataset, Dimension};
use crate::error::{Error, Result};
use crate::features::{build_matrix, fit_normalization, FeatureMatrix, FeatureSet, NormalizationParams, WindowSpec};
use crate::lexicon::Lexicon;
use crate::regressors::{fit, Algorithm, Hyperparameters, RegressionProblem, TrainedModel};

/// One grid cell: a dimension scored with one feature set and algorithm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub dimension: Dimension,
    pub families: FeatureSet,
    pub algorithm: Algorithm,
    /// Pearson γ over all out-of-fold predictions; `None` when undefined.
    pub gamma_pooled: Option<f64>,
    pub gamma_per_fold: Vec<Option<f64>>,
    /// Mean number of features the fold models read.
    pub mean_selected_features: f64,
    /// Whether every fold's solver converged.
    pub converged: bool,
    /// Out-of-fold prediction for every row, in dataset order.
    pub predictions: Vec<f64>,
}

/// A fold's model together with the normalization it was trained under.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldFit {
    pub normalization: NormalizationParams,
    pub model: TrainedModel,
}

impl FoldFit {
    pub fn predict(&self, matrix: &FeatureMatrix, rows: &[usize]) -> Result<Vec<f64>> {
        let x = self.normalization.transform(&matrix.values.select_rows(rows))?;
        self.model.predict(&x, &self.normalization.columns)
    }
}

/// Fits normalization and a model on `train` rows only.
pub fn fit_fold(
    matrix: &FeatureMatrix,
    labels: &[f64],
    train: &[usize],
    algorithm: Algorithm,
    hp: &Hyperparameters,
) -> Result<FoldFit> {
    let normalization = fit_normalization(matrix, train)?;
    let x = normalization.transform(&matrix.values.select_rows(train))?;
    let y = train.iter().map(|&i| labels[i]).collect();
    let problem = RegressionProblem::new(x, y, normalization.columns.clone())?;
    let model = fit(algorithm, &problem, hp)?;
    Ok(FoldFit { normalization, model })
}

/// K-fold CV on an already extracted matrix (columns = the feature set).
pub fn cross_validate_matrix(
    matrix: &FeatureMatrix,
    labels: &[f64],
    dimension: Dimension,
    families: FeatureSet,
    algorithm: Algorithm,
    hp: &Hyperparameters,
    plan: &FoldPlan,
) -> Result<EvalResult> {
    let n = matrix.values.rows();
    if labels.len() != n || plan.n() != n {
        return Err(Error::Dimension(format!(
            "matrix has {n} rows, labels {}, fold plan {}",
            labels.len(),
            plan.n()
        )));
    }
    let mut predictions = vec![0.0; n];
    let mut gamma_per_fold = Vec::with_capacity(plan.k);
    let mut selected = 0usize;
    let mut converged = true;
    for f in 0..plan.k {
        let (train, test) = plan.split(f);
        let fold = fit_fold(matrix, labels, &train, algorithm, hp)?;
        let pred = fold.predict(matrix, &test)?;
        let truth: Vec<f64> = test.iter().map(|&i| labels[i]).collect();
        gamma_per_fold.push(if test.len() >= 2 { pearson(&pred, &truth)? } else { None });
        for (&i, p) in test.iter().zip(pred) {
            predictions[i] = p;
        }
        selected += fold.model.selected_count();
        converged &= fold.model.info.converged;
    }
    Ok(EvalResult {
        dimension,
        families,
        algorithm,
        gamma_pooled: pearson(&predictions, labels)?,
        gamma_per_fold,
        mean_selected_features: selected as f64 / plan.k as f64,
        converged,
        predictions,
    })
}

/// Extracts `families` from `dataset` and cross-validates one dimension.
#[allow(clippy::too_many_arguments)]
pub fn cross_validate(
    dataset: &Dataset,
    dimension: Dimension,
    families: FeatureSet,
    algorithm: Algorithm,
    hp: &Hyperparameters,
    window: &WindowSpec,
    lexicon: Option<&Lexicon>,
    plan: &FoldPlan,
) -> Result<EvalResult> {
    let matrix = build_matrix(dataset, families, window, lexicon)?;
    cross_validate_matrix(
        &matrix,
        &dataset.labels(dimension),
        dimension,
        families,
        algorithm,
        hp,
        plan,
    )
}
