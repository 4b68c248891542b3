//! Stepwise, LASSO, MARS and epsilon-SVR regressors behind one interface,
//! plus the OLS core the linear family shares.

mod lasso;
mod mars;
mod model;
mod ols;
mod stepwise;
mod svr;

use serde::{Deserialize, Serialize};

pub use lasso::{fit_lasso, lambda_max, lasso_fixed_lambda, LambdaRule, LassoFit, LassoParams};
pub use mars::{fit_mars, HingeDirection, HingeTerm, MarsParams};
pub use model::{Algorithm, ModelParams, TrainedModel, TrainingInfo};
pub use ols::{fit_ols, OlsFit};
pub use stepwise::{fit_stepwise, StepwiseParams};
pub use svr::{fit_svr, Kernel, SvrParams};

use crate::error::{Error, Result};
use crate::numerics::DenseMatrix;

/// Design matrix, response and column names for one fit.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionProblem {
    pub x: DenseMatrix,
    pub y: Vec<f64>,
    pub columns: Vec<String>,
}

impl RegressionProblem {
    pub fn new(x: DenseMatrix, y: Vec<f64>, columns: Vec<String>) -> Result<Self> {
        if x.rows() != y.len() {
            return Err(Error::Dimension(format!(
                "design has {} rows but response has {}",
                x.rows(),
                y.len()
            )));
        }
        if x.cols() != columns.len() {
            return Err(Error::Dimension(format!(
                "design has {} columns but {} names",
                x.cols(),
                columns.len()
            )));
        }
        if x.rows() < 2 {
            return Err(Error::Dimension("a regression problem needs at least 2 rows".into()));
        }
        if x.cols() < 1 {
            return Err(Error::Dimension("a regression problem needs at least 1 column".into()));
        }
        if !x.is_finite() || y.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("non-finite value in regression problem".into()));
        }
        Ok(Self { x, y, columns })
    }

    pub fn n(&self) -> usize {
        self.x.rows()
    }

    pub fn p(&self) -> usize {
        self.x.cols()
    }
}

/// Defaults and overrides for all four algorithms.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct Hyperparameters {
    pub stepwise: StepwiseParams,
    pub lasso: LassoParams,
    pub mars: MarsParams,
    pub svr: SvrParams,
}

impl Hyperparameters {
    pub fn validate(&self) -> Result<()> {
        let s = &self.stepwise;
        if !(s.alpha_enter > 0.0 && s.alpha_enter < 1.0) || !(s.alpha_remove > 0.0 && s.alpha_remove <= 1.0) {
            return Err(Error::Config("stepwise alphas must lie in (0, 1)".into()));
        }
        if s.alpha_enter > s.alpha_remove {
            return Err(Error::Config(
                "stepwise alpha_enter must not exceed alpha_remove".into(),
            ));
        }
        let l = &self.lasso;
        if l.n_lambdas == 0
            || !(l.lambda_ratio > 0.0 && l.lambda_ratio < 1.0)
            || !(l.tol > 0.0)
            || l.max_iter == 0
            || l.cv_folds < 2
        {
            return Err(Error::Config("invalid lasso settings".into()));
        }
        let m = &self.mars;
        if m.max_basis < 1 || !(m.penalty >= 0.0) || !(m.span_alpha > 0.0 && m.span_alpha < 1.0) {
            return Err(Error::Config("invalid mars settings".into()));
        }
        let v = &self.svr;
        if !(v.c > 0.0) || !(v.epsilon >= 0.0) || !(v.tol > 0.0) || v.max_iter == 0 {
            return Err(Error::Config("invalid svr settings".into()));
        }
        if let Kernel::Rbf { gamma: Some(g) } = v.kernel {
            if !(g > 0.0) {
                return Err(Error::Config("rbf gamma must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Fits `algorithm` on `problem`.
pub fn fit(algorithm: Algorithm, problem: &RegressionProblem, hp: &Hyperparameters) -> Result<TrainedModel> {
    match algorithm {
        Algorithm::Stepwise => fit_stepwise(problem, &hp.stepwise),
        Algorithm::Lasso => fit_lasso(problem, &hp.lasso),
        Algorithm::Mars => fit_mars(problem, &hp.mars),
        Algorithm::Svr => fit_svr(problem, &hp.svr),
    }
}
