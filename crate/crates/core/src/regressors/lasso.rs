use serde::{Deserialize, Serialize};

use super::model::{Algorithm, ModelParams, TrainedModel, TrainingInfo};
use super::RegressionProblem;
use crate::error::{Error, Result};
use crate::evaluation::make_folds;
use crate::numerics::{dot, DenseMatrix};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LassoParams {
    pub n_lambdas: usize,
    /// Smallest lambda on the path as a fraction of `lambda_max`.
    pub lambda_ratio: f64,
    pub tol: f64,
    /// Coordinate-descent sweeps allowed per lambda.
    pub max_iter: usize,
    pub cv_folds: usize,
    /// Seed of the inner CV fold assignment.
    pub seed: u64,
    pub rule: LambdaRule,
}

/// How the inner CV curve picks a penalty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaRule {
    /// Smallest mean held-out squared error.
    #[default]
    MinMse,
    /// Largest penalty within one standard error of the minimum.
    OneStandardError,
}

impl Default for LassoParams {
    fn default() -> Self {
        Self {
            n_lambdas: 100,
            lambda_ratio: 1e-3,
            tol: 1e-6,
            max_iter: 10_000,
            cv_folds: 5,
            seed: 0,
            rule: LambdaRule::MinMse,
        }
    }
}

/// Result of one fixed-lambda fit, in original column units.
#[derive(Debug, Clone, PartialEq)]
pub struct LassoFit {
    pub intercept: f64,
    pub coefficients: Vec<f64>,
    /// Standardized objective after every coordinate-descent sweep.
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Rows of a problem with non-constant columns centered and scaled to unit
/// (population) variance, stored column-major, with the scaled Gram matrix
/// `Z'Z / n` and `Z'y / n` for covariance-update coordinate descent.
struct Standardized {
    n: usize,
    active: Vec<usize>,
    z: Vec<Vec<f64>>,
    mean: Vec<f64>,
    sd: Vec<f64>,
    y_mean: f64,
    yc: Vec<f64>,
    gram: Vec<Vec<f64>>,
    zy: Vec<f64>,
}

impl Standardized {
    fn new(x: &DenseMatrix, y: &[f64], rows: &[usize]) -> Self {
        let n = rows.len();
        let nf = n as f64;
        let y_mean = rows.iter().map(|&i| y[i]).sum::<f64>() / nf;
        let yc: Vec<f64> = rows.iter().map(|&i| y[i] - y_mean).collect();
        let (mut active, mut z, mut mean, mut sd) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
        for j in 0..x.cols() {
            let col: Vec<f64> = rows.iter().map(|&i| x[(i, j)]).collect();
            let m = col.iter().sum::<f64>() / nf;
            let s = (col.iter().map(|v| (v - m).powi(2)).sum::<f64>() / nf).sqrt();
            if s <= 1e-12 * (1.0 + m.abs()) {
                continue;
            }
            active.push(j);
            z.push(col.iter().map(|v| (v - m) / s).collect::<Vec<f64>>());
            mean.push(m);
            sd.push(s);
        }
        let p = z.len();
        let mut gram = vec![vec![0.0; p]; p];
        for a in 0..p {
            for b in a..p {
                let g = dot(&z[a], &z[b]) / nf;
                gram[a][b] = g;
                gram[b][a] = g;
            }
        }
        let zy = z.iter().map(|c| dot(c, &yc) / nf).collect();
        Self {
            n,
            active,
            z,
            mean,
            sd,
            y_mean,
            yc,
            gram,
            zy,
        }
    }

    fn lambda_max(&self) -> f64 {
        self.zy.iter().map(|c| c.abs()).fold(0.0, f64::max)
    }

    /// `(1/2n)‖yc − Zβ‖² + λ‖β‖₁`.
    fn objective(&self, beta: &[f64], lambda: f64) -> f64 {
        let mut r = self.yc.clone();
        for (b, col) in beta.iter().zip(&self.z) {
            if *b != 0.0 {
                for (ri, zi) in r.iter_mut().zip(col) {
                    *ri -= b * zi;
                }
            }
        }
        dot(&r, &r) / (2.0 * self.n as f64) + lambda * beta.iter().map(|b| b.abs()).sum::<f64>()
    }

    /// Gradient state `c = Z'(yc − Zβ) / n` for a given `beta`.
    fn residual_correlations(&self, beta: &[f64]) -> Vec<f64> {
        let mut c = self.zy.clone();
        for (j, &b) in beta.iter().enumerate() {
            if b != 0.0 {
                for (ck, g) in c.iter_mut().zip(&self.gram[j]) {
                    *ck -= b * g;
                }
            }
        }
        c
    }

    /// One pass of exact coordinate minimization over `coords`; returns the
    /// largest coefficient change.
    fn sweep(&self, lambda: f64, beta: &mut [f64], c: &mut [f64], coords: impl Iterator<Item = usize>) -> f64 {
        let mut max_delta = 0.0f64;
        for k in coords {
            let g = self.gram[k][k];
            let new = soft_threshold(c[k] + g * beta[k], lambda) / g;
            let delta = new - beta[k];
            if delta != 0.0 {
                for (ci, gk) in c.iter_mut().zip(&self.gram[k]) {
                    *ci -= delta * gk;
                }
                beta[k] = new;
                max_delta = max_delta.max(delta.abs());
            }
        }
        max_delta
    }

    /// Cyclic coordinate descent from `beta`. Full sweeps alternate with
    /// sweeps over the nonzero coefficients only; convergence is declared
    /// after a full sweep in which no coefficient moved by `tol` or more.
    /// Returns (sweeps, converged).
    fn descend(
        &self,
        lambda: f64,
        beta: &mut [f64],
        tol: f64,
        max_iter: usize,
        mut trace: Option<&mut Vec<f64>>,
    ) -> (usize, bool) {
        let p = beta.len();
        let mut c = self.residual_correlations(beta);
        let mut sweeps = 0;
        let record = |beta: &[f64], trace: &mut Option<&mut Vec<f64>>| {
            if let Some(t) = trace.as_deref_mut() {
                t.push(self.objective(beta, lambda));
            }
        };
        while sweeps < max_iter {
            sweeps += 1;
            let delta = self.sweep(lambda, beta, &mut c, 0..p);
            record(beta, &mut trace);
            if delta < tol {
                return (sweeps, true);
            }
            let support: Vec<usize> = (0..p).filter(|&k| beta[k] != 0.0).collect();
            while sweeps < max_iter {
                sweeps += 1;
                let delta = self.sweep(lambda, beta, &mut c, support.iter().copied());
                record(beta, &mut trace);
                if delta < tol {
                    break;
                }
            }
        }
        (max_iter, false)
    }

    /// Original-scale (intercept, coefficients over all `p` columns).
    fn destandardize(&self, beta: &[f64], p: usize) -> (f64, Vec<f64>) {
        let mut coef = vec![0.0; p];
        let mut intercept = self.y_mean;
        for (k, &j) in self.active.iter().enumerate() {
            coef[j] = beta[k] / self.sd[k];
            intercept -= coef[j] * self.mean[k];
        }
        (intercept, coef)
    }
}

#[inline]
fn soft_threshold(rho: f64, lambda: f64) -> f64 {
    if rho > lambda {
        rho - lambda
    } else if rho < -lambda {
        rho + lambda
    } else {
        0.0
    }
}

fn all_rows(n: usize) -> Vec<usize> {
    (0..n).collect()
}

/// Smallest penalty whose solution is all-zero.
pub fn lambda_max(problem: &RegressionProblem) -> f64 {
    Standardized::new(&problem.x, &problem.y, &all_rows(problem.n())).lambda_max()
}

/// Coordinate descent at one penalty, started from zero.
pub fn lasso_fixed_lambda(problem: &RegressionProblem, lambda: f64, params: &LassoParams) -> Result<LassoFit> {
    if !(lambda >= 0.0) {
        return Err(Error::Domain(format!("lambda must be non-negative, got {lambda}")));
    }
    let s = Standardized::new(&problem.x, &problem.y, &all_rows(problem.n()));
    let mut beta = vec![0.0; s.active.len()];
    let mut trace = vec![s.objective(&beta, lambda)];
    let (iterations, converged) = s.descend(lambda, &mut beta, params.tol, params.max_iter, Some(&mut trace));
    let (intercept, coefficients) = s.destandardize(&beta, problem.p());
    Ok(LassoFit {
        intercept,
        coefficients,
        objective_trace: trace,
        iterations,
        converged,
    })
}

fn lambda_path(lmax: f64, params: &LassoParams) -> Vec<f64> {
    let m = params.n_lambdas;
    if m == 1 {
        return vec![lmax];
    }
    let step = params.lambda_ratio.ln() / (m - 1) as f64;
    (0..m).map(|i| lmax * (step * i as f64).exp()).collect()
}

/// Held-out squared error along the whole path for one train/test split.
fn path_errors(
    problem: &RegressionProblem,
    train: &[usize],
    test: &[usize],
    lambdas: &[f64],
    params: &LassoParams,
) -> Vec<f64> {
    let s = Standardized::new(&problem.x, &problem.y, train);
    let mut beta = vec![0.0; s.active.len()];
    lambdas
        .iter()
        .map(|&lambda| {
            s.descend(lambda, &mut beta, params.tol, params.max_iter, None);
            test.iter()
                .map(|&i| {
                    let row = problem.x.row(i);
                    let pred = s.y_mean
                        + s.active
                            .iter()
                            .enumerate()
                            .map(|(k, &j)| beta[k] * (row[j] - s.mean[k]) / s.sd[k])
                            .sum::<f64>();
                    (problem.y[i] - pred).powi(2)
                })
                .sum()
        })
        .collect()
}

/// Index into the path given per-fold MSE curves (`fold_mse[fold][lambda]`).
/// Earlier (larger) penalties win ties.
fn choose_lambda(fold_mse: &[Vec<f64>], rule: LambdaRule) -> usize {
    let k = fold_mse.len() as f64;
    let m = fold_mse[0].len();
    let mean: Vec<f64> = (0..m).map(|i| fold_mse.iter().map(|f| f[i]).sum::<f64>() / k).collect();
    let mut best = 0;
    for i in 1..m {
        if mean[i] < mean[best] {
            best = i;
        }
    }
    match rule {
        LambdaRule::MinMse => best,
        LambdaRule::OneStandardError => {
            let var = fold_mse.iter().map(|f| (f[best] - mean[best]).powi(2)).sum::<f64>() / (k - 1.0);
            let bound = mean[best] + (var / k).sqrt();
            (0..=best).find(|&i| mean[i] <= bound).unwrap_or(best)
        }
    }
}

/// LASSO with the penalty picked by inner K-fold CV on a geometric path,
/// refit on all rows.
pub fn fit_lasso(problem: &RegressionProblem, params: &LassoParams) -> Result<TrainedModel> {
    let n = problem.n();
    let full = Standardized::new(&problem.x, &problem.y, &all_rows(n));
    let lmax = full.lambda_max();
    let lambdas = if lmax > 0.0 {
        lambda_path(lmax, params)
    } else {
        vec![0.0]
    };

    let folds = params.cv_folds.min(n);
    let chosen = if lambdas.len() > 1 && folds >= 2 {
        let plan = make_folds(n, folds, params.seed)?;
        let fold_mse: Vec<Vec<f64>> = (0..folds)
            .map(|f| {
                let (train, test) = plan.split(f);
                let m = test.len() as f64;
                path_errors(problem, &train, &test, &lambdas, params)
                    .into_iter()
                    .map(|e| e / m)
                    .collect()
            })
            .collect();
        choose_lambda(&fold_mse, params.rule)
    } else {
        lambdas.len() - 1
    };

    let mut beta = vec![0.0; full.active.len()];
    let mut iterations = 0;
    let mut converged = true;
    for &lambda in &lambdas[..=chosen] {
        let (it, ok) = full.descend(lambda, &mut beta, params.tol, params.max_iter, None);
        iterations += it;
        converged &= ok;
    }
    let (intercept, coef) = full.destandardize(&beta, problem.p());
    let (features, coefficients): (Vec<String>, Vec<f64>) = coef
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0.0)
        .map(|(j, c)| (problem.columns[j].clone(), *c))
        .unzip();

    let mut diagnostics = serde_json::Map::new();
    diagnostics.insert("lambda".into(), serde_json::json!(lambdas[chosen]));
    diagnostics.insert("lambda_index".into(), serde_json::json!(chosen));
    diagnostics.insert("lambda_max".into(), serde_json::json!(lmax));
    Ok(TrainedModel {
        algorithm: Algorithm::Lasso,
        features,
        params: ModelParams::Linear {
            intercept,
            coefficients,
        },
        info: TrainingInfo {
            hyperparameters: serde_json::to_value(params)?,
            iterations,
            converged,
            diagnostics,
        },
    })
}
