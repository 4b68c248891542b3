use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::model::{Algorithm, ModelParams, TrainedModel, TrainingInfo};
use super::ols::fit_ols;
use super::RegressionProblem;
use crate::error::Result;
use crate::numerics::{dot, f_sf, norm_sq};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StepwiseParams {
    pub alpha_enter: f64,
    pub alpha_remove: f64,
    /// Cap on add/remove iterations; `None` means `10 * p + 10`.
    pub max_iterations: Option<usize>,
}

impl Default for StepwiseParams {
    fn default() -> Self {
        Self {
            alpha_enter: 0.05,
            alpha_remove: 0.10,
            max_iterations: None,
        }
    }
}

/// Remainders smaller than this fraction of the raw column norm count as
/// already explained by the model.
const DEPENDENCE_TOL: f64 = 1e-8;

/// Forward-selection state: an orthonormal basis of `[1, selected...]`, the
/// current residual, and every candidate column with the basis projected out.
struct ForwardState {
    basis: Vec<Vec<f64>>,
    residual: Vec<f64>,
    rss: f64,
    remainders: Vec<Option<Vec<f64>>>,
    column_norm_sq: Vec<f64>,
}

impl ForwardState {
    fn new(problem: &RegressionProblem, selected: &[usize]) -> Self {
        let n = problem.n();
        let ones = vec![1.0 / (n as f64).sqrt(); n];
        let mut state = Self {
            basis: Vec::new(),
            residual: problem.y.clone(),
            rss: 0.0,
            remainders: (0..problem.p()).map(|j| Some(problem.x.column(j))).collect(),
            column_norm_sq: (0..problem.p()).map(|j| norm_sq(&problem.x.column(j))).collect(),
        };
        state.absorb(ones);
        for &j in selected {
            state.add(j);
        }
        state
    }

    /// Adds a unit vector orthogonal to the basis and updates residual and
    /// candidate remainders.
    fn absorb(&mut self, q: Vec<f64>) {
        let c = dot(&q, &self.residual);
        for (r, qi) in self.residual.iter_mut().zip(&q) {
            *r -= c * qi;
        }
        for rem in self.remainders.iter_mut().flatten() {
            let c = dot(&q, rem);
            for (x, qi) in rem.iter_mut().zip(&q) {
                *x -= c * qi;
            }
        }
        self.rss = norm_sq(&self.residual);
        self.basis.push(q);
    }

    fn add(&mut self, j: usize) {
        let mut v = self.remainders[j].take().expect("column already in model");
        // Second pass against the basis for stability.
        for q in &self.basis {
            let c = dot(q, &v);
            for (x, qi) in v.iter_mut().zip(q) {
                *x -= c * qi;
            }
        }
        let norm = norm_sq(&v).sqrt();
        for x in &mut v {
            *x /= norm;
        }
        self.absorb(v);
    }

    /// Best entering column with its partial-F p-value.
    fn best_candidate(&self, banned: &BTreeSet<usize>) -> Option<(usize, f64)> {
        let n = self.residual.len();
        let k = self.basis.len(); // parameters incl. intercept
        if n < k + 2 {
            return None;
        }
        let df = (n - k - 1) as f64;
        let mut best: Option<(usize, f64, f64)> = None;
        for (j, rem) in self.remainders.iter().enumerate() {
            let Some(rem) = rem else { continue };
            if banned.contains(&j) {
                continue;
            }
            let qq = norm_sq(rem);
            if qq <= DEPENDENCE_TOL * DEPENDENCE_TOL * self.column_norm_sq[j] || qq == 0.0 {
                continue;
            }
            let gain = dot(rem, &self.residual).powi(2) / qq;
            let rss_new = (self.rss - gain).max(0.0);
            let (f, p) = if rss_new <= 1e-300 {
                (f64::INFINITY, 0.0)
            } else {
                let f = gain / (rss_new / df);
                (f, f_sf(f, 1.0, df))
            };
            // Ties on p (e.g. both underflow to 0) fall back to the larger F.
            let better = match best {
                None => true,
                Some((_, bp, bf)) => p < bp || (p == bp && f > bf),
            };
            if better {
                best = Some((j, p, f));
            }
        }
        best.map(|(j, p, _)| (j, p))
    }
}

/// Bidirectional stepwise selection with partial-F entry and t-test
/// (equivalently partial-F) removal, followed by an OLS refit.
pub fn fit_stepwise(problem: &RegressionProblem, params: &StepwiseParams) -> Result<TrainedModel> {
    let cap = params.max_iterations.unwrap_or(10 * problem.p() + 10);
    let mut selected: Vec<usize> = Vec::new();
    let mut state = ForwardState::new(problem, &selected);
    let mut banned = BTreeSet::new();
    let mut iterations = 0;
    let mut converged = false;
    let mut history = Vec::new();

    while iterations < cap {
        iterations += 1;
        let mut changed = false;
        if let Some((j, p)) = state.best_candidate(&banned) {
            if p < params.alpha_enter {
                selected.push(j);
                state.add(j);
                history.push(format!("+{}", problem.columns[j]));
                changed = true;
            }
        }
        banned.clear();
        loop {
            if selected.is_empty() {
                break;
            }
            let fit = fit_ols(problem, &selected)?;
            let (worst, p) = fit
                .p_values()
                .into_iter()
                .enumerate()
                .fold(
                    (0, f64::NEG_INFINITY),
                    |acc, (i, p)| if p > acc.1 { (i, p) } else { acc },
                );
            if p <= params.alpha_remove {
                break;
            }
            let j = selected.remove(worst);
            history.push(format!("-{}", problem.columns[j]));
            banned.insert(j);
            changed = true;
        }
        if !banned.is_empty() {
            state = ForwardState::new(problem, &selected);
        }
        if !changed {
            converged = true;
            break;
        }
    }

    let (intercept, coefficients) = if selected.is_empty() {
        (crate::numerics::mean(&problem.y), Vec::new())
    } else {
        let fit = fit_ols(problem, &selected)?;
        (fit.intercept, fit.coefficients)
    };
    let mut diagnostics = serde_json::Map::new();
    diagnostics.insert("steps".into(), serde_json::json!(history));
    Ok(TrainedModel {
        algorithm: Algorithm::Stepwise,
        features: selected.iter().map(|&j| problem.columns[j].clone()).collect(),
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{DenseMatrix, SeededRng};

    fn problem(x: Vec<Vec<f64>>, y: Vec<f64>) -> RegressionProblem {
        let p = x[0].len();
        RegressionProblem::new(DenseMatrix::from_rows(&x), y, (0..p).map(|j| format!("x{j}")).collect()).unwrap()
    }

    fn planted(seed: u64, n: usize, p: usize, support: &[usize], sigma: f64) -> RegressionProblem {
        let mut rng = SeededRng::new(seed);
        let x: Vec<Vec<f64>> = (0..n).map(|_| (0..p).map(|_| rng.uniform()).collect()).collect();
        let y = x
            .iter()
            .map(|r| 1.0 + support.iter().map(|&j| r[j]).sum::<f64>() + sigma * rng.normal())
            .collect();
        problem(x, y)
    }

    #[test]
    fn single_strong_column_is_selected() {
        let p = planted(1, 50, 1, &[0], 0.05);
        let m = fit_stepwise(&p, &StepwiseParams::default()).unwrap();
        assert_eq!(m.features, vec!["x0".to_string()]);
        assert!(m.info.converged);
    }

    #[test]
    fn noiseless_training_rows_are_reproduced() {
        let mut rng = SeededRng::new(2);
        let x: Vec<Vec<f64>> = (0..40).map(|_| (0..4).map(|_| rng.uniform()).collect()).collect();
        let y: Vec<f64> = x.iter().map(|r| 3.0 + 2.0 * r[1] - r[3]).collect();
        let p = problem(x, y.clone());
        let m = fit_stepwise(&p, &StepwiseParams::default()).unwrap();
        let pred = m.predict(&p.x, &p.columns).unwrap();
        for (a, b) in pred.iter().zip(&y) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn retained_columns_pass_removal_threshold() {
        for seed in 0..10 {
            let p = planted(100 + seed, 120, 12, &[2, 5], 1.0);
            let params = StepwiseParams::default();
            let m = fit_stepwise(&p, &params).unwrap();
            let idx: Vec<usize> = m
                .features
                .iter()
                .map(|f| p.columns.iter().position(|c| c == f).unwrap())
                .collect();
            if !idx.is_empty() {
                let fit = fit_ols(&p, &idx).unwrap();
                assert!(fit.p_values().iter().all(|&pv| pv < params.alpha_remove));
            }
        }
    }

    #[test]
    fn planted_support_is_recovered() {
        // Entry threshold divided by the number of candidate columns.
        let params = StepwiseParams {
            alpha_enter: 0.05 / 20.0,
            alpha_remove: 0.10 / 20.0,
            max_iterations: None,
        };
        let mut exact = 0;
        for seed in 0..20 {
            let p = planted(seed, 500, 20, &[1, 4, 9], 0.1);
            let m = fit_stepwise(&p, &params).unwrap();
            let mut got: Vec<&str> = m.features.iter().map(String::as_str).collect();
            got.sort_unstable();
            if got == ["x1", "x4", "x9"] {
                exact += 1;
            }
        }
        assert!(exact >= 17, "exact recoveries {exact}/20");
    }

    #[test]
    fn pure_noise_selects_little() {
        let mut small = 0;
        for seed in 0..40 {
            let mut rng = SeededRng::new(1000 + seed);
            let x: Vec<Vec<f64>> = (0..200).map(|_| (0..5).map(|_| rng.uniform()).collect()).collect();
            let y: Vec<f64> = (0..200).map(|_| rng.normal()).collect();
            let m = fit_stepwise(&problem(x, y), &StepwiseParams::default()).unwrap();
            if m.features.len() <= 1 {
                small += 1;
            }
        }
        assert!(small >= 36, "{small}/40 near-empty selections");
    }

    #[test]
    fn constant_column_is_never_entered() {
        let mut rng = SeededRng::new(5);
        let x: Vec<Vec<f64>> = (0..30).map(|_| vec![0.5, rng.uniform()]).collect();
        let y: Vec<f64> = x.iter().map(|r| r[1] * 4.0 + 0.01 * rng.normal()).collect();
        let m = fit_stepwise(&problem(x, y), &StepwiseParams::default()).unwrap();
        assert_eq!(m.features, vec!["x1".to_string()]);
    }
}
