use serde::{Deserialize, Serialize};

use super::model::{Algorithm, ModelParams, TrainedModel, TrainingInfo};
use super::RegressionProblem;
use crate::error::Result;
use crate::numerics::dot;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Kernel {
    Linear,
    /// `exp(−gamma · ‖x − z‖²)`; `None` resolves to `1 / p`.
    Rbf {
        gamma: Option<f64>,
    },
}

impl Default for Kernel {
    fn default() -> Self {
        Kernel::Rbf { gamma: None }
    }
}

impl Kernel {
    pub fn resolve_gamma(&self, p: usize) -> f64 {
        match self {
            Kernel::Linear => 0.0,
            Kernel::Rbf { gamma } => gamma.unwrap_or(1.0 / p.max(1) as f64),
        }
    }

    pub fn eval(&self, gamma: f64, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Kernel::Linear => dot(a, b),
            Kernel::Rbf { .. } => {
                let d: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
                (-gamma * d).exp()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SvrParams {
    pub c: f64,
    pub epsilon: f64,
    pub kernel: Kernel,
    /// Stopping tolerance on the maximal KKT violation.
    pub tol: f64,
    /// Cap on SMO pair updates.
    pub max_iter: usize,
}

impl Default for SvrParams {
    fn default() -> Self {
        Self {
            c: 1.0,
            epsilon: 0.1,
            kernel: Kernel::default(),
            tol: 1e-3,
            max_iter: 10_000_000,
        }
    }
}

const TAU: f64 = 1e-12;

/// Dual of epsilon-SVR over `2n` variables `[α; α*]` with signs
/// `s = [+1…; −1…]`: minimize `½ aᵀQa + pᵀa` subject to `sᵀa = 0`,
/// `0 ≤ a ≤ C`, where `Q_tu = s_t s_u K(i_t, i_u)`.
struct Smo<'a> {
    n: usize,
    kernel: &'a [f64],
    sign: Vec<f64>,
    alpha: Vec<f64>,
    grad: Vec<f64>,
    c: f64,
}

impl Smo<'_> {
    fn row(&self, t: usize) -> usize {
        if t < self.n {
            t
        } else {
            t - self.n
        }
    }

    fn q(&self, t: usize, u: usize) -> f64 {
        self.sign[t] * self.sign[u] * self.kernel[self.row(t) * self.n + self.row(u)]
    }

    fn is_up(&self, t: usize) -> bool {
        if self.sign[t] > 0.0 {
            self.alpha[t] < self.c
        } else {
            self.alpha[t] > 0.0
        }
    }

    fn is_low(&self, t: usize) -> bool {
        if self.sign[t] > 0.0 {
            self.alpha[t] > 0.0
        } else {
            self.alpha[t] < self.c
        }
    }

    /// Second-order working-set selection. Returns `None` once the maximal
    /// violation drops below `tol`.
    fn select(&self, tol: f64) -> Option<(usize, usize)> {
        let m = 2 * self.n;
        let mut gmax = f64::NEG_INFINITY;
        let mut i = usize::MAX;
        for t in 0..m {
            if self.is_up(t) {
                let v = -self.sign[t] * self.grad[t];
                if v > gmax {
                    gmax = v;
                    i = t;
                }
            }
        }
        if i == usize::MAX {
            return None;
        }
        let mut gmin = f64::INFINITY;
        let mut j = usize::MAX;
        let mut best = f64::INFINITY;
        let qii = self.q(i, i);
        for t in 0..m {
            if !self.is_low(t) {
                continue;
            }
            let v = -self.sign[t] * self.grad[t];
            gmin = gmin.min(v);
            let b = gmax - v;
            if b > 0.0 {
                let a = qii + self.q(t, t) - 2.0 * self.sign[i] * self.sign[t] * self.q(i, t);
                let a = if a > 0.0 { a } else { TAU };
                let obj = -(b * b) / a;
                if obj < best {
                    best = obj;
                    j = t;
                }
            }
        }
        if gmax - gmin < tol || j == usize::MAX {
            None
        } else {
            Some((i, j))
        }
    }

    /// Solves the two-variable subproblem and updates the gradient.
    fn update(&mut self, i: usize, j: usize) {
        let c = self.c;
        let (old_i, old_j) = (self.alpha[i], self.alpha[j]);
        let qij = self.q(i, j);
        let quad = self.q(i, i) + self.q(j, j);
        if self.sign[i] != self.sign[j] {
            let a = if quad + 2.0 * qij > 0.0 { quad + 2.0 * qij } else { TAU };
            let delta = (-self.grad[i] - self.grad[j]) / a;
            let diff = old_i - old_j;
            let (mut ai, mut aj) = (old_i + delta, old_j + delta);
            if diff > 0.0 {
                if aj < 0.0 {
                    aj = 0.0;
                    ai = diff;
                }
            } else if ai < 0.0 {
                ai = 0.0;
                aj = -diff;
            }
            if diff > 0.0 {
                if ai > c {
                    ai = c;
                    aj = c - diff;
                }
            } else if aj > c {
                aj = c;
                ai = c + diff;
            }
            self.alpha[i] = ai;
            self.alpha[j] = aj;
        } else {
            let a = if quad - 2.0 * qij > 0.0 { quad - 2.0 * qij } else { TAU };
            let delta = (self.grad[i] - self.grad[j]) / a;
            let sum = old_i + old_j;
            let (mut ai, mut aj) = (old_i - delta, old_j + delta);
            if sum > c {
                if ai > c {
                    ai = c;
                    aj = sum - c;
                }
            } else if aj < 0.0 {
                aj = 0.0;
                ai = sum;
            }
            if sum > c {
                if aj > c {
                    aj = c;
                    ai = sum - c;
                }
            } else if ai < 0.0 {
                ai = 0.0;
                aj = sum;
            }
            self.alpha[i] = ai;
            self.alpha[j] = aj;
        }
        let (di, dj) = (self.alpha[i] - old_i, self.alpha[j] - old_j);
        if di == 0.0 && dj == 0.0 {
            return;
        }
        for t in 0..2 * self.n {
            self.grad[t] += self.q(t, i) * di + self.q(t, j) * dj;
        }
    }

    /// Offset `rho` such that `f(x) = Σ β K − rho`.
    fn rho(&self) -> f64 {
        let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut sum, mut free) = (0.0, 0usize);
        for t in 0..2 * self.n {
            let yg = self.sign[t] * self.grad[t];
            let at_upper = self.alpha[t] >= self.c;
            let at_lower = self.alpha[t] <= 0.0;
            if at_upper {
                if self.sign[t] < 0.0 {
                    ub = ub.min(yg);
                } else {
                    lb = lb.max(yg);
                }
            } else if at_lower {
                if self.sign[t] > 0.0 {
                    ub = ub.min(yg);
                } else {
                    lb = lb.max(yg);
                }
            } else {
                sum += yg;
                free += 1;
            }
        }
        if free > 0 {
            sum / free as f64
        } else {
            (ub + lb) / 2.0
        }
    }
}

/// Dense kernel matrix over the rows of `x` (row-major `n × n`).
fn kernel_matrix(rows: &[&[f64]], kernel: Kernel, gamma: f64) -> Vec<f64> {
    let n = rows.len();
    let mut k = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v = kernel.eval(gamma, rows[i], rows[j]);
            k[i * n + j] = v;
            k[j * n + i] = v;
        }
    }
    k
}

/// Epsilon-SVR trained with SMO; rows with a nonzero dual coefficient
/// `α − α*` are kept as support vectors.
pub fn fit_svr(problem: &RegressionProblem, params: &SvrParams) -> Result<TrainedModel> {
    let (n, p) = (problem.n(), problem.p());
    let gamma = params.kernel.resolve_gamma(p);
    let rows: Vec<&[f64]> = (0..n).map(|i| problem.x.row(i)).collect();
    let kernel = kernel_matrix(&rows, params.kernel, gamma);

    let mut sign = vec![1.0; 2 * n];
    let mut grad = vec![0.0; 2 * n];
    for i in 0..n {
        sign[i + n] = -1.0;
        grad[i] = params.epsilon - problem.y[i];
        grad[i + n] = params.epsilon + problem.y[i];
    }
    let mut smo = Smo {
        n,
        kernel: &kernel,
        sign,
        alpha: vec![0.0; 2 * n],
        grad,
        c: params.c,
    };
    let mut iterations = 0;
    let mut converged = false;
    while iterations < params.max_iter {
        match smo.select(params.tol) {
            None => {
                converged = true;
                break;
            }
            Some((i, j)) => smo.update(i, j),
        }
        iterations += 1;
    }
    if !converged {
        converged = smo.select(params.tol).is_none();
    }
    let bias = -smo.rho();

    let mut support_vectors = Vec::new();
    let mut dual_coefficients = Vec::new();
    for i in 0..n {
        let beta = smo.alpha[i] - smo.alpha[i + n];
        if beta != 0.0 {
            support_vectors.push(rows[i].to_vec());
            dual_coefficients.push(beta);
        }
    }
    let mut diagnostics = serde_json::Map::new();
    diagnostics.insert("support_vector_count".into(), serde_json::json!(support_vectors.len()));
    Ok(TrainedModel {
        algorithm: Algorithm::Svr,
        features: problem.columns.clone(),
        params: ModelParams::Svr {
            kernel: params.kernel,
            gamma,
            bias,
            support_vectors,
            dual_coefficients,
        },
        info: TrainingInfo {
            hyperparameters: serde_json::to_value(params)?,
            iterations,
            converged,
            diagnostics,
        },
    })
}
