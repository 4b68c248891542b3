use serde::{Deserialize, Serialize};

use super::model::{hinge, Algorithm, ModelParams, TrainedModel, TrainingInfo};
use super::RegressionProblem;
use crate::error::Result;
use crate::numerics::{dot, mean, norm_sq, DenseMatrix, OrthoBasis, QrDecomposition};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MarsParams {
    /// Maximum number of basis functions, intercept included.
    pub max_basis: usize,
    /// GCV cost `d` charged per hinge term.
    pub penalty: f64,
    /// Significance level of the min-span / end-span knot thinning rule.
    pub span_alpha: f64,
}

impl Default for MarsParams {
    fn default() -> Self {
        Self {
            max_basis: 21,
            penalty: 3.0,
            span_alpha: 0.05,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HingeDirection {
    /// `max(0, x − knot)`
    Positive,
    /// `max(0, knot − x)`
    Negative,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HingeTerm {
    /// Index into the model's feature list.
    pub feature: usize,
    pub knot: f64,
    pub direction: HingeDirection,
    pub coefficient: f64,
}

/// Generalized cross-validation with `basis_count` functions (intercept
/// included).
pub fn gcv(rss: f64, n: usize, basis_count: usize, penalty: f64) -> f64 {
    let m = basis_count as f64;
    let c = m + penalty * (m - 1.0);
    let nf = n as f64;
    if c >= nf {
        return f64::INFINITY;
    }
    rss / (nf * (1.0 - c / nf).powi(2))
}

/// Candidate knot positions (indices into the sorted column) after the
/// end-span and min-span thinning rules.
fn knot_positions(n: usize, p: usize, alpha: f64) -> Vec<usize> {
    let (nf, pf) = (n as f64, p as f64);
    let minspan = ((-(-(1.0 - alpha).ln() / (pf * nf)).log2()) / 2.5).floor().max(1.0) as usize;
    let endspan = (3.0 - (alpha / pf).log2()).ceil().max(1.0) as usize;
    if n <= 2 * endspan + 1 {
        return (0..n).collect();
    }
    (endspan..n - endspan).step_by(minspan).collect()
}

struct Candidate {
    feature: usize,
    knot: f64,
    gain: f64,
    use_positive: bool,
    use_negative: bool,
}

/// Scores every knot of one feature against the current basis using prefix
/// sums over the sorted column. `h+` and `h−` have disjoint support, which
/// keeps the two-column projection a 2×2 problem.
fn score_feature(
    feature: usize,
    x: &[f64],
    order: &[usize],
    positions: &[usize],
    basis: &[Vec<f64>],
    residual: &[f64],
    single_only: bool,
) -> Option<Candidate> {
    let n = x.len();
    let m = basis.len();
    // Prefix sums in sorted order: index k covers the first k sorted rows.
    let prefix = |w: &dyn Fn(usize) -> f64| -> Vec<f64> {
        let mut out = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        out.push(0.0);
        for &i in order {
            acc += w(i);
            out.push(acc);
        }
        out
    };
    let c1 = prefix(&|_| 1.0);
    let cx = prefix(&|i| x[i]);
    let cxx = prefix(&|i| x[i] * x[i]);
    let b1: Vec<Vec<f64>> = basis.iter().map(|b| prefix(&|i| b[i])).collect();
    let bx: Vec<Vec<f64>> = basis.iter().map(|b| prefix(&|i| b[i] * x[i])).collect();
    let r1 = prefix(&|i| residual[i]);
    let rx = prefix(&|i| residual[i] * x[i]);

    let mut best: Option<Candidate> = None;
    let mut last_knot = f64::NAN;
    let mut u = vec![0.0; m];
    let mut w = vec![0.0; m];
    for &pos in positions {
        let t = x[order[pos]];
        if t == last_knot {
            continue;
        }
        last_knot = t;
        // Rows at or above `pos` carry h+ (ties contribute zero); rows at or
        // below carry h−.
        let (lo, hi) = (pos, pos + 1);
        let suffix = |c: &[f64]| c[n] - c[lo];
        let upto = |c: &[f64]| c[hi];
        let hp_sq = suffix(&cxx) - 2.0 * t * suffix(&cx) + t * t * suffix(&c1);
        let hn_sq = t * t * upto(&c1) - 2.0 * t * upto(&cx) + upto(&cxx);
        for k in 0..m {
            u[k] = suffix(&bx[k]) - t * suffix(&b1[k]);
            w[k] = t * upto(&b1[k]) - upto(&bx[k]);
        }
        let v1 = suffix(&rx) - t * suffix(&r1);
        let v2 = t * upto(&r1) - upto(&rx);
        let a = hp_sq - norm_sq(&u);
        let d = hn_sq - norm_sq(&w);
        let ok1 = hp_sq > 0.0 && a > 1e-9 * hp_sq;
        let ok2 = hn_sq > 0.0 && d > 1e-9 * hn_sq;
        let g1 = if ok1 { v1 * v1 / a } else { 0.0 };
        let g2 = if ok2 { v2 * v2 / d } else { 0.0 };
        let (gain, pos_used, neg_used) = if single_only || !(ok1 && ok2) {
            if g1 >= g2 {
                (g1, ok1, false)
            } else {
                (g2, false, ok2)
            }
        } else {
            let c = -dot(&u, &w);
            let det = a * d - c * c;
            if det > 1e-9 * a * d {
                ((d * v1 * v1 - 2.0 * c * v1 * v2 + a * v2 * v2) / det, true, true)
            } else if g1 >= g2 {
                (g1, true, false)
            } else {
                (g2, false, true)
            }
        };
        if !(pos_used || neg_used) {
            continue;
        }
        if best.as_ref().is_none_or(|b| gain > b.gain) {
            best = Some(Candidate {
                feature,
                knot: t,
                gain,
                use_positive: pos_used,
                use_negative: neg_used,
            });
        }
    }
    best
}

struct RawTerm {
    feature: usize,
    knot: f64,
    direction: HingeDirection,
    values: Vec<f64>,
}

fn ols_rss(columns: &[&[f64]], y: &[f64]) -> Result<(Vec<f64>, f64)> {
    let n = y.len();
    let mut data = Vec::with_capacity(n * (columns.len() + 1));
    for i in 0..n {
        data.push(1.0);
        data.extend(columns.iter().map(|c| c[i]));
    }
    let design = DenseMatrix::from_vec(n, columns.len() + 1, data);
    let ls = QrDecomposition::new(&design)?.solve(y)?;
    Ok((ls.solution, ls.rss))
}

/// Additive MARS: greedy hinge-pair forward pass, then GCV backward pruning.
pub fn fit_mars(problem: &RegressionProblem, params: &MarsParams) -> Result<TrainedModel> {
    let (n, p) = (problem.n(), problem.p());
    let y = &problem.y;
    let y_mean = mean(y);
    let tss: f64 = y.iter().map(|v| (v - y_mean).powi(2)).sum();
    let columns: Vec<Vec<f64>> = (0..p).map(|j| problem.x.column(j)).collect();
    let orders: Vec<Vec<usize>> = columns
        .iter()
        .map(|c| {
            let mut o: Vec<usize> = (0..n).collect();
            o.sort_by(|&a, &b| c[a].total_cmp(&c[b]).then(a.cmp(&b)));
            o
        })
        .collect();
    let positions = knot_positions(n, p, params.span_alpha);

    let mut basis = OrthoBasis::new(n);
    basis.push(&vec![1.0; n], 0.0);
    let mut residual: Vec<f64> = y.iter().map(|v| v - y_mean).collect();
    let mut rss = tss;
    let mut forward_rss = vec![rss];
    let mut terms: Vec<RawTerm> = Vec::new();
    let max_terms = params.max_basis.saturating_sub(1);

    while terms.len() < max_terms && tss > 0.0 {
        let single_only = terms.len() + 1 == max_terms;
        let best = (0..p)
            .filter_map(|j| {
                score_feature(
                    j,
                    &columns[j],
                    &orders[j],
                    &positions,
                    basis.vectors(),
                    &residual,
                    single_only,
                )
            })
            .fold(None::<Candidate>, |acc, c| match acc {
                Some(a) if a.gain >= c.gain => Some(a),
                _ => Some(c),
            });
        let Some(best) = best else { break };
        if best.gain <= 1e-10 * tss {
            break;
        }
        let mut added = false;
        for (use_it, direction) in [
            (best.use_positive, HingeDirection::Positive),
            (best.use_negative, HingeDirection::Negative),
        ] {
            if !use_it {
                continue;
            }
            let values: Vec<f64> = columns[best.feature]
                .iter()
                .map(|&v| hinge(direction, v, best.knot))
                .collect();
            if basis.push(&values, 1e-8) {
                terms.push(RawTerm {
                    feature: best.feature,
                    knot: best.knot,
                    direction,
                    values,
                });
                added = true;
            }
        }
        if !added {
            break;
        }
        residual = y.clone();
        basis.project_out(&mut residual);
        let new_rss = norm_sq(&residual);
        // Guard the non-increasing trace against round-off.
        rss = new_rss.min(rss);
        forward_rss.push(rss);
    }
    let forward_steps = forward_rss.len() - 1;

    // Backward pass: drop the term whose removal hurts RSS least, keeping the
    // best-GCV subset seen (smaller subsets win ties).
    let mut current: Vec<usize> = (0..terms.len()).collect();
    let rss_of = |set: &[usize]| -> Result<f64> {
        if set.is_empty() {
            return Ok(tss);
        }
        let cols: Vec<&[f64]> = set.iter().map(|&t| terms[t].values.as_slice()).collect();
        Ok(ols_rss(&cols, y)?.1)
    };
    let gcv_unpruned = gcv(rss_of(&current)?, n, current.len() + 1, params.penalty);
    let mut best_set = current.clone();
    let mut best_gcv = gcv_unpruned;
    while !current.is_empty() {
        let mut choice: Option<(usize, f64)> = None;
        for k in 0..current.len() {
            let mut trial = current.clone();
            trial.remove(k);
            let r = rss_of(&trial)?;
            if choice.is_none_or(|(_, br)| r < br) {
                choice = Some((k, r));
            }
        }
        let (k, r) = choice.expect("non-empty set");
        current.remove(k);
        let g = gcv(r, n, current.len() + 1, params.penalty);
        if g <= best_gcv {
            best_gcv = g;
            best_set = current.clone();
        }
    }

    let (intercept, coefs) = if best_set.is_empty() {
        (y_mean, Vec::new())
    } else {
        let cols: Vec<&[f64]> = best_set.iter().map(|&t| terms[t].values.as_slice()).collect();
        let (solution, _) = ols_rss(&cols, y)?;
        (solution[0], solution[1..].to_vec())
    };
    let mut features: Vec<String> = Vec::new();
    let mut hinge_terms = Vec::new();
    for (&t, &coefficient) in best_set.iter().zip(&coefs) {
        let name = &problem.columns[terms[t].feature];
        let feature = match features.iter().position(|f| f == name) {
            Some(i) => i,
            None => {
                features.push(name.clone());
                features.len() - 1
            }
        };
        hinge_terms.push(HingeTerm {
            feature,
            knot: terms[t].knot,
            direction: terms[t].direction,
            coefficient,
        });
    }

    let mut diagnostics = serde_json::Map::new();
    diagnostics.insert("gcv".into(), serde_json::json!(finite_or_null(best_gcv)));
    diagnostics.insert("gcv_unpruned".into(), serde_json::json!(finite_or_null(gcv_unpruned)));
    diagnostics.insert("forward_terms".into(), serde_json::json!(terms.len()));
    diagnostics.insert("forward_rss".into(), serde_json::json!(forward_rss));
    Ok(TrainedModel {
        algorithm: Algorithm::Mars,
        features,
        params: ModelParams::Mars {
            intercept,
            terms: hinge_terms,
        },
        info: TrainingInfo {
            hyperparameters: serde_json::to_value(params)?,
            iterations: forward_steps,
            converged: true,
            diagnostics,
        },
    })
}

fn finite_or_null(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::SeededRng;

    fn hinge_problem(seed: u64, n: usize, sigma: f64) -> RegressionProblem {
        let mut rng = SeededRng::new(seed);
        let x: Vec<f64> = (0..n).map(|_| rng.uniform()).collect();
        let y = x.iter().map(|&v| (v - 0.5).max(0.0) + sigma * rng.normal()).collect();
        RegressionProblem::new(DenseMatrix::from_columns(&[x]), y, vec!["x".into()]).unwrap()
    }

    fn r_squared(model: &TrainedModel, p: &RegressionProblem) -> f64 {
        let pred = model.predict(&p.x, &p.columns).unwrap();
        let m = mean(&p.y);
        let rss: f64 = pred.iter().zip(&p.y).map(|(a, b)| (a - b).powi(2)).sum();
        let tss: f64 = p.y.iter().map(|v| (v - m).powi(2)).sum();
        1.0 - rss / tss
    }

    #[test]
    fn recovers_planted_hinge() {
        for seed in 0..5 {
            let p = hinge_problem(seed, 400, 0.01);
            let m = fit_mars(&p, &MarsParams::default()).unwrap();
            assert!(r_squared(&m, &p) >= 0.95);
            let ModelParams::Mars { terms, .. } = &m.params else {
                panic!()
            };
            assert!(terms.iter().any(|t| (t.knot - 0.5).abs() <= 0.05), "{terms:?}");
        }
    }

    #[test]
    fn constant_response_is_intercept_only() {
        let mut p = hinge_problem(1, 100, 0.0);
        p.y = vec![4.0; 100];
        let m = fit_mars(&p, &MarsParams::default()).unwrap();
        assert!(m.features.is_empty());
        let ModelParams::Mars { intercept, terms } = &m.params else {
            panic!()
        };
        assert!(terms.is_empty());
        assert_eq!(*intercept, 4.0);
    }

    #[test]
    fn forward_rss_never_increases_and_pruning_helps() {
        let mut rng = SeededRng::new(7);
        let rows: Vec<Vec<f64>> = (0..300).map(|_| (0..4).map(|_| rng.uniform()).collect()).collect();
        let y: Vec<f64> = rows
            .iter()
            .map(|r| (r[0] - 0.3).max(0.0) * 2.0 - (0.6 - r[2]).max(0.0) + 0.1 * rng.normal())
            .collect();
        let p = RegressionProblem::new(
            DenseMatrix::from_rows(&rows),
            y,
            (0..4).map(|j| format!("x{j}")).collect(),
        )
        .unwrap();
        let m = fit_mars(&p, &MarsParams::default()).unwrap();
        let trace: Vec<f64> = serde_json::from_value(m.info.diagnostics["forward_rss"].clone()).unwrap();
        assert!(trace.windows(2).all(|w| w[1] <= w[0]));
        let g = m.info.diagnostics["gcv"].as_f64().unwrap();
        let g0 = m.info.diagnostics["gcv_unpruned"].as_f64().unwrap_or(f64::INFINITY);
        assert!(g <= g0);
    }

    #[test]
    fn prediction_is_continuous_at_knots() {
        let p = hinge_problem(3, 200, 0.01);
        let m = fit_mars(&p, &MarsParams::default()).unwrap();
        let ModelParams::Mars { terms, .. } = &m.params else {
            panic!()
        };
        for t in terms {
            let at = m.predict_row(&[t.knot]);
            let left = m.predict_row(&[t.knot - 1e-9]);
            let right = m.predict_row(&[t.knot + 1e-9]);
            assert!((at - left).abs() < 1e-6 && (at - right).abs() < 1e-6);
        }
    }

    #[test]
    fn gcv_matches_formula() {
        // 3 basis functions, d = 3: C = 3 + 3 * 2 = 9.
        let v = gcv(10.0, 100, 3, 3.0);
        assert!((v - 10.0 / (100.0 * (1.0 - 0.09f64).powi(2))).abs() < 1e-12);
        assert!(gcv(1.0, 5, 3, 3.0).is_infinite());
    }
}
