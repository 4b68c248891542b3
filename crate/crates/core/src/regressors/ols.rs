use super::RegressionProblem;
use crate::error::{Error, Result};
use crate::numerics::{student_t_two_sided_p, DenseMatrix, QrDecomposition};

/// Ordinary least squares with an intercept on a subset of columns.
#[derive(Debug, Clone, PartialEq)]
pub struct OlsFit {
    /// Problem column indices, in coefficient order.
    pub columns: Vec<usize>,
    pub intercept: f64,
    pub coefficients: Vec<f64>,
    pub rss: f64,
    pub df_resid: usize,
    /// Standard errors of the slopes (NaN when `df_resid == 0`).
    pub std_errors: Vec<f64>,
}

impl OlsFit {
    /// Two-sided t-test p-value of each slope.
    pub fn p_values(&self) -> Vec<f64> {
        self.coefficients
            .iter()
            .zip(&self.std_errors)
            .map(|(&b, &se)| slope_p_value(b, se, self.df_resid))
            .collect()
    }
}

pub(crate) fn slope_p_value(beta: f64, se: f64, df: usize) -> f64 {
    if df == 0 || se.is_nan() {
        return 1.0;
    }
    if se == 0.0 {
        return if beta == 0.0 { 1.0 } else { 0.0 };
    }
    student_t_two_sided_p(beta / se, df as f64)
}

pub(crate) fn design_with_intercept(x: &DenseMatrix, columns: &[usize]) -> DenseMatrix {
    let n = x.rows();
    let mut data = Vec::with_capacity(n * (columns.len() + 1));
    for i in 0..n {
        let row = x.row(i);
        data.push(1.0);
        data.extend(columns.iter().map(|&j| row[j]));
    }
    DenseMatrix::from_vec(n, columns.len() + 1, data)
}

/// Fits `y ~ 1 + x[columns]`. Rank deficiency is reported with the offending
/// column names.
pub fn fit_ols(problem: &RegressionProblem, columns: &[usize]) -> Result<OlsFit> {
    let n = problem.n();
    let k = columns.len() + 1;
    if n < k {
        return Err(Error::Dimension(format!("{n} rows cannot fit {k} parameters")));
    }
    let design = design_with_intercept(&problem.x, columns);
    let qr = QrDecomposition::new(&design)?;
    if !qr.deficient_columns().is_empty() {
        return Err(Error::RankDeficient {
            rank: qr.rank(),
            columns: qr
                .deficient_columns()
                .iter()
                .map(|&j| {
                    if j == 0 {
                        "(intercept)".to_string()
                    } else {
                        problem.columns[columns[j - 1]].clone()
                    }
                })
                .collect(),
        });
    }
    let ls = qr.solve(&problem.y)?;
    let df_resid = n - k;
    let sigma_sq = if df_resid > 0 {
        ls.rss / df_resid as f64
    } else {
        f64::NAN
    };
    let inv = qr.inverse_gram_diagonal()?;
    Ok(OlsFit {
        columns: columns.to_vec(),
        intercept: ls.solution[0],
        coefficients: ls.solution[1..].to_vec(),
        rss: ls.rss,
        df_resid,
        std_errors: inv[1..].iter().map(|d| (sigma_sq * d).sqrt()).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::SeededRng;

    #[test]
    fn matches_normal_equations_oracle() {
        let mut rng = SeededRng::new(11);
        let n = 60;
        let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..3).map(|_| rng.normal()).collect()).collect();
        let y: Vec<f64> = rows
            .iter()
            .map(|r| 2.0 + r[0] - 0.5 * r[2] + 0.3 * rng.normal())
            .collect();
        let problem = RegressionProblem::new(
            DenseMatrix::from_rows(&rows),
            y.clone(),
            vec!["a".into(), "b".into(), "c".into()],
        )
        .unwrap();
        let fit = fit_ols(&problem, &[0, 2]).unwrap();

        // Closed-form 3x3 normal equations via Cramer's rule.
        let cols = [
            vec![1.0; n],
            rows.iter().map(|r| r[0]).collect::<Vec<_>>(),
            rows.iter().map(|r| r[2]).collect(),
        ];
        let g = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        let m: Vec<Vec<f64>> = (0..3)
            .map(|i| (0..3).map(|j| g(&cols[i], &cols[j])).collect())
            .collect();
        let v: Vec<f64> = (0..3).map(|i| g(&cols[i], &y)).collect();
        let det3 = |m: &Vec<Vec<f64>>| {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        };
        let d = det3(&m);
        let mut beta = [0.0; 3];
        for (k, b) in beta.iter_mut().enumerate() {
            let mut mk = m.clone();
            for i in 0..3 {
                mk[i][k] = v[i];
            }
            *b = det3(&mk) / d;
        }
        assert!((fit.intercept - beta[0]).abs() < 1e-9);
        assert!((fit.coefficients[0] - beta[1]).abs() < 1e-9);
        assert!((fit.coefficients[1] - beta[2]).abs() < 1e-9);
        assert_eq!(fit.df_resid, n - 3);
        let p = fit.p_values();
        assert!(p[0] < 1e-6 && p[1] < 1e-6);
    }

    #[test]
    fn collinear_columns_are_named() {
        let x = DenseMatrix::from_rows(&[[1.0, 2.0], [2.0, 4.0], [3.0, 6.0], [4.0, 8.0]]);
        let problem = RegressionProblem::new(x, vec![1.0, 2.0, 2.5, 4.0], vec!["u".into(), "twice_u".into()]).unwrap();
        match fit_ols(&problem, &[0, 1]) {
            Err(Error::RankDeficient { columns, .. }) => assert_eq!(columns, vec!["twice_u".to_string()]),
            other => panic!("expected rank deficiency, got {other:?}"),
        }
    }
}
