use super::DenseMatrix;
use crate::error::{Error, Result};

/// A column is treated as dependent when the part of it left after projecting
/// out the preceding columns is smaller than this fraction of its own norm.
const RANK_TOL: f64 = 1e-9;

/// Householder QR of a tall matrix, stored column-major.
#[derive(Debug, Clone)]
pub struct QrDecomposition {
    rows: usize,
    cols: usize,
    /// Column-major; the strict upper triangle holds R, the lower part
    /// (including the diagonal) holds the Householder vectors.
    qr: Vec<f64>,
    rdiag: Vec<f64>,
    /// Squared norms of the Householder vectors; 0 marks a skipped reflector.
    vnorm_sq: Vec<f64>,
    deficient: Vec<usize>,
}

/// Solution of a least-squares problem.
#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquares {
    pub solution: Vec<f64>,
    pub rss: f64,
}

impl QrDecomposition {
    pub fn new(a: &DenseMatrix) -> Result<Self> {
        let (rows, cols) = (a.rows(), a.cols());
        if rows < cols {
            return Err(Error::Dimension(format!(
                "least squares needs rows >= cols, got {rows}x{cols}"
            )));
        }
        let mut qr = vec![0.0; rows * cols];
        for j in 0..cols {
            for i in 0..rows {
                qr[j * rows + i] = a[(i, j)];
            }
        }
        let col_norms: Vec<f64> = (0..cols)
            .map(|j| qr[j * rows..(j + 1) * rows].iter().map(|v| v * v).sum::<f64>().sqrt())
            .collect();

        let mut rdiag = vec![0.0; cols];
        let mut vnorm_sq = vec![0.0; cols];
        let mut deficient = Vec::new();
        for k in 0..cols {
            let (head, tail) = qr.split_at_mut((k + 1) * rows);
            let col = &mut head[k * rows..];
            let x = &mut col[k..];
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm <= RANK_TOL * col_norms[k] || norm == 0.0 {
                deficient.push(k);
                rdiag[k] = norm;
                continue;
            }
            let alpha = if x[0] > 0.0 { -norm } else { norm };
            x[0] -= alpha;
            let vv: f64 = x.iter().map(|v| v * v).sum();
            rdiag[k] = alpha;
            vnorm_sq[k] = vv;
            let v: &[f64] = x;
            for j in (k + 1)..cols {
                let target = &mut tail[(j - k - 1) * rows + k..(j - k) * rows];
                let s = 2.0 * super::dot(v, target) / vv;
                for (t, vi) in target.iter_mut().zip(v) {
                    *t -= s * vi;
                }
            }
        }
        Ok(Self {
            rows,
            cols,
            qr,
            rdiag,
            vnorm_sq,
            deficient,
        })
    }

    /// Indices of columns found to be numerically dependent on earlier ones.
    pub fn deficient_columns(&self) -> &[usize] {
        &self.deficient
    }

    pub fn rank(&self) -> usize {
        self.cols - self.deficient.len()
    }

    fn vector(&self, k: usize) -> &[f64] {
        &self.qr[k * self.rows + k..(k + 1) * self.rows]
    }

    fn apply_qt(&self, b: &mut [f64]) {
        for k in 0..self.cols {
            let vv = self.vnorm_sq[k];
            if vv == 0.0 {
                continue;
            }
            let v = self.vector(k);
            let target = &mut b[k..];
            let s = 2.0 * super::dot(v, target) / vv;
            for (t, vi) in target.iter_mut().zip(v) {
                *t -= s * vi;
            }
        }
    }

    fn r(&self, i: usize, j: usize) -> f64 {
        if i == j {
            self.rdiag[i]
        } else {
            self.qr[j * self.rows + i]
        }
    }

    fn ensure_full_rank(&self) -> Result<()> {
        if self.deficient.is_empty() {
            Ok(())
        } else {
            Err(Error::RankDeficient {
                rank: self.rank(),
                columns: self.deficient.iter().map(|j| format!("#{j}")).collect(),
            })
        }
    }

    pub fn solve(&self, b: &[f64]) -> Result<LeastSquares> {
        if b.len() != self.rows {
            return Err(Error::Dimension(format!(
                "rhs has length {}, matrix has {} rows",
                b.len(),
                self.rows
            )));
        }
        self.ensure_full_rank()?;
        let mut qtb = b.to_vec();
        self.apply_qt(&mut qtb);
        let mut x = vec![0.0; self.cols];
        for i in (0..self.cols).rev() {
            let mut s = qtb[i];
            for j in (i + 1)..self.cols {
                s -= self.r(i, j) * x[j];
            }
            x[i] = s / self.rdiag[i];
        }
        let rss = qtb[self.cols..].iter().map(|v| v * v).sum();
        Ok(LeastSquares { solution: x, rss })
    }

    /// Diagonal of `(AᵀA)⁻¹`, i.e. squared row norms of `R⁻¹`.
    pub fn inverse_gram_diagonal(&self) -> Result<Vec<f64>> {
        self.ensure_full_rank()?;
        let n = self.cols;
        // Column-by-column inverse of the upper-triangular R.
        let mut rinv = vec![0.0; n * n];
        for j in 0..n {
            rinv[j * n + j] = 1.0 / self.rdiag[j];
            for i in (0..j).rev() {
                let mut s = 0.0;
                for k in (i + 1)..=j {
                    s += self.r(i, k) * rinv[k * n + j];
                }
                rinv[i * n + j] = -s / self.rdiag[i];
            }
        }
        Ok((0..n)
            .map(|i| rinv[i * n..(i + 1) * n].iter().map(|v| v * v).sum())
            .collect())
    }
}

/// Minimizes `‖A x − b‖₂` through a Householder QR factorization.
pub fn solve_least_squares(a: &DenseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    Ok(QrDecomposition::new(a)?.solve(b)?.solution)
}
