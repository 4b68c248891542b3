use super::{dot, norm_sq};

/// Incrementally grown orthonormal basis (Gram–Schmidt with one
/// re-orthogonalization pass). Used for cheap "what would adding this column
/// buy" scoring in greedy model builders.
#[derive(Debug, Clone)]
pub struct OrthoBasis {
    len: usize,
    vectors: Vec<Vec<f64>>,
}

impl OrthoBasis {
    pub fn new(len: usize) -> Self {
        Self {
            len,
            vectors: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    /// Removes the span of the basis from `v` in place.
    pub fn project_out(&self, v: &mut [f64]) {
        debug_assert_eq!(v.len(), self.len);
        for _ in 0..2 {
            for q in &self.vectors {
                let c = dot(q, v);
                for (x, qi) in v.iter_mut().zip(q) {
                    *x -= c * qi;
                }
            }
        }
    }

    /// Orthogonalizes `v` against the basis and appends the normalized
    /// remainder. Returns `false` (and leaves the basis unchanged) when the
    /// remainder is below `rel_tol` times the norm of `v`.
    pub fn push(&mut self, v: &[f64], rel_tol: f64) -> bool {
        let original = norm_sq(v).sqrt();
        if original == 0.0 {
            return false;
        }
        let mut w = v.to_vec();
        self.project_out(&mut w);
        let norm = norm_sq(&w).sqrt();
        if norm <= rel_tol * original {
            return false;
        }
        for x in &mut w {
            *x /= norm;
        }
        self.vectors.push(w);
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_dependent_vectors() {
        let mut b = OrthoBasis::new(3);
        assert!(b.push(&[1.0, 1.0, 0.0], 1e-10));
        assert!(b.push(&[1.0, 0.0, 0.0], 1e-10));
        assert!(!b.push(&[2.0, -1.0, 0.0], 1e-10));
        assert_eq!(b.dim(), 2);
        let mut v = vec![3.0, 4.0, 5.0];
        b.project_out(&mut v);
        assert!(v[0].abs() < 1e-14 && v[1].abs() < 1e-14);
        assert!((v[2] - 5.0).abs() < 1e-14);
    }
}
