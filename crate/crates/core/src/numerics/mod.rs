//! Dense linear algebra, special functions and the seeded generator shared by
//! every other module. Nothing here depends on an external numerical crate.

mod matrix;
mod ortho;
mod qr;
mod rng;
mod special;

pub use matrix::DenseMatrix;
pub use ortho::OrthoBasis;
pub use qr::{solve_least_squares, LeastSquares, QrDecomposition};
pub use rng::SeededRng;
pub use special::{f_sf, incomplete_beta, ln_gamma, student_t_cdf, student_t_two_sided_p};

/// Arithmetic mean; `0.0` for an empty slice.
pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm_sq(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum()
}
