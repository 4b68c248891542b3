use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{mean, student_t_two_sided_p};

/// Pearson correlation. `Ok(None)` marks an undefined coefficient (one of
/// the vectors is constant).
pub fn pearson(a: &[f64], b: &[f64]) -> Result<Option<f64>> {
    if a.len() != b.len() {
        return Err(Error::Dimension(format!(
            "pearson needs equal lengths, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    if a.len() < 2 {
        return Err(Error::Dimension("pearson needs at least 2 points".into()));
    }
    let (ma, mb) = (mean(a), mean(b));
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return Ok(None);
    }
    Ok(Some((sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0)))
}

/// Two-sample Student's t-test with pooled variance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TTest {
    pub t: f64,
    pub p: f64,
    pub df: usize,
    pub mean_a: f64,
    pub mean_b: f64,
    pub n_a: usize,
    pub n_b: usize,
}

pub fn student_t_test(a: &[f64], b: &[f64]) -> Result<TTest> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::InvalidDataset(format!(
            "t-test needs at least 2 members per group, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    let (ma, mb) = (mean(a), mean(b));
    let ss = |v: &[f64], m: f64| v.iter().map(|x| (x - m).powi(2)).sum::<f64>();
    let df = a.len() + b.len() - 2;
    let pooled = (ss(a, ma) + ss(b, mb)) / df as f64;
    let se = (pooled * (1.0 / a.len() as f64 + 1.0 / b.len() as f64)).sqrt();
    let diff = ma - mb;
    let (t, p) = if se > 0.0 {
        let t = diff / se;
        (t, student_t_two_sided_p(t, df as f64))
    } else if diff == 0.0 {
        (0.0, 1.0)
    } else {
        (diff.signum() * f64::INFINITY, 0.0)
    };
    Ok(TTest {
        t,
        p,
        df,
        mean_a: ma,
        mean_b: mb,
        n_a: a.len(),
        n_b: b.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::SeededRng;

    #[test]
    fn pearson_matches_hand_formula() {
        let a = [2.0, 4.5, 1.0, 7.25, 3.0, 9.5, 0.5, 6.0, 5.5, 8.0];
        let b = [1.5, 3.0, 2.5, 6.0, 2.0, 7.5, 1.0, 4.0, 6.5, 7.0];
        let n = 10.0;
        let ma = a.iter().sum::<f64>() / n;
        let mb = b.iter().sum::<f64>() / n;
        let cov = a.iter().zip(&b).map(|(x, y)| (x - ma) * (y - mb)).sum::<f64>() / n;
        let va = a.iter().map(|x| (x - ma).powi(2)).sum::<f64>() / n;
        let vb = b.iter().map(|y| (y - mb).powi(2)).sum::<f64>() / n;
        let expected = cov / (va * vb).sqrt();
        assert!((pearson(&a, &b).unwrap().unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn pearson_edge_cases() {
        let a = [1.0, 2.0, 4.0];
        assert_eq!(pearson(&a, &a).unwrap(), Some(1.0));
        let neg: Vec<f64> = a.iter().map(|v| -v).collect();
        assert_eq!(pearson(&a, &neg).unwrap(), Some(-1.0));
        assert_eq!(pearson(&a, &[3.0; 3]).unwrap(), None);
        assert!(pearson(&a, &[1.0, 2.0]).is_err());
        assert!(pearson(&[1.0], &[1.0]).is_err());
    }

    #[test]
    fn pearson_is_affine_invariant() {
        let mut rng = SeededRng::new(3);
        let a: Vec<f64> = (0..30).map(|_| rng.normal()).collect();
        let b: Vec<f64> = (0..30).map(|_| rng.normal()).collect();
        let r = pearson(&a, &b).unwrap().unwrap();
        let scaled: Vec<f64> = b.iter().map(|v| 2.5 * v - 4.0).collect();
        let flipped: Vec<f64> = b.iter().map(|v| -0.5 * v + 1.0).collect();
        assert!((pearson(&a, &scaled).unwrap().unwrap() - r).abs() < 1e-12);
        assert!((pearson(&a, &flipped).unwrap().unwrap() + r).abs() < 1e-12);
        assert!((pearson(&b, &a).unwrap().unwrap() - r).abs() < 1e-15);
    }

    #[test]
    fn identical_groups_give_zero_t() {
        let g = [1.0, 2.0, 3.0, 5.0];
        let t = student_t_test(&g, &g).unwrap();
        assert_eq!(t.t, 0.0);
        assert!((t.p - 1.0).abs() < 1e-12);
        assert!(student_t_test(&g, &[1.0]).is_err());
    }

    #[test]
    fn t_statistic_matches_statrs_reference() {
        use statrs::distribution::{ContinuousCDF, StudentsT};
        let a = [5.1, 4.9, 6.2, 5.8, 6.0, 5.5];
        let b = [4.1, 4.5, 5.0, 4.8, 4.2];
        let r = student_t_test(&a, &b).unwrap();
        let dist = StudentsT::new(0.0, 1.0, r.df as f64).unwrap();
        let expected = 2.0 * (1.0 - dist.cdf(r.t.abs()));
        assert!((r.p - expected).abs() < 1e-10);
    }
}
