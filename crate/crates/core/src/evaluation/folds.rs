use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::SeededRng;

/// Assignment of rows to `k` cross-validation folds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub k: usize,
    pub seed: u64,
    pub assignment: Vec<usize>,
}

impl FoldPlan {
    pub fn n(&self) -> usize {
        self.assignment.len()
    }

    /// (train rows, test rows) for fold `f`, both ascending.
    pub fn split(&self, f: usize) -> (Vec<usize>, Vec<usize>) {
        (0..self.n()).partition(|&i| self.assignment[i] != f)
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.assignment {
            sizes[f] += 1;
        }
        sizes
    }
}

/// Seeded shuffle, then round-robin fold assignment.
pub fn make_folds(n: usize, k: usize, seed: u64) -> Result<FoldPlan> {
    if k < 2 {
        return Err(Error::Config(format!("need at least 2 folds, got {k}")));
    }
    if n < k {
        return Err(Error::Config(format!("{n} rows cannot fill {k} folds")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    SeededRng::new(seed).shuffle(&mut order);
    let mut assignment = vec![0; n];
    for (pos, &row) in order.iter().enumerate() {
        assignment[row] = pos % k;
    }
    Ok(FoldPlan { k, seed, assignment })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_are_balanced() {
        assert_eq!(make_folds(10, 5, 1).unwrap().fold_sizes(), vec![2; 5]);
        assert_eq!(make_folds(1785, 5, 1).unwrap().fold_sizes(), vec![357; 5]);
        let sizes = make_folds(23, 5, 4).unwrap().fold_sizes();
        assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
    }

    #[test]
    fn plan_is_deterministic_partition() {
        let a = make_folds(100, 5, 42).unwrap();
        assert_eq!(a, make_folds(100, 5, 42).unwrap());
        assert_ne!(a, make_folds(100, 5, 43).unwrap());
        let mut seen = vec![0; 100];
        for f in 0..5 {
            let (train, test) = a.split(f);
            assert_eq!(train.len() + test.len(), 100);
            for i in test {
                seen[i] += 1;
            }
        }
        assert!(seen.iter().all(|&c| c == 1));
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(make_folds(3, 5, 0).is_err());
        assert!(make_folds(10, 1, 0).is_err());
    }
}
