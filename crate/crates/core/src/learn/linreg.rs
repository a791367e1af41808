//! Least-squares regression used as a classifier.
//!
//! Solves the normal equations with partially-pivoted Gaussian elimination.
//! A tiny ridge term (1e-8) on the Gram diagonal keeps the system solvable
//! when feature columns alias each other, which genuinely happens here: two
//! of the static metrics are exact duplicates of others.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::LearnError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinRegModel {
    pub(crate) weights: Vec<f64>,
    pub(crate) bias: f64,
}

impl LinRegModel {
    pub fn raw(&self, row: &[f64]) -> f64 {
        self.weights.iter().zip(row).map(|(w, v)| w * v).sum::<f64>() + self.bias
    }

    /// Regression output 0.5 or above classifies as positive.
    pub fn predict(&self, row: &[f64]) -> u8 {
        u8::from(self.raw(row) >= 0.5)
    }

    pub fn score(&self, row: &[f64]) -> f64 {
        self.raw(row).clamp(0.0, 1.0)
    }
}

/// Solves `a x = rhs` in place; `a` is row-major n x n.
fn solve(mut a: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Vec<f64> {
    let n = rhs.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| {
                a[i][col]
                    .abs()
                    .partial_cmp(&a[j][col].abs())
                    .expect("finite")
            })
            .expect("non-empty");
        a.swap(col, pivot);
        rhs.swap(col, pivot);
        let diag = a[col][col];
        for row in col + 1..n {
            let factor = a[row][col] / diag;
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
            rhs[row] -= factor * rhs[col];
        }
    }
    let mut x = alloc::vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = rhs[row];
        for k in row + 1..n {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    x
}

pub(crate) fn fit(x: &[Vec<f64>], y: &[u8]) -> Result<LinRegModel, LearnError> {
    let d = x[0].len();
    // Augmented design: d feature columns plus the intercept.
    let m = d + 1;
    let mut gram = alloc::vec![alloc::vec![0.0f64; m]; m];
    let mut rhs = alloc::vec![0.0f64; m];
    let aug = |row: &Vec<f64>, j: usize| if j < d { row[j] } else { 1.0 };
    for (row, &label) in x.iter().zip(y) {
        let target = f64::from(label);
        for i in 0..m {
            let vi = aug(row, i);
            for j in i..m {
                gram[i][j] += vi * aug(row, j);
            }
            rhs[i] += vi * target;
        }
    }
    for i in 0..m {
        for j in 0..i {
            gram[i][j] = gram[j][i];
        }
        gram[i][i] += 1e-8;
    }
    let mut solution = solve(gram, rhs);
    let bias = solution.pop().expect("m >= 1");
    Ok(LinRegModel { weights: solution, bias })
}
