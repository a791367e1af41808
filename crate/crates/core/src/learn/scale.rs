//! Z-score standardization fitted on training data only.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::fmath;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    pub means: Vec<f64>,
    /// Population standard deviations; a (near-)constant column gets 1.0 so
    /// it scales to zero instead of dividing by nothing.
    pub stds: Vec<f64>,
}

impl Scaler {
    pub fn fit(rows: &[Vec<f64>]) -> Scaler {
        let d = rows.first().map_or(0, Vec::len);
        let n = rows.len() as f64;
        let mut means = alloc::vec![0.0; d];
        for row in rows {
            for (m, v) in means.iter_mut().zip(row) {
                *m += v;
            }
        }
        for m in &mut means {
            *m /= n;
        }
        let mut vars = alloc::vec![0.0; d];
        for row in rows {
            for ((var, v), m) in vars.iter_mut().zip(row).zip(&means) {
                let c = v - m;
                *var += c * c;
            }
        }
        let stds = vars
            .into_iter()
            .map(|v| {
                let s = fmath::sqrt(v / n);
                if s < 1e-12 {
                    1.0
                } else {
                    s
                }
            })
            .collect();
        Scaler { means, stds }
    }

    pub fn transform(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(&self.means)
            .zip(&self.stds)
            .map(|((v, m), s)| (v - m) / s)
            .collect()
    }

    pub fn transform_all(&self, rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
        rows.iter().map(|r| self.transform(r)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn test_fit_and_transform() {
        let rows = alloc::vec![alloc::vec![1.0, 10.0], alloc::vec![3.0, 10.0]];
        let s = Scaler::fit(&rows);
        assert_eq!(s.means, [2.0, 10.0]);
        assert_eq!(s.stds, [1.0, 1.0]); // population std of {1,3} is 1
        let t = s.transform(&[3.0, 10.0]);
        assert_eq!(t, [1.0, 0.0]);
    }

    #[test]
    fn test_constant_column_maps_to_zero() {
        let rows = alloc::vec![alloc::vec![5.0], alloc::vec![5.0], alloc::vec![5.0]];
        let s = Scaler::fit(&rows);
        assert_eq!(s.transform(&[5.0]), [0.0]);
        assert_eq!(s.transform(&[6.0]), [1.0]);
    }

    #[test]
    fn test_transformed_train_has_zero_mean_unit_var() {
        let rows: Vec<Vec<f64>> = (0..10).map(|i| alloc::vec![i as f64 * 3.0 - 4.0]).collect();
        let s = Scaler::fit(&rows);
        let t = s.transform_all(&rows);
        let mean: f64 = t.iter().map(|r| r[0]).sum::<f64>() / 10.0;
        let var: f64 = t.iter().map(|r| r[0] * r[0]).sum::<f64>() / 10.0;
        assert!(mean.abs() < 1e-12);
        assert!((var - 1.0).abs() < 1e-12);
    }
}
