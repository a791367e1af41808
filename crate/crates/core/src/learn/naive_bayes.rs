//! Gaussian naive Bayes.
//!
//! Each feature gets a per-class mean and population variance; variances are
//! floored at 1e-9 so constant columns stay usable. All likelihood work is in
//! log space.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::fmath;

use super::LearnError;

const VAR_FLOOR: f64 = 1e-9;
const LN_TWO_PI: f64 = 1.837_877_066_409_345_6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NbModel {
    pub log_prior: [f64; 2],
    pub means: [Vec<f64>; 2],
    pub vars: [Vec<f64>; 2],
}

impl NbModel {
    fn log_posterior(&self, row: &[f64], class: usize) -> f64 {
        let mut lp = self.log_prior[class];
        for ((v, m), s2) in row.iter().zip(&self.means[class]).zip(&self.vars[class]) {
            let diff = v - m;
            lp -= 0.5 * (LN_TWO_PI + fmath::ln(*s2) + diff * diff / s2);
        }
        lp
    }

    /// Ties go to the negative class.
    pub fn predict(&self, row: &[f64]) -> u8 {
        u8::from(self.log_posterior(row, 1) > self.log_posterior(row, 0))
    }

    pub fn score(&self, row: &[f64]) -> f64 {
        let lp0 = self.log_posterior(row, 0);
        let lp1 = self.log_posterior(row, 1);
        // P(1 | row) = exp(lp1) / (exp(lp0) + exp(lp1)), rearranged to stay
        // finite for large magnitude log posteriors.
        1.0 / (1.0 + fmath::exp((lp0 - lp1).clamp(-700.0, 700.0)))
    }
}

pub(crate) fn fit(x: &[Vec<f64>], y: &[u8]) -> Result<NbModel, LearnError> {
    let d = x[0].len();
    let n = x.len();
    let counts = [y.iter().filter(|&&l| l == 0).count(), y.iter().filter(|&&l| l == 1).count()];
    for (label, &count) in counts.iter().enumerate() {
        if count == 0 {
            return Err(LearnError::EmptyClass { label: label as u8 });
        }
    }
    let mut means = [alloc::vec![0.0; d], alloc::vec![0.0; d]];
    for (row, &label) in x.iter().zip(y) {
        for (m, v) in means[usize::from(label)].iter_mut().zip(row) {
            *m += v;
        }
    }
    for (class, count) in counts.iter().enumerate() {
        for m in &mut means[class] {
            *m /= *count as f64;
        }
    }
    let mut vars = [alloc::vec![0.0; d], alloc::vec![0.0; d]];
    for (row, &label) in x.iter().zip(y) {
        let class = usize::from(label);
        for ((s2, v), m) in vars[class].iter_mut().zip(row).zip(&means[class]) {
            let diff = v - m;
            *s2 += diff * diff;
        }
    }
    for (class, count) in counts.iter().enumerate() {
        for s2 in &mut vars[class] {
            *s2 = (*s2 / *count as f64).max(VAR_FLOOR);
        }
    }
    let log_prior =
        [fmath::ln(counts[0] as f64 / n as f64), fmath::ln(counts[1] as f64 / n as f64)];
    Ok(NbModel { log_prior, means, vars })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_cluster() -> (Vec<Vec<f64>>, Vec<u8>) {
        let x = alloc::vec![
            alloc::vec![-2.0, -2.1],
            alloc::vec![-1.9, -2.0],
            alloc::vec![-2.1, -1.8],
            alloc::vec![2.0, 2.1],
            alloc::vec![1.9, 2.0],
            alloc::vec![2.1, 1.8],
        ];
        let y = alloc::vec![0, 0, 0, 1, 1, 1];
        (x, y)
    }

    #[test]
    fn test_cluster_separation() {
        let (x, y) = two_cluster();
        let m = fit(&x, &y).unwrap();
        assert_eq!(m.predict(&[-2.0, -2.0]), 0);
        assert_eq!(m.predict(&[2.0, 2.0]), 1);
        assert!(m.score(&[2.0, 2.0]) > 0.99);
        assert!(m.score(&[-2.0, -2.0]) < 0.01);
    }

    #[test]
    fn test_closed_form_parameters() {
        let x = alloc::vec![
            alloc::vec![1.0],
            alloc::vec![3.0],
            alloc::vec![10.0],
            alloc::vec![14.0]
        ];
        let y = [0, 0, 1, 1];
        let m = fit(&x, &y).unwrap();
        assert!((m.means[0][0] - 2.0).abs() < 1e-12);
        assert!((m.means[1][0] - 12.0).abs() < 1e-12);
        // Population variance: ((1-2)^2 + (3-2)^2) / 2 = 1.
        assert!((m.vars[0][0] - 1.0).abs() < 1e-12);
        assert!((m.vars[1][0] - 4.0).abs() < 1e-12);
        assert!((m.log_prior[0] - fmath::ln(0.5)).abs() < 1e-12);
    }

    #[test]
    fn test_constant_feature_gets_floor() {
        let x = alloc::vec![
            alloc::vec![5.0, 0.0],
            alloc::vec![5.0, 1.0],
            alloc::vec![5.0, 10.0],
            alloc::vec![5.0, 11.0]
        ];
        let y = [0, 0, 1, 1];
        let m = fit(&x, &y).unwrap();
        assert_eq!(m.vars[0][0], VAR_FLOOR);
        assert_eq!(m.predict(&[5.0, 0.5]), 0);
        assert_eq!(m.predict(&[5.0, 10.5]), 1);
    }

    #[test]
    fn test_missing_class_rejected() {
        let x = alloc::vec![alloc::vec![1.0], alloc::vec![2.0]];
        assert!(matches!(fit(&x, &[0, 0]), Err(LearnError::EmptyClass { label: 1 })));
        assert!(matches!(fit(&x, &[1, 1]), Err(LearnError::EmptyClass { label: 0 })));
    }

    #[test]
    fn test_exact_tie_goes_negative() {
        // Symmetric clusters make the midpoint an exact posterior tie.
        let x = alloc::vec![
            alloc::vec![-1.0],
            alloc::vec![-3.0],
            alloc::vec![1.0],
            alloc::vec![3.0]
        ];
        let y = [0, 0, 1, 1];
        let m = fit(&x, &y).unwrap();
        assert_eq!(m.predict(&[0.0]), 0);
        assert!((m.score(&[0.0]) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn test_imbalanced_prior() {
        let x = alloc::vec![
            alloc::vec![0.0],
            alloc::vec![0.1],
            alloc::vec![-0.1],
            alloc::vec![0.05]
        ];
        let y = [0, 0, 0, 1];
        let m = fit(&x, &y).unwrap();
        assert!((m.log_prior[0] - fmath::ln(0.75)).abs() < 1e-12);
        assert!((m.log_prior[1] - fmath::ln(0.25)).abs() < 1e-12);
    }
}
