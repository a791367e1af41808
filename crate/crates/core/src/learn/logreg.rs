//! Logistic regression by full-batch gradient descent.
//!
//! The objective is mean binary cross-entropy plus an L2 penalty of
//! `l2/2 * ||w||^2` that leaves the bias unpenalized. The loss and gradient
//! are public so they can be checked against finite differences.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::fmath;

use super::{param_f64, param_usize, sigmoid, LearnError, ParamMap};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogRegModel {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl LogRegModel {
    pub fn score(&self, row: &[f64]) -> f64 {
        sigmoid(self.weights.iter().zip(row).map(|(w, v)| w * v).sum::<f64>() + self.bias)
    }

    /// Probability 0.5 or above classifies as positive, so the untrained
    /// all-zero model answers 1 everywhere.
    pub fn predict(&self, row: &[f64]) -> u8 {
        u8::from(self.score(row) >= 0.5)
    }
}

/// Mean cross-entropy over the set plus `l2/2 * ||w||^2`.
pub fn logreg_loss(x: &[Vec<f64>], y: &[u8], weights: &[f64], bias: f64, l2: f64) -> f64 {
    let n = x.len() as f64;
    let mut loss = 0.0;
    for (row, &label) in x.iter().zip(y) {
        let p = sigmoid(weights.iter().zip(row).map(|(w, v)| w * v).sum::<f64>() + bias)
            .clamp(1e-12, 1.0 - 1e-12);
        loss -= if label == 1 { fmath::ln(p) } else { fmath::ln(1.0 - p) };
    }
    loss / n + l2 / 2.0 * weights.iter().map(|w| w * w).sum::<f64>()
}

/// Gradient of [`logreg_loss`] in (weights, bias).
pub fn logreg_gradient(
    x: &[Vec<f64>],
    y: &[u8],
    weights: &[f64],
    bias: f64,
    l2: f64,
) -> (Vec<f64>, f64) {
    let n = x.len() as f64;
    let mut grad_w = alloc::vec![0.0; weights.len()];
    let mut grad_b = 0.0;
    for (row, &label) in x.iter().zip(y) {
        let p = sigmoid(weights.iter().zip(row).map(|(w, v)| w * v).sum::<f64>() + bias);
        let err = p - f64::from(label);
        for (g, v) in grad_w.iter_mut().zip(row) {
            *g += err * v;
        }
        grad_b += err;
    }
    for (g, w) in grad_w.iter_mut().zip(weights) {
        *g = *g / n + l2 * w;
    }
    (grad_w, grad_b / n)
}

pub(crate) fn fit(x: &[Vec<f64>], y: &[u8], params: &ParamMap) -> Result<LogRegModel, LearnError> {
    let lr = param_f64(params, "lr", 0.1)?;
    let epochs = param_usize(params, "epochs", 500)?;
    let l2 = param_f64(params, "l2", 1e-4)?;
    let d = x[0].len();
    let mut weights = alloc::vec![0.0; d];
    let mut bias = 0.0;
    for _ in 0..epochs {
        let (gw, gb) = logreg_gradient(x, y, &weights, bias, l2);
        for (w, g) in weights.iter_mut().zip(&gw) {
            *w -= lr * g;
        }
        bias -= lr * gb;
    }
    Ok(LogRegModel { weights, bias })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn test_zero_model_scores_half_and_predicts_positive() {
        let m = LogRegModel { weights: alloc::vec![0.0, 0.0], bias: 0.0 };
        assert_eq!(m.score(&[3.0, -4.0]), 0.5);
        assert_eq!(m.predict(&[3.0, -4.0]), 1);
    }

    #[test]
    fn test_separable_fit() {
        let x: Vec<Vec<f64>> = (-5..=5).map(|i| alloc::vec![f64::from(i)]).collect();
        let y: Vec<u8> = (-5..=5).map(|i| u8::from(i > 0)).collect();
        let m = fit(&x, &y, &ParamMap::new()).unwrap();
        assert_eq!(m.predict(&[-3.0]), 0);
        assert_eq!(m.predict(&[3.0]), 1);
        assert!(m.weights[0] > 0.0);
    }

    #[test]
    fn test_loss_decreases_under_training() {
        let x = alloc::vec![alloc::vec![-1.0], alloc::vec![-0.5], alloc::vec![0.5], alloc::vec![1.0]];
        let y = [0, 0, 1, 1];
        let before = logreg_loss(&x, &y, &[0.0], 0.0, 0.0);
        let m = fit(&x, &y, &ParamMap::new()).unwrap();
        let after = logreg_loss(&x, &y, &m.weights, m.bias, 0.0);
        assert!(after < before);
    }

    #[test]
    fn test_gradient_matches_finite_differences() {
        let x = alloc::vec![
            alloc::vec![0.3, -1.2],
            alloc::vec![1.7, 0.4],
            alloc::vec![-0.6, 0.9]
        ];
        let y = [1, 0, 1];
        let weights = alloc::vec![0.25, -0.75];
        let bias = 0.1;
        let l2 = 0.01;
        let (gw, gb) = logreg_gradient(&x, &y, &weights, bias, l2);
        for j in 0..2 {
            let h = 1e-5 * weights[j].abs().max(1.0);
            let mut wp = weights.clone();
            wp[j] += h;
            let mut wm = weights.clone();
            wm[j] -= h;
            let fd = (logreg_loss(&x, &y, &wp, bias, l2) - logreg_loss(&x, &y, &wm, bias, l2))
                / (2.0 * h);
            assert!((fd - gw[j]).abs() / fd.abs().max(1.0) < 1e-5, "w[{j}]: {fd} vs {}", gw[j]);
        }
        let h = 1e-5 * bias.abs().max(1.0);
        let fd = (logreg_loss(&x, &y, &weights, bias + h, l2)
            - logreg_loss(&x, &y, &weights, bias - h, l2))
            / (2.0 * h);
        assert!((fd - gb).abs() / fd.abs().max(1.0) < 1e-5);
    }

    #[test]
    fn test_l2_shrinks_weights() {
        let x: Vec<Vec<f64>> = (-5..=5).map(|i| alloc::vec![f64::from(i)]).collect();
        let y: Vec<u8> = (-5..=5).map(|i| u8::from(i > 0)).collect();
        let mut free = ParamMap::new();
        free.insert("l2".into(), super::super::ParamValue::Float(0.0));
        let mut tight = ParamMap::new();
        tight.insert("l2".into(), super::super::ParamValue::Float(1.0));
        let a = fit(&x, &y, &free).unwrap();
        let b = fit(&x, &y, &tight).unwrap();
        assert!(b.weights[0].abs() < a.weights[0].abs());
    }

    #[test]
    fn test_sigmoid_extremes_stable() {
        assert!(sigmoid(1000.0) <= 1.0);
        assert!(sigmoid(-1000.0) >= 0.0);
        assert!((sigmoid(0.0) - 0.5).abs() < 1e-15);
    }
}
