//! ZeroR baseline: always answer the training majority class.

use serde::{Deserialize, Serialize};

use super::LearnError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroRModel {
    pub majority: u8,
    pub positive_rate: f64,
}

impl ZeroRModel {
    /// Score is the positive prevalence seen at fit time, independent of the
    /// row. Predictions come from `majority`, not from thresholding this.
    pub fn score(&self) -> f64 {
        self.positive_rate
    }
}

pub(crate) fn fit(y: &[u8]) -> Result<ZeroRModel, LearnError> {
    let pos = y.iter().filter(|&&l| l == 1).count();
    // Exact ties favour the negative class.
    let majority = u8::from(pos * 2 > y.len());
    Ok(ZeroRModel { majority, positive_rate: pos as f64 / y.len() as f64 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn test_majority_negative() {
        let m = fit(&[0, 0, 0, 1]).unwrap();
        assert_eq!(m.majority, 0);
        assert!((m.score() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn test_majority_positive() {
        let m = fit(&[1, 1, 1, 0]).unwrap();
        assert_eq!(m.majority, 1);
        assert!((m.score() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn test_tie_goes_negative() {
        let m = fit(&[0, 1, 0, 1]).unwrap();
        assert_eq!(m.majority, 0);
        assert!((m.score() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn test_single_class() {
        let m = fit(&[1, 1, 1]).unwrap();
        assert_eq!(m.majority, 1);
        assert_eq!(m.score(), 1.0);
    }
}
