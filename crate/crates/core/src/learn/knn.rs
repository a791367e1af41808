//! k-nearest-neighbors over z-scored features.
//!
//! Neighbors are picked by squared Euclidean distance with the training row
//! index as tie-breaker, so equidistant points never make the answer depend
//! on sort internals. Votes tie toward the negative class.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{param_usize, LearnError, ParamMap};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    pub(crate) k: usize,
    pub(crate) points: Vec<Vec<f64>>,
    pub(crate) labels: Vec<u8>,
}

pub(crate) fn fit(x: &[Vec<f64>], y: &[u8], params: &ParamMap) -> Result<KnnModel, LearnError> {
    let k = param_usize(params, "k", 5)?;
    if k == 0 {
        return Err(LearnError::InvalidParameter {
            name: "k".into(),
            reason: "k must be at least 1".into(),
        });
    }
    Ok(KnnModel { k: k.min(x.len()), points: x.to_vec(), labels: y.to_vec() })
}

impl KnnModel {
    fn neighbor_votes(&self, row: &[f64]) -> usize {
        let mut dists: Vec<(f64, usize)> = self
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let d2: f64 = p.iter().zip(row).map(|(a, b)| (a - b) * (a - b)).sum();
                (d2, i)
            })
            .collect();
        dists.sort_by(|a, b| {
            a.0.partial_cmp(&b.0)
                .expect("distances are finite")
                .then(a.1.cmp(&b.1))
        });
        dists[..self.k]
            .iter()
            .filter(|&&(_, i)| self.labels[i] == 1)
            .count()
    }

    pub fn predict(&self, row: &[f64]) -> u8 {
        let pos = self.neighbor_votes(row);
        u8::from(pos * 2 > self.k)
    }

    /// Fraction of positive neighbors.
    pub fn score(&self, row: &[f64]) -> f64 {
        self.neighbor_votes(row) as f64 / self.k as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use super::super::ParamValue;

    fn grid() -> (Vec<Vec<f64>>, Vec<u8>) {
        let x = alloc::vec![
            alloc::vec![0.0, 0.0],
            alloc::vec![0.0, 1.0],
            alloc::vec![5.0, 5.0],
            alloc::vec![5.0, 6.0],
        ];
        (x, alloc::vec![0, 0, 1, 1])
    }

    fn with_k(k: i64) -> ParamMap {
        let mut p = ParamMap::new();
        p.insert("k".into(), ParamValue::Int(k));
        p
    }

    #[test]
    fn test_k1_memorizes_training_set() {
        let (x, y) = grid();
        let m = fit(&x, &y, &with_k(1)).unwrap();
        for (row, &want) in x.iter().zip(&y) {
            assert_eq!(m.predict(row), want);
        }
    }

    #[test]
    fn test_k3_majority() {
        let (x, y) = grid();
        let m = fit(&x, &y, &with_k(3)).unwrap();
        // Near the negative cluster: neighbors are the two negatives + one
        // positive.
        assert_eq!(m.predict(&[0.0, 0.5]), 0);
        assert_eq!(m.predict(&[5.0, 5.5]), 1);
    }

    #[test]
    fn test_even_vote_ties_negative() {
        let (x, y) = grid();
        let m = fit(&x, &y, &with_k(4)).unwrap();
        // All four neighbors vote 2-2 anywhere.
        assert_eq!(m.predict(&[2.5, 3.0]), 0);
        assert_eq!(m.score(&[2.5, 3.0]), 0.5);
    }

    #[test]
    fn test_equidistant_tie_takes_lower_index() {
        // Row 0 (label 0) and row 1 (label 1) are equidistant from the
        // query; k=1 must pick the lower index.
        let x = alloc::vec![alloc::vec![-1.0], alloc::vec![1.0]];
        let y = alloc::vec![0, 1];
        let m = fit(&x, &y, &with_k(1)).unwrap();
        assert_eq!(m.predict(&[0.0]), 0);
    }

    #[test]
    fn test_k_clamped_to_population() {
        let x = alloc::vec![alloc::vec![0.0], alloc::vec![1.0]];
        let m = fit(&x, &[0, 1], &with_k(50)).unwrap();
        assert_eq!(m.k, 2);
    }

    #[test]
    fn test_zero_k_rejected() {
        let x = alloc::vec![alloc::vec![0.0]];
        assert!(fit(&x, &[0], &with_k(0)).is_err());
    }
}
