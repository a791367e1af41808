//! Bagged CART ensemble with per-node feature subsampling.
//!
//! Tree `t` draws from a ChaCha stream keyed by `t`, so the forest is
//! reproducible for a given seed no matter how training is scheduled, and a
//! single-tree forest with all features and no bootstrap degenerates to the
//! plain decision tree exactly.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::tree::{fit_on, DecisionTree, TreeConfig};
use super::{param_bool, param_usize, param_text, LearnError, ParamMap, ParamValue};
use crate::fmath;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    pub(crate) trees: Vec<DecisionTree>,
}

impl RandomForest {
    /// Majority vote; an even split answers 0.
    pub fn predict(&self, row: &[f64]) -> u8 {
        let pos: usize = self.trees.iter().map(|t| usize::from(t.predict(row))).sum();
        u8::from(pos * 2 > self.trees.len())
    }

    /// Fraction of trees voting positive.
    pub fn score(&self, row: &[f64]) -> f64 {
        let pos: usize = self.trees.iter().map(|t| usize::from(t.predict(row))).sum();
        pos as f64 / self.trees.len() as f64
    }
}

fn max_features(params: &ParamMap, d: usize) -> Result<usize, LearnError> {
    match params.get("max_features") {
        Some(ParamValue::Int(c)) if *c > 0 => Ok((*c as usize).min(d)),
        Some(ParamValue::Text(_)) | None => match param_text(params, "max_features", "sqrt")? {
            "all" => Ok(d),
            "sqrt" => Ok((fmath::sqrt(d as f64) as usize).max(1)),
            other => Err(LearnError::InvalidParameter {
                name: "max_features".into(),
                reason: alloc::format!("expected \"sqrt\", \"all\", or a count, got \"{other}\""),
            }),
        },
        Some(_) => Err(LearnError::InvalidParameter {
            name: "max_features".into(),
            reason: "expected \"sqrt\", \"all\", or a positive count".into(),
        }),
    }
}

pub(crate) fn fit(
    x: &[Vec<f64>],
    y: &[u8],
    params: &ParamMap,
    seed: u64,
) -> Result<RandomForest, LearnError> {
    let n_trees = param_usize(params, "n_trees", 100)?.max(1);
    let bootstrap = param_bool(params, "bootstrap", true)?;
    let cfg = TreeConfig::from_params(params)?;
    let d = x[0].len();
    let m = max_features(params, d)?;
    let n = x.len();

    let mut trees = Vec::with_capacity(n_trees);
    for t in 0..n_trees {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(t as u64);
        let indices: Vec<usize> = if bootstrap {
            (0..n).map(|_| rng.gen_range(0..n)).collect()
        } else {
            (0..n).collect()
        };
        let pick = (m < d).then_some((m, &mut rng));
        trees.push(fit_on(x, y, indices, &cfg, pick));
    }
    Ok(RandomForest { trees })
}

#[cfg(test)]
mod tests {
    use super::*;
    use super::super::tree;

    fn separable() -> (Vec<Vec<f64>>, Vec<u8>) {
        let mut x = Vec::new();
        let mut y = Vec::new();
        for i in 0..20 {
            let v = i as f64 / 10.0;
            x.push(alloc::vec![v, 1.0 - v]);
            y.push(u8::from(i >= 10));
        }
        (x, y)
    }

    #[test]
    fn test_single_tree_no_bootstrap_equals_dt() {
        let (x, y) = separable();
        let mut params = ParamMap::new();
        params.insert("n_trees".into(), ParamValue::Int(1));
        params.insert("bootstrap".into(), ParamValue::Bool(false));
        params.insert("max_features".into(), ParamValue::Text("all".into()));
        let forest = fit(&x, &y, &params, 99).unwrap();
        let dt = tree::fit(&x, &y, &ParamMap::new()).unwrap();
        assert_eq!(forest.trees[0], dt);
    }

    #[test]
    fn test_majority_vote_and_tie() {
        let leaf = |label| DecisionTree { nodes: alloc::vec![tree::Node::Leaf { label }] };
        let f = RandomForest { trees: alloc::vec![leaf(1), leaf(1), leaf(0)] };
        assert_eq!(f.predict(&[]), 1);
        assert_eq!(f.score(&[]), 2.0 / 3.0);
        let tied = RandomForest { trees: alloc::vec![leaf(1), leaf(0)] };
        assert_eq!(tied.predict(&[]), 0, "even vote must answer negative");
    }

    #[test]
    fn test_forest_fits_separable_data() {
        let (x, y) = separable();
        let mut params = ParamMap::new();
        params.insert("n_trees".into(), ParamValue::Int(25));
        let f = fit(&x, &y, &params, 3).unwrap();
        let correct = x
            .iter()
            .zip(&y)
            .filter(|(row, &want)| f.predict(row) == want)
            .count();
        assert_eq!(correct, x.len());
    }

    #[test]
    fn test_seeded_reproducibility() {
        let (x, y) = separable();
        let a = fit(&x, &y, &ParamMap::new(), 7).unwrap();
        let b = fit(&x, &y, &ParamMap::new(), 7).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn test_max_features_parsing() {
        let d = 16;
        let m = |v: ParamValue| {
            let mut p = ParamMap::new();
            p.insert("max_features".into(), v);
            max_features(&p, d)
        };
        assert_eq!(max_features(&ParamMap::new(), d).unwrap(), 4);
        assert_eq!(m(ParamValue::Text("all".into())).unwrap(), 16);
        assert_eq!(m(ParamValue::Int(5)).unwrap(), 5);
        assert_eq!(m(ParamValue::Int(99)).unwrap(), 16);
        assert!(m(ParamValue::Text("log2".into())).is_err());
    }
}
