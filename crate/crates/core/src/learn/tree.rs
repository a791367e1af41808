//! CART decision tree with Gini impurity.
//!
//! Splits are binary on `value <= threshold` with thresholds at midpoints
//! between consecutive distinct feature values. The search scans features in
//! ascending index order and thresholds in ascending value order, accepting
//! only strict improvements, so ties resolve to the lowest feature index and
//! lowest threshold and the tree is a pure function of its inputs.

use alloc::vec::Vec;

use rand::seq::index::sample;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{param_usize, LearnError, ParamMap};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub(crate) enum Node {
    Leaf { label: u8 },
    Split { feature: usize, threshold: f64, left: usize, right: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub(crate) nodes: Vec<Node>,
}

impl DecisionTree {
    pub fn predict(&self, row: &[f64]) -> u8 {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf { label } => return *label,
                Node::Split { feature, threshold, left, right } => {
                    at = if row[*feature] <= *threshold { *left } else { *right };
                }
            }
        }
    }
}

pub(crate) struct TreeConfig {
    pub max_depth: usize,
    pub min_samples_split: usize,
}

impl TreeConfig {
    pub fn from_params(params: &ParamMap) -> Result<TreeConfig, LearnError> {
        Ok(TreeConfig {
            max_depth: param_usize(params, "max_depth", 16)?,
            min_samples_split: param_usize(params, "min_samples_split", 2)?,
        })
    }
}

pub(crate) fn fit(x: &[Vec<f64>], y: &[u8], params: &ParamMap) -> Result<DecisionTree, LearnError> {
    let cfg = TreeConfig::from_params(params)?;
    let indices: Vec<usize> = (0..x.len()).collect();
    Ok(fit_on(x, y, indices, &cfg, None))
}

/// Grows a tree on `indices`. `feature_pick = (m, rng)` samples m candidate
/// features per node, the random-forest regime; `None` considers all.
pub(crate) fn fit_on(
    x: &[Vec<f64>],
    y: &[u8],
    indices: Vec<usize>,
    cfg: &TreeConfig,
    mut feature_pick: Option<(usize, &mut ChaCha8Rng)>,
) -> DecisionTree {
    let mut nodes = Vec::new();
    grow(x, y, indices, cfg, &mut feature_pick, 0, &mut nodes);
    DecisionTree { nodes }
}

fn gini(pos: usize, total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let p1 = pos as f64 / total as f64;
    let p0 = 1.0 - p1;
    1.0 - p0 * p0 - p1 * p1
}

fn majority(pos: usize, total: usize) -> u8 {
    u8::from(pos * 2 > total)
}

fn grow(
    x: &[Vec<f64>],
    y: &[u8],
    indices: Vec<usize>,
    cfg: &TreeConfig,
    feature_pick: &mut Option<(usize, &mut ChaCha8Rng)>,
    depth: usize,
    nodes: &mut Vec<Node>,
) -> usize {
    let n = indices.len();
    let pos = indices.iter().filter(|&&i| y[i] == 1).count();

    let make_leaf = |nodes: &mut Vec<Node>| {
        nodes.push(Node::Leaf { label: majority(pos, n) });
        nodes.len() - 1
    };

    if depth >= cfg.max_depth || n < cfg.min_samples_split || pos == 0 || pos == n {
        return make_leaf(nodes);
    }

    let d = x[0].len();
    let features: Vec<usize> = match feature_pick {
        Some((m, rng)) if *m < d => {
            let mut picked = sample(rng, d, *m).into_vec();
            // Ascending so the tie rule matches the exhaustive search.
            picked.sort_unstable();
            picked
        }
        _ => (0..d).collect(),
    };

    let mut best: Option<(f64, usize, f64)> = None; // (weighted gini, feature, threshold)
    let mut order = indices.clone();
    for &feature in &features {
        order.sort_by(|&a, &b| {
            x[a][feature]
                .partial_cmp(&x[b][feature])
                .expect("features validated finite")
        });
        let mut left_pos = 0;
        let mut left_n = 0;
        for w in 0..n - 1 {
            let i = order[w];
            left_n += 1;
            left_pos += usize::from(y[i] == 1);
            let here = x[i][feature];
            let next = x[order[w + 1]][feature];
            if here == next {
                continue;
            }
            let threshold = here + (next - here) / 2.0;
            let right_n = n - left_n;
            let right_pos = pos - left_pos;
            let weighted = (left_n as f64 * gini(left_pos, left_n)
                + right_n as f64 * gini(right_pos, right_n))
                / n as f64;
            if best.is_none_or(|(b, _, _)| weighted < b) {
                best = Some((weighted, feature, threshold));
            }
        }
    }

    // Weighted child impurity never exceeds the parent's (Gini is concave),
    // so any candidate split is acceptable; zero-improvement splits are kept
    // because patterns like XOR only separate below them.
    let Some((_, feature, threshold)) = best else {
        return make_leaf(nodes);
    };

    let (left_idx, right_idx): (Vec<usize>, Vec<usize>) =
        indices.into_iter().partition(|&i| x[i][feature] <= threshold);
    let at = nodes.len();
    nodes.push(Node::Split { feature, threshold, left: 0, right: 0 });
    let left = grow(x, y, left_idx, cfg, feature_pick, depth + 1, nodes);
    let right = grow(x, y, right_idx, cfg, feature_pick, depth + 1, nodes);
    nodes[at] = Node::Split { feature, threshold, left, right };
    at
}
