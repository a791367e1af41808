//! Fully-connected feed-forward nets, in two training flavours.
//!
//! The static trainer runs a fixed learning rate for a fixed number of
//! epochs. The validated trainer additionally measures dev-set F-measure
//! after every epoch: a regression is a miss, and each miss restores the
//! best weights seen so far and halves the learning rate; training stops
//! once the miss budget is spent, and the returned model is always the best
//! snapshot. Hidden layers are tanh, the single output unit is a sigmoid,
//! and the objective is mean binary cross-entropy.

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::fmath;

use super::{param_f64, param_layers, param_usize, sigmoid, LearnError, ParamMap};

/// Weights are `[layer][unit][input]`, biases `[layer][unit]`; the last
/// layer always has exactly one unit. Fields are public so gradient checks
/// can perturb individual parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NnModel {
    pub weights: Vec<Vec<Vec<f64>>>,
    pub biases: Vec<Vec<f64>>,
}

impl NnModel {
    /// Xavier-uniform weights (limit sqrt(6 / (fan_in + fan_out))), zero
    /// biases, drawn layer by layer, unit by unit, input by input.
    fn init(inputs: usize, hidden: &[usize], rng: &mut ChaCha8Rng) -> NnModel {
        let mut sizes = alloc::vec![inputs];
        sizes.extend_from_slice(hidden);
        sizes.push(1);
        let mut weights = Vec::with_capacity(sizes.len() - 1);
        let mut biases = Vec::with_capacity(sizes.len() - 1);
        for pair in sizes.windows(2) {
            let (fan_in, fan_out) = (pair[0], pair[1]);
            let limit = fmath::sqrt(6.0 / (fan_in + fan_out) as f64);
            let layer: Vec<Vec<f64>> = (0..fan_out)
                .map(|_| (0..fan_in).map(|_| rng.gen_range(-limit..limit)).collect())
                .collect();
            weights.push(layer);
            biases.push(alloc::vec![0.0; fan_out]);
        }
        NnModel { weights, biases }
    }

    /// Post-activation values for every layer; the final entry is `[score]`.
    fn activations(&self, row: &[f64]) -> Vec<Vec<f64>> {
        let mut acts: Vec<Vec<f64>> = Vec::with_capacity(self.weights.len());
        for (l, (layer, biases)) in self.weights.iter().zip(&self.biases).enumerate() {
            let input: &[f64] = if l == 0 { row } else { &acts[l - 1] };
            let last = l + 1 == self.weights.len();
            let out = layer
                .iter()
                .zip(biases)
                .map(|(unit, b)| {
                    let z = unit.iter().zip(input).map(|(w, v)| w * v).sum::<f64>() + b;
                    if last { sigmoid(z) } else { fmath::tanh(z) }
                })
                .collect();
            acts.push(out);
        }
        acts
    }

    pub fn score(&self, row: &[f64]) -> f64 {
        self.activations(row).last().expect("at least the output layer")[0]
    }

    pub fn predict(&self, row: &[f64]) -> u8 {
        u8::from(self.score(row) >= 0.5)
    }

    /// Mean binary cross-entropy over the batch.
    pub fn loss(&self, x: &[Vec<f64>], y: &[u8]) -> f64 {
        let mut total = 0.0;
        for (row, &label) in x.iter().zip(y) {
            let p = self.score(row).clamp(1e-12, 1.0 - 1e-12);
            total -= if label == 1 { fmath::ln(p) } else { fmath::ln(1.0 - p) };
        }
        total / x.len() as f64
    }

    /// Backpropagated gradient of [`loss`](NnModel::loss), same shapes as
    /// the parameters.
    pub fn gradients(&self, x: &[Vec<f64>], y: &[u8]) -> (Vec<Vec<Vec<f64>>>, Vec<Vec<f64>>) {
        let idx: Vec<usize> = (0..x.len()).collect();
        self.gradients_idx(x, y, &idx)
    }

    fn gradients_idx(
        &self,
        x: &[Vec<f64>],
        y: &[u8],
        idx: &[usize],
    ) -> (Vec<Vec<Vec<f64>>>, Vec<Vec<f64>>) {
        let depth = self.weights.len();
        let mut grad_w: Vec<Vec<Vec<f64>>> = self
            .weights
            .iter()
            .map(|layer| layer.iter().map(|unit| alloc::vec![0.0; unit.len()]).collect())
            .collect();
        let mut grad_b: Vec<Vec<f64>> =
            self.biases.iter().map(|b| alloc::vec![0.0; b.len()]).collect();

        for &i in idx {
            let row = &x[i];
            let acts = self.activations(row);
            // Sigmoid output with cross-entropy collapses to p - y; tanh
            // layers propagate through 1 - a^2.
            let mut delta = alloc::vec![acts[depth - 1][0] - f64::from(y[i])];
            for l in (0..depth).rev() {
                let input: &[f64] = if l == 0 { row } else { &acts[l - 1] };
                for (u, d) in delta.iter().enumerate() {
                    for (g, v) in grad_w[l][u].iter_mut().zip(input) {
                        *g += d * v;
                    }
                    grad_b[l][u] += d;
                }
                if l > 0 {
                    delta = (0..self.weights[l][0].len())
                        .map(|j| {
                            let back: f64 = self.weights[l]
                                .iter()
                                .zip(&delta)
                                .map(|(unit, d)| unit[j] * d)
                                .sum();
                            back * (1.0 - acts[l - 1][j] * acts[l - 1][j])
                        })
                        .collect();
                }
            }
        }

        let n = idx.len() as f64;
        for layer in &mut grad_w {
            for unit in layer {
                for g in unit {
                    *g /= n;
                }
            }
        }
        for layer in &mut grad_b {
            for g in layer {
                *g /= n;
            }
        }
        (grad_w, grad_b)
    }

    fn step(&mut self, grad_w: &[Vec<Vec<f64>>], grad_b: &[Vec<f64>], lr: f64) {
        for (layer, glayer) in self.weights.iter_mut().zip(grad_w) {
            for (unit, gunit) in layer.iter_mut().zip(glayer) {
                for (w, g) in unit.iter_mut().zip(gunit) {
                    *w -= lr * g;
                }
            }
        }
        for (layer, glayer) in self.biases.iter_mut().zip(grad_b) {
            for (b, g) in layer.iter_mut().zip(glayer) {
                *b -= lr * g;
            }
        }
    }
}

/// Per-epoch early-stopping bookkeeping for the validated trainer. A strictly
/// better validation score is a new best, an equal one changes nothing, and a
/// worse one is a miss; `stop` turns true once misses reach the budget.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationPolicy {
    max_misses: usize,
    misses: usize,
    best: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolicyAction {
    SaveBest,
    Continue,
    Miss { stop: bool },
}

impl ValidationPolicy {
    pub fn new(max_misses: usize) -> ValidationPolicy {
        ValidationPolicy { max_misses, misses: 0, best: f64::NEG_INFINITY }
    }

    pub fn observe(&mut self, score: f64) -> PolicyAction {
        if score > self.best {
            self.best = score;
            PolicyAction::SaveBest
        } else if score == self.best {
            PolicyAction::Continue
        } else {
            self.misses += 1;
            PolicyAction::Miss { stop: self.misses >= self.max_misses }
        }
    }

    pub fn misses(&self) -> usize {
        self.misses
    }
}

struct NetConfig {
    hidden: Vec<usize>,
    lr: f64,
    epochs: usize,
    batch_size: usize,
}

fn config(params: &ParamMap) -> Result<NetConfig, LearnError> {
    let hidden = param_layers(params, "layers", &[64, 32])?;
    let lr = param_f64(params, "lr", 0.1)?;
    if lr <= 0.0 {
        return Err(LearnError::InvalidParameter {
            name: "lr".into(),
            reason: "must be positive".into(),
        });
    }
    let epochs = param_usize(params, "epochs", 100)?;
    let batch_size = param_usize(params, "batch_size", 32)?;
    if batch_size == 0 {
        return Err(LearnError::InvalidParameter {
            name: "batch_size".into(),
            reason: "must be at least 1".into(),
        });
    }
    Ok(NetConfig { hidden, lr, epochs, batch_size })
}

fn run_epoch(
    model: &mut NnModel,
    x: &[Vec<f64>],
    y: &[u8],
    order: &mut [usize],
    batch_size: usize,
    lr: f64,
    rng: &mut ChaCha8Rng,
) {
    order.shuffle(rng);
    for chunk in order.chunks(batch_size) {
        let (gw, gb) = model.gradients_idx(x, y, chunk);
        model.step(&gw, &gb, lr);
    }
}

pub(crate) fn fit_static(
    x: &[Vec<f64>],
    y: &[u8],
    params: &ParamMap,
    seed: u64,
) -> Result<NnModel, LearnError> {
    let cfg = config(params)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut model = NnModel::init(x[0].len(), &cfg.hidden, &mut rng);
    let mut order: Vec<usize> = (0..x.len()).collect();
    for _ in 0..cfg.epochs {
        run_epoch(&mut model, x, y, &mut order, cfg.batch_size, cfg.lr, &mut rng);
    }
    Ok(model)
}

/// F-measure of hard predictions; 0.0 when precision or recall is undefined.
fn dev_f_measure(model: &NnModel, x: &[Vec<f64>], y: &[u8]) -> f64 {
    let mut tp = 0u64;
    let mut fp = 0u64;
    let mut fneg = 0u64;
    for (row, &label) in x.iter().zip(y) {
        match (label, model.predict(row)) {
            (1, 1) => tp += 1,
            (0, 1) => fp += 1,
            (1, 0) => fneg += 1,
            _ => {}
        }
    }
    if tp == 0 {
        return 0.0;
    }
    let p = tp as f64 / (tp + fp) as f64;
    let r = tp as f64 / (tp + fneg) as f64;
    2.0 * p * r / (p + r)
}

pub(crate) fn fit_validated(
    x: &[Vec<f64>],
    y: &[u8],
    dev_x: &[Vec<f64>],
    dev_y: &[u8],
    params: &ParamMap,
    seed: u64,
) -> Result<NnModel, LearnError> {
    let cfg = config(params)?;
    let max_misses = param_usize(params, "max_misses", 4)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut model = NnModel::init(x[0].len(), &cfg.hidden, &mut rng);
    let mut best = model.clone();
    let mut policy = ValidationPolicy::new(max_misses);
    let mut lr = cfg.lr;
    let mut order: Vec<usize> = (0..x.len()).collect();
    for _ in 0..cfg.epochs {
        run_epoch(&mut model, x, y, &mut order, cfg.batch_size, lr, &mut rng);
        match policy.observe(dev_f_measure(&model, dev_x, dev_y)) {
            PolicyAction::SaveBest => best = model.clone(),
            PolicyAction::Continue => {}
            PolicyAction::Miss { stop } => {
                model = best.clone();
                lr /= 2.0;
                if stop {
                    break;
                }
            }
        }
    }
    Ok(best)
}
