//! Support vector machine trained with the simplified SMO procedure.
//!
//! Targets are mapped to ±1 and pairs of Lagrange multipliers are optimized
//! until a full sweep makes no progress (KKT satisfied within `tol`, default
//! 1e-3). Partner selection is the classic random pick, drawn from a seeded
//! ChaCha stream so the fit is reproducible. The kernel matrix is cached
//! densely for small training sets and evaluated on demand for large ones.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::fmath;

use super::{param_f64, param_text, param_usize, LearnError, ParamMap};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Kernel {
    Linear,
    Rbf { gamma: f64 },
}

impl Kernel {
    fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Kernel::Linear => a.iter().zip(b).map(|(x, y)| x * y).sum(),
            Kernel::Rbf { gamma } => {
                let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
                fmath::exp(-gamma * d2)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub(crate) kernel: Kernel,
    pub(crate) support: Vec<Vec<f64>>,
    /// alpha_i * t_i per support vector.
    pub(crate) coeffs: Vec<f64>,
    pub(crate) bias: f64,
}

impl SvmModel {
    pub fn decision(&self, row: &[f64]) -> f64 {
        self.support
            .iter()
            .zip(&self.coeffs)
            .map(|(sv, c)| c * self.kernel.eval(sv, row))
            .sum::<f64>()
            + self.bias
    }

    /// Non-negative decision values classify as positive.
    pub fn predict(&self, row: &[f64]) -> u8 {
        u8::from(self.decision(row) >= 0.0)
    }
}

/// Dense cache below this size; quadratic memory is not worth it above.
const DENSE_LIMIT: usize = 2048;

struct KernelTable<'a> {
    kernel: Kernel,
    x: &'a [Vec<f64>],
    dense: Option<Vec<f64>>,
}

impl<'a> KernelTable<'a> {
    fn new(kernel: Kernel, x: &'a [Vec<f64>]) -> Self {
        let n = x.len();
        let dense = (n <= DENSE_LIMIT).then(|| {
            let mut m = alloc::vec![0.0; n * n];
            for i in 0..n {
                for j in i..n {
                    let v = kernel.eval(&x[i], &x[j]);
                    m[i * n + j] = v;
                    m[j * n + i] = v;
                }
            }
            m
        });
        KernelTable { kernel, x, dense }
    }

    fn get(&self, i: usize, j: usize) -> f64 {
        match &self.dense {
            Some(m) => m[i * self.x.len() + j],
            None => self.kernel.eval(&self.x[i], &self.x[j]),
        }
    }
}

pub(crate) fn fit(
    x: &[Vec<f64>],
    y: &[u8],
    params: &ParamMap,
    seed: u64,
) -> Result<SvmModel, LearnError> {
    let n = x.len();
    let d = x[0].len();
    let c = param_f64(params, "c", 1.0)?;
    let tol = param_f64(params, "tol", 1e-3)?;
    let max_passes = param_usize(params, "max_passes", 5)?.max(1);
    let kernel = match param_text(params, "kernel", "linear")? {
        "linear" => Kernel::Linear,
        "rbf" => Kernel::Rbf { gamma: param_f64(params, "gamma", 1.0 / d as f64)? },
        other => {
            return Err(LearnError::InvalidParameter {
                name: "kernel".into(),
                reason: alloc::format!("expected \"linear\" or \"rbf\", got \"{other}\""),
            })
        }
    };

    let pos = y.iter().filter(|&&l| l == 1).count();
    if pos == 0 {
        return Err(LearnError::EmptyClass { label: 1 });
    }
    if pos == n {
        return Err(LearnError::EmptyClass { label: 0 });
    }
    let t: Vec<f64> = y.iter().map(|&l| if l == 1 { 1.0 } else { -1.0 }).collect();

    let k = KernelTable::new(kernel, x);
    let mut alphas = alloc::vec![0.0f64; n];
    let mut b = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // f(x_q) - b over the current (sparse) multipliers.
    let margin = |alphas: &[f64], q: usize| -> f64 {
        let mut s = 0.0;
        for (j, &a) in alphas.iter().enumerate() {
            if a > 0.0 {
                s += a * t[j] * k.get(j, q);
            }
        }
        s
    };

    let mut quiet_passes = 0;
    let mut sweeps = 0;
    // The quiet-pass rule is the termination criterion; the sweep cap only
    // guards against degenerate non-convergence.
    while quiet_passes < max_passes && sweeps < 1000 {
        sweeps += 1;
        let mut changed = 0;
        for i in 0..n {
            let ei = margin(&alphas, i) + b - t[i];
            let violates =
                (t[i] * ei < -tol && alphas[i] < c) || (t[i] * ei > tol && alphas[i] > 0.0);
            if !violates {
                continue;
            }
            let mut j = rng.gen_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            let ej = margin(&alphas, j) + b - t[j];
            let (ai_old, aj_old) = (alphas[i], alphas[j]);
            let (lo, hi) = if t[i] != t[j] {
                ((aj_old - ai_old).max(0.0), (c + aj_old - ai_old).min(c))
            } else {
                ((ai_old + aj_old - c).max(0.0), (ai_old + aj_old).min(c))
            };
            if lo >= hi {
                continue;
            }
            let eta = 2.0 * k.get(i, j) - k.get(i, i) - k.get(j, j);
            if eta >= 0.0 {
                continue;
            }
            let aj = (aj_old - t[j] * (ei - ej) / eta).clamp(lo, hi);
            if (aj - aj_old).abs() < 1e-5 {
                continue;
            }
            let ai = ai_old + t[i] * t[j] * (aj_old - aj);
            let b1 = b - ei - t[i] * (ai - ai_old) * k.get(i, i) - t[j] * (aj - aj_old) * k.get(i, j);
            let b2 = b - ej - t[i] * (ai - ai_old) * k.get(i, j) - t[j] * (aj - aj_old) * k.get(j, j);
            alphas[i] = ai;
            alphas[j] = aj;
            b = if ai > 0.0 && ai < c {
                b1
            } else if aj > 0.0 && aj < c {
                b2
            } else {
                (b1 + b2) / 2.0
            };
            changed += 1;
        }
        if changed == 0 {
            quiet_passes += 1;
        } else {
            quiet_passes = 0;
        }
    }

    let mut support = Vec::new();
    let mut coeffs = Vec::new();
    for (i, &a) in alphas.iter().enumerate() {
        if a > 1e-12 {
            support.push(x[i].clone());
            coeffs.push(a * t[i]);
        }
    }
    Ok(SvmModel { kernel, support, coeffs, bias: b })
}
