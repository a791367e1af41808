//! Evaluation statistics: confusion matrices, IR measures, McNemar's test,
//! cross-validation, and the grid-search driver.
//!
//! Conventions throughout: the positive class is label 1, undefined precision
//! stays `None` (reports print it as "n/a", never as 0), and an F-measure is
//! only defined when precision is. McNemar's p-value comes from the
//! chi-square(1) survival function computed via the regularized incomplete
//! gamma function, a deliberately separate route from the closed-form
//! `erfc(sqrt(s/2))` identity that the tests check it against.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::dataset::{
    folds, resample, split, Dataset, DatasetError, FeatureSelection, ResamplePlan, SplitSpec,
};
use crate::fmath;
use crate::learn::{train, Algorithm, HyperGrid, LearnError, ParamMap, ParamValue, TrainSet};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("sequence lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error(transparent)]
    Data(#[from] DatasetError),
    #[error(transparent)]
    Learn(#[from] LearnError),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub true_pos: u64,
    pub true_neg: u64,
    pub false_pos: u64,
    pub false_neg: u64,
}

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.true_pos + self.true_neg + self.false_pos + self.false_neg
    }

    fn absorb(&mut self, other: &ConfusionMatrix) {
        self.true_pos += other.true_pos;
        self.true_neg += other.true_neg;
        self.false_pos += other.false_pos;
        self.false_neg += other.false_neg;
    }
}

/// Counts with positive class = 1; any other label value is negative.
pub fn confusion(truth: &[u8], preds: &[u8]) -> Result<ConfusionMatrix, EvalError> {
    if truth.len() != preds.len() {
        return Err(EvalError::LengthMismatch { left: truth.len(), right: preds.len() });
    }
    let mut cm = ConfusionMatrix::default();
    for (&t, &p) in truth.iter().zip(preds) {
        match (t == 1, p == 1) {
            (true, true) => cm.true_pos += 1,
            (false, false) => cm.true_neg += 1,
            (false, true) => cm.false_pos += 1,
            (true, false) => cm.false_neg += 1,
        }
    }
    Ok(cm)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IRMetrics {
    pub accuracy: f64,
    pub precision: Option<f64>,
    pub recall: f64,
    pub f_measure: Option<f64>,
}

/// Standard formulas: accuracy = (TP+TN)/total, precision = TP/(TP+FP)
/// (undefined when nothing was predicted positive), recall = TP/(TP+FN)
/// (0 when the truth has no positives), F = 2PR/(P+R) with 0 at P+R = 0.
/// An empty matrix reads as all-zero measures.
pub fn ir_measures(cm: &ConfusionMatrix) -> IRMetrics {
    let total = cm.total();
    let tp = cm.true_pos as f64;
    let accuracy =
        if total == 0 { 0.0 } else { (cm.true_pos + cm.true_neg) as f64 / total as f64 };
    let precision =
        (cm.true_pos + cm.false_pos > 0).then(|| tp / (cm.true_pos + cm.false_pos) as f64);
    let recall = if cm.true_pos + cm.false_neg == 0 {
        0.0
    } else {
        tp / (cm.true_pos + cm.false_neg) as f64
    };
    let f_measure = precision.map(|p| {
        if p + recall == 0.0 {
            0.0
        } else {
            2.0 * p * recall / (p + recall)
        }
    });
    IRMetrics { accuracy, precision, recall, f_measure }
}

/// Paired-prediction disagreement table. Index 0 means correct, 1 wrong:
/// `cells[0][0]` both correct, `cells[0][1]` A correct / B wrong,
/// `cells[1][0]` A wrong / B correct, `cells[1][1]` both wrong.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContingencyTable {
    pub cells: [[u64; 2]; 2],
}

pub fn build_contingency(
    truth: &[u8],
    preds_a: &[u8],
    preds_b: &[u8],
) -> Result<ContingencyTable, EvalError> {
    if truth.len() != preds_a.len() {
        return Err(EvalError::LengthMismatch { left: truth.len(), right: preds_a.len() });
    }
    if truth.len() != preds_b.len() {
        return Err(EvalError::LengthMismatch { left: truth.len(), right: preds_b.len() });
    }
    let mut table = ContingencyTable::default();
    for ((&t, &a), &b) in truth.iter().zip(preds_a).zip(preds_b) {
        table.cells[usize::from(a != t)][usize::from(b != t)] += 1;
    }
    Ok(table)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McNemarResult {
    pub statistic: f64,
    pub p_value: f64,
    pub alpha: f64,
    pub rejected: bool,
}

impl McNemarResult {
    pub fn decision_label(&self) -> &'static str {
        if self.rejected {
            "rejected"
        } else {
            "accepted"
        }
    }
}

fn mcnemar_statistic(table: &ContingencyTable) -> (u64, u64, f64) {
    let d01 = table.cells[0][1];
    let d10 = table.cells[1][0];
    let n = d01 + d10;
    let statistic = if n == 0 {
        0.0
    } else {
        let diff = d01 as f64 - d10 as f64;
        diff * diff / n as f64
    };
    (d01, d10, statistic)
}

/// McNemar's test: statistic (ct01 - ct10)^2 / (ct01 + ct10), p-value from
/// the chi-square(1) survival function, no continuity correction. Zero
/// disagreement degenerates to statistic 0, p = 1. The null hypothesis is
/// rejected iff p <= alpha.
pub fn mcnemar(table: &ContingencyTable, alpha: f64) -> McNemarResult {
    let (_, _, statistic) = mcnemar_statistic(table);
    let p_value = if statistic == 0.0 { 1.0 } else { chi2_survival_1df(statistic) };
    McNemarResult { statistic, p_value, alpha, rejected: p_value <= alpha }
}

/// Exact-binomial variant: same statistic, but the p-value is the two-sided
/// binomial tail 2 * P(X <= min(ct01, ct10)) for X ~ Bin(ct01 + ct10, 1/2),
/// capped at 1. Preferable when disagreement counts are small.
pub fn mcnemar_exact(table: &ContingencyTable, alpha: f64) -> McNemarResult {
    let (d01, d10, statistic) = mcnemar_statistic(table);
    let n = d01 + d10;
    let p_value = if n == 0 {
        1.0
    } else {
        let ln_half_n = -(n as f64) * core::f64::consts::LN_2;
        let tail: f64 =
            (0..=d01.min(d10)).map(|k| fmath::exp(ln_choose(n, k) + ln_half_n)).sum();
        (2.0 * tail).min(1.0)
    };
    McNemarResult { statistic, p_value, alpha, rejected: p_value <= alpha }
}

fn ln_choose(n: u64, k: u64) -> f64 {
    fmath::ln_gamma(n as f64 + 1.0)
        - fmath::ln_gamma(k as f64 + 1.0)
        - fmath::ln_gamma((n - k) as f64 + 1.0)
}

/// Survival function of the chi-square distribution with one degree of
/// freedom, i.e. the regularized upper incomplete gamma Q(1/2, x/2).
pub fn chi2_survival_1df(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    gamma_q(0.5, x / 2.0)
}

// Regularized incomplete gamma by the classic split: series for the lower
// function when x < a + 1, Lentz continued fraction for the upper otherwise.

fn gamma_q(a: f64, x: f64) -> f64 {
    if x < a + 1.0 {
        1.0 - gamma_p_series(a, x)
    } else {
        gamma_q_continued_fraction(a, x)
    }
}

fn gamma_norm(a: f64, x: f64) -> f64 {
    fmath::exp(-x + a * fmath::ln(x) - fmath::ln_gamma(a))
}

fn gamma_p_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut term = 1.0 / a;
    let mut sum = term;
    for _ in 0..500 {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * 1e-17 {
            break;
        }
    }
    sum * gamma_norm(a, x)
}

fn gamma_q_continued_fraction(a: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..500 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < 1e-17 {
            break;
        }
    }
    gamma_norm(a, x) * h
}

/// What the grid search optimizes; ties break on the other measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    FMeasure,
    Precision,
}

impl Objective {
    pub fn parse(s: &str) -> Option<Objective> {
        match s {
            "f_measure" | "f" => Some(Objective::FMeasure),
            "precision" => Some(Objective::Precision),
            _ => None,
        }
    }
}

/// How each configuration is scored: on the dev partition of a single
/// train/dev/test split, or as the pooled result over k folds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchScoring {
    DevSplit,
    CrossValidation,
}

/// One train/evaluate pairing, with features already selected and resampled.
/// Dev-split scoring yields a single unit; k-fold scoring yields k.
pub struct SearchUnit {
    train_x: Vec<Vec<f64>>,
    train_y: Vec<u8>,
    dev: Option<(Vec<Vec<f64>>, Vec<u8>)>,
    eval_x: Vec<Vec<f64>>,
    eval_y: Vec<u8>,
}

fn unit_from(
    algorithm: Algorithm,
    train_ds: &Dataset,
    eval_ds: &Dataset,
    selection: FeatureSelection,
    spec: &SplitSpec,
    plan: &ResamplePlan,
    unit_seed: u64,
) -> Result<SearchUnit, EvalError> {
    // Validated training carves its own dev subset out of the training data;
    // everything else trains on all of it. Resampling applies to whatever is
    // actually trained on, never to dev or eval rows.
    let (fit_ds, dev) = if algorithm == Algorithm::Cdnn {
        let inner = SplitSpec { train: 0.9, dev: 0.1, test: 0.0, k: spec.k, seed: spec.seed };
        let (inner_train, inner_dev, _) = split(train_ds, &inner)?;
        (inner_train, Some((inner_dev.features(selection), inner_dev.labels())))
    } else {
        (train_ds.clone(), None)
    };
    let fit_ds = resample(&fit_ds, plan, unit_seed)?;
    Ok(SearchUnit {
        train_x: fit_ds.features(selection),
        train_y: fit_ds.labels(),
        dev,
        eval_x: eval_ds.features(selection),
        eval_y: eval_ds.labels(),
    })
}

/// Builds the train/evaluate pairings a sweep will reuse for every
/// configuration. Resampling draws from `spec.seed` plus the fold index so
/// folds do not share a sampling pattern.
pub fn build_search_units(
    algorithm: Algorithm,
    data: &Dataset,
    selection: FeatureSelection,
    spec: &SplitSpec,
    plan: &ResamplePlan,
    scoring: SearchScoring,
) -> Result<Vec<SearchUnit>, EvalError> {
    spec.validate()?;
    match scoring {
        SearchScoring::DevSplit => {
            let (train_ds, dev_ds, _test) = split(data, spec)?;
            let mut unit =
                unit_from(algorithm, &train_ds, &dev_ds, selection, spec, plan, spec.seed)?;
            // The dev partition doubles as the validation set here; carving a
            // second one out of train would shrink it for no benefit.
            if algorithm == Algorithm::Cdnn {
                unit.dev = Some((unit.eval_x.clone(), unit.eval_y.clone()));
                let resampled = resample(&train_ds, plan, spec.seed)?;
                unit.train_x = resampled.features(selection);
                unit.train_y = resampled.labels();
            }
            Ok(alloc::vec![unit])
        }
        SearchScoring::CrossValidation => {
            let parts = folds(data, spec.k, spec.seed)?;
            let mut units = Vec::with_capacity(parts.len());
            for held_out in 0..parts.len() {
                let mut train_idx: Vec<usize> = Vec::new();
                for (i, part) in parts.iter().enumerate() {
                    if i != held_out {
                        train_idx.extend_from_slice(part);
                    }
                }
                train_idx.sort_unstable();
                let train_ds = data.subset(&train_idx);
                let eval_ds = data.subset(&parts[held_out]);
                units.push(unit_from(
                    algorithm,
                    &train_ds,
                    &eval_ds,
                    selection,
                    spec,
                    plan,
                    spec.seed.wrapping_add(held_out as u64),
                )?);
            }
            Ok(units)
        }
    }
}

/// Result of one configuration in a sweep. Failed trainings keep their error
/// here instead of aborting the sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct GridOutcome {
    pub params: ParamMap,
    pub confusion: Option<ConfusionMatrix>,
    pub metrics: Option<IRMetrics>,
    pub error: Option<LearnError>,
}

/// Trains one configuration on every unit and pools the confusion matrices.
/// Pure; safe to run across configurations in parallel.
pub fn evaluate_config(
    algorithm: Algorithm,
    params: &ParamMap,
    units: &[SearchUnit],
    seed: u64,
) -> GridOutcome {
    let mut pooled = ConfusionMatrix::default();
    for unit in units {
        let dev =
            unit.dev.as_ref().map(|(x, y)| TrainSet { features: x, labels: y });
        let fitted = train(
            algorithm,
            params,
            TrainSet { features: &unit.train_x, labels: &unit.train_y },
            dev,
            seed,
        );
        let preds = match fitted.and_then(|m| m.predict(&unit.eval_x)) {
            Ok(p) => p,
            Err(e) => {
                return GridOutcome {
                    params: params.clone(),
                    confusion: None,
                    metrics: None,
                    error: Some(e),
                }
            }
        };
        let cm = confusion(&unit.eval_y, &preds).expect("unit rows and labels are paired");
        pooled.absorb(&cm);
    }
    GridOutcome {
        params: params.clone(),
        confusion: Some(pooled),
        metrics: Some(ir_measures(&pooled)),
        error: None,
    }
}

/// Trains and scores every Cartesian combination of `grid`, ranked best
/// first by the objective measure, then the other IR measure, then
/// lexicographic configuration order; configurations that fail to train sort
/// last with their error recorded. Cross-validation scoring reports measures
/// over the pooled k-fold confusion matrix.
pub fn grid_search(
    algorithm: Algorithm,
    grid: &HyperGrid,
    data: &Dataset,
    selection: FeatureSelection,
    spec: &SplitSpec,
    plan: &ResamplePlan,
    objective: Objective,
    scoring: SearchScoring,
) -> Result<Vec<GridOutcome>, EvalError> {
    grid.validate(algorithm)?;
    let units = build_search_units(algorithm, data, selection, spec, plan, scoring)?;
    let mut outcomes: Vec<GridOutcome> = grid
        .cartesian()
        .iter()
        .map(|params| evaluate_config(algorithm, params, &units, spec.seed))
        .collect();
    rank_outcomes(&mut outcomes, objective);
    Ok(outcomes)
}

fn measure_pair(outcome: &GridOutcome, objective: Objective) -> (Option<f64>, Option<f64>) {
    let Some(m) = &outcome.metrics else {
        return (None, None);
    };
    match objective {
        Objective::FMeasure => (m.f_measure, m.precision),
        Objective::Precision => (m.precision, m.f_measure),
    }
}

fn cmp_desc(a: Option<f64>, b: Option<f64>) -> core::cmp::Ordering {
    match (a, b) {
        (Some(x), Some(y)) => y.partial_cmp(&x).unwrap_or(core::cmp::Ordering::Equal),
        (Some(_), None) => core::cmp::Ordering::Less,
        (None, Some(_)) => core::cmp::Ordering::Greater,
        (None, None) => core::cmp::Ordering::Equal,
    }
}

fn value_rank(v: &ParamValue) -> u8 {
    match v {
        ParamValue::Bool(_) => 0,
        ParamValue::Int(_) => 1,
        ParamValue::Float(_) => 2,
        ParamValue::Text(_) => 3,
        ParamValue::IntList(_) => 4,
    }
}

fn cmp_value(a: &ParamValue, b: &ParamValue) -> core::cmp::Ordering {
    match (a, b) {
        (ParamValue::Bool(x), ParamValue::Bool(y)) => x.cmp(y),
        (ParamValue::Int(x), ParamValue::Int(y)) => x.cmp(y),
        (ParamValue::Float(x), ParamValue::Float(y)) => {
            x.partial_cmp(y).unwrap_or(core::cmp::Ordering::Equal)
        }
        (ParamValue::Text(x), ParamValue::Text(y)) => x.cmp(y),
        (ParamValue::IntList(x), ParamValue::IntList(y)) => x.cmp(y),
        _ => value_rank(a).cmp(&value_rank(b)),
    }
}

fn cmp_params(a: &ParamMap, b: &ParamMap) -> core::cmp::Ordering {
    let mut ib = b.iter();
    for (ka, va) in a {
        let Some((kb, vb)) = ib.next() else {
            return core::cmp::Ordering::Greater;
        };
        let by_entry = ka.cmp(kb).then_with(|| cmp_value(va, vb));
        if by_entry != core::cmp::Ordering::Equal {
            return by_entry;
        }
    }
    if ib.next().is_some() {
        core::cmp::Ordering::Less
    } else {
        core::cmp::Ordering::Equal
    }
}

/// Sorts sweep results into their final reported order; see [`grid_search`].
pub fn rank_outcomes(outcomes: &mut [GridOutcome], objective: Objective) {
    outcomes.sort_by(|a, b| {
        let (obj_a, tie_a) = measure_pair(a, objective);
        let (obj_b, tie_b) = measure_pair(b, objective);
        cmp_desc(obj_a, obj_b)
            .then_with(|| cmp_desc(tie_a, tie_b))
            .then_with(|| cmp_params(&a.params, &b.params))
    });
}

/// Convenience wrapper: k-fold cross-validation of a single configuration,
/// reporting the pooled confusion matrix and its measures.
pub fn cross_validate(
    algorithm: Algorithm,
    params: &ParamMap,
    data: &Dataset,
    selection: FeatureSelection,
    spec: &SplitSpec,
    plan: &ResamplePlan,
) -> Result<(ConfusionMatrix, IRMetrics), EvalError> {
    let units = build_search_units(
        algorithm,
        data,
        selection,
        spec,
        plan,
        SearchScoring::CrossValidation,
    )?;
    let outcome = evaluate_config(algorithm, params, &units, spec.seed);
    if let Some(e) = outcome.error {
        return Err(e.into());
    }
    Ok((
        outcome.confusion.expect("no error means pooled matrix"),
        outcome.metrics.expect("no error means measures"),
    ))
}

/// Formats a proportion as a percentage with one decimal, the table
/// convention all reports use; `None` prints as "n/a".
pub fn percent(value: Option<f64>) -> String {
    match value {
        Some(v) => alloc::format!("{:.1}", v * 100.0),
        None => String::from("n/a"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::testutil;
    use crate::learn::ParamValue;

    fn cm(tp: u64, tn: u64, fp: u64, fneg: u64) -> ConfusionMatrix {
        ConfusionMatrix { true_pos: tp, true_neg: tn, false_pos: fp, false_neg: fneg }
    }

    #[test]
    fn test_confusion_counts() {
        let truth = [1, 1, 0, 0, 1, 0];
        let preds = [1, 0, 0, 1, 1, 0];
        let got = confusion(&truth, &preds).unwrap();
        assert_eq!(got, cm(2, 2, 1, 1));
        assert_eq!(got.total(), 6);
    }

    #[test]
    fn test_length_mismatch() {
        assert_eq!(
            confusion(&[1, 0], &[1]).unwrap_err(),
            EvalError::LengthMismatch { left: 2, right: 1 }
        );
    }

    #[test]
    fn test_published_rfc_row() {
        // Published reference values: 699/7054/24/261 reads 96.5 / 96.7 /
        // 72.8 / 83.1 as percentages.
        let m = ir_measures(&cm(699, 7054, 24, 261));
        assert!((m.accuracy * 100.0 - 96.5).abs() < 0.05);
        assert!((m.precision.unwrap() * 100.0 - 96.7).abs() < 0.05);
        assert!((m.recall * 100.0 - 72.8).abs() < 0.05);
        assert!((m.f_measure.unwrap() * 100.0 - 83.1).abs() < 0.05);
    }

    #[test]
    fn test_published_best_f_row() {
        let m = ir_measures(&cm(730, 7046, 32, 230));
        assert!((m.precision.unwrap() * 100.0 - 95.8).abs() < 0.05);
        assert!((m.recall * 100.0 - 76.0).abs() < 0.05);
        assert!((m.f_measure.unwrap() * 100.0 - 84.8).abs() < 0.05);
    }

    #[test]
    fn test_all_negative_predictor() {
        let truth = [1, 0, 1, 0];
        let preds = [0, 0, 0, 0];
        let m = ir_measures(&confusion(&truth, &preds).unwrap());
        assert_eq!(m.precision, None);
        assert_eq!(m.recall, 0.0);
        assert_eq!(m.f_measure, None);
        assert_eq!(m.accuracy, 0.5);
        assert_eq!(percent(m.precision), "n/a");
    }

    #[test]
    fn test_f_between_precision_and_recall() {
        for tp in [1u64, 5, 40] {
            for fp in [0u64, 3, 17] {
                for fneg in [0u64, 2, 29] {
                    let m = ir_measures(&cm(tp, 50, fp, fneg));
                    let p = m.precision.unwrap();
                    let f = m.f_measure.unwrap();
                    assert!(f >= p.min(m.recall) - 1e-12 && f <= p.max(m.recall) + 1e-12);
                }
            }
        }
    }

    #[test]
    fn test_percent_formatting() {
        assert_eq!(percent(Some(0.96454)), "96.5");
        assert_eq!(percent(Some(1.0)), "100.0");
        assert_eq!(percent(None), "n/a");
    }

    #[test]
    fn test_contingency_cells() {
        let truth = [1, 1, 0, 0, 1, 0];
        let a = [1, 1, 0, 1, 0, 0]; // right right right wrong wrong right
        let b = [1, 0, 1, 1, 0, 0]; // right wrong wrong wrong wrong right
        let t = build_contingency(&truth, &a, &b).unwrap();
        // Brute-walk of the six samples: (ok,ok) (ok,bad) (ok,bad) (bad,bad)
        // (bad,bad) (ok,ok).
        assert_eq!(t.cells, [[2, 2], [0, 2]]);
    }

    #[test]
    fn test_contingency_identical_predictions() {
        let truth = [1, 0, 1];
        let a = [1, 1, 0];
        let t = build_contingency(&truth, &a, &a).unwrap();
        assert_eq!(t.cells[0][1], 0);
        assert_eq!(t.cells[1][0], 0);
    }

    #[test]
    fn test_contingency_a_always_right() {
        let truth = [1, 0, 1, 0];
        let a = [1, 0, 1, 0];
        let b = [0, 1, 0, 1];
        let t = build_contingency(&truth, &a, &b).unwrap();
        assert_eq!(t.cells, [[0, 4], [0, 0]]);
    }

    #[test]
    fn test_mcnemar_symmetric_disagreement() {
        let t = ContingencyTable { cells: [[10, 5], [5, 10]] };
        let r = mcnemar(&t, 0.05);
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
        assert!(!r.rejected);
        assert_eq!(r.decision_label(), "accepted");
    }

    #[test]
    fn test_mcnemar_no_disagreement() {
        let t = ContingencyTable { cells: [[30, 0], [0, 2]] };
        let r = mcnemar(&t, 0.05);
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
        assert!(!r.rejected);
    }

    #[test]
    fn test_mcnemar_ten_vs_zero() {
        let t = ContingencyTable { cells: [[100, 10], [0, 5]] };
        let r = mcnemar(&t, 0.05);
        assert_eq!(r.statistic, 10.0);
        assert!((r.p_value - 0.001565).abs() < 1e-5, "p = {}", r.p_value);
        assert!(r.rejected);
    }

    #[test]
    fn test_mcnemar_eighteen_vs_zero() {
        let t = ContingencyTable { cells: [[0, 18], [0, 0]] };
        let r = mcnemar(&t, 0.05);
        assert_eq!(r.statistic, 18.0);
        assert!(r.p_value < 0.05);
        assert!(r.rejected);
    }

    #[test]
    fn test_mcnemar_swap_invariant() {
        let t = ContingencyTable { cells: [[7, 12], [3, 9]] };
        let swapped = ContingencyTable { cells: [[7, 3], [12, 9]] };
        let a = mcnemar(&t, 0.05);
        let b = mcnemar(&swapped, 0.05);
        assert_eq!(a.statistic, b.statistic);
        assert_eq!(a.p_value, b.p_value);
    }

    #[test]
    fn test_chi2_survival_matches_erfc_identity() {
        for s in [0.01, 0.3, 1.0, 2.0, 3.84, 5.0, 10.0, 18.0, 50.0] {
            let via_gamma = chi2_survival_1df(s);
            let via_erfc = fmath::erfc(fmath::sqrt(s / 2.0));
            assert!(
                (via_gamma - via_erfc).abs() < 1e-10,
                "s={s}: {via_gamma} vs {via_erfc}"
            );
        }
    }

    #[test]
    fn test_mcnemar_exact_small_counts() {
        let t = ContingencyTable { cells: [[100, 10], [0, 5]] };
        let r = mcnemar_exact(&t, 0.05);
        assert_eq!(r.statistic, 10.0);
        // 2 * (1/2)^10 exactly.
        assert!((r.p_value - 0.001953125).abs() < 1e-12);
        assert!(r.rejected);
    }

    #[test]
    fn test_mcnemar_exact_balanced_caps_at_one() {
        let t = ContingencyTable { cells: [[0, 5], [5, 0]] };
        let r = mcnemar_exact(&t, 0.05);
        assert_eq!(r.p_value, 1.0);
        assert!(!r.rejected);
    }

    fn knn_grid(ks: &[i64]) -> HyperGrid {
        let mut grid = HyperGrid::default();
        grid.0.insert(
            "k".into(),
            ks.iter().map(|&k| ParamValue::Int(k)).collect(),
        );
        grid
    }

    #[test]
    fn test_grid_search_evaluates_every_combination() {
        let data = testutil::dataset(20, 20);
        let mut grid = HyperGrid::default();
        grid.0.insert(
            "max_depth".into(),
            alloc::vec![ParamValue::Int(2), ParamValue::Int(4)],
        );
        grid.0.insert(
            "min_samples_split".into(),
            alloc::vec![ParamValue::Int(2), ParamValue::Int(4)],
        );
        let out = grid_search(
            Algorithm::Dt,
            &grid,
            &data,
            FeatureSelection::StaticOnly,
            &SplitSpec::standard(5),
            &ResamplePlan::none(),
            Objective::FMeasure,
            SearchScoring::DevSplit,
        )
        .unwrap();
        assert_eq!(out.len(), 4);
        assert!(out.iter().all(|o| o.error.is_none()));
        // The marker feature separates the classes perfectly at any depth.
        assert_eq!(out[0].metrics.unwrap().f_measure, Some(1.0));
    }

    #[test]
    fn test_grid_search_single_point() {
        let data = testutil::dataset(15, 15);
        let out = grid_search(
            Algorithm::Knn,
            &knn_grid(&[1]),
            &data,
            FeatureSelection::StaticOnly,
            &SplitSpec::standard(3),
            &ResamplePlan::none(),
            Objective::Precision,
            SearchScoring::CrossValidation,
        )
        .unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].params["k"], ParamValue::Int(1));
        assert_eq!(out[0].metrics.unwrap().accuracy, 1.0);
    }

    #[test]
    fn test_grid_search_rejects_unknown_name() {
        let data = testutil::dataset(5, 5);
        let mut grid = HyperGrid::default();
        grid.0.insert("wat".into(), alloc::vec![ParamValue::Int(1)]);
        let err = grid_search(
            Algorithm::Knn,
            &grid,
            &data,
            FeatureSelection::StaticOnly,
            &SplitSpec::standard(0),
            &ResamplePlan::none(),
            Objective::FMeasure,
            SearchScoring::DevSplit,
        )
        .unwrap_err();
        assert!(matches!(err, EvalError::Learn(LearnError::UnknownParameter { .. })));
    }

    #[test]
    fn test_per_config_errors_recorded_not_fatal() {
        // k = 0 is invalid for KNN; the sweep must keep going and rank the
        // failing config last.
        let data = testutil::dataset(12, 12);
        let out = grid_search(
            Algorithm::Knn,
            &knn_grid(&[0, 1]),
            &data,
            FeatureSelection::StaticOnly,
            &SplitSpec::standard(2),
            &ResamplePlan::none(),
            Objective::FMeasure,
            SearchScoring::DevSplit,
        )
        .unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(out[0].params["k"], ParamValue::Int(1));
        assert!(out[0].error.is_none());
        assert_eq!(out[1].params["k"], ParamValue::Int(0));
        assert!(matches!(out[1].error, Some(LearnError::InvalidParameter { .. })));
        assert_eq!(out[1].metrics, None);
    }

    #[test]
    fn test_rank_ties_break_on_other_measure_then_config() {
        let mk = |k: i64, tp: u64, fp: u64| {
            let mut params = ParamMap::new();
            params.insert("k".into(), ParamValue::Int(k));
            let matrix = cm(tp, 50, fp, 10);
            GridOutcome {
                params,
                confusion: Some(matrix),
                metrics: Some(ir_measures(&matrix)),
                error: None,
            }
        };
        // Same F by construction is hard; instead craft equal objective via
        // identical matrices, distinct configs: order must fall back to the
        // lexicographically smaller config.
        let mut outcomes = alloc::vec![mk(9, 40, 2), mk(3, 40, 2), mk(1, 45, 1)];
        rank_outcomes(&mut outcomes, Objective::FMeasure);
        assert_eq!(outcomes[0].params["k"], ParamValue::Int(1));
        assert_eq!(outcomes[1].params["k"], ParamValue::Int(3));
        assert_eq!(outcomes[2].params["k"], ParamValue::Int(9));
    }

    #[test]
    fn test_objective_changes_winner() {
        let mk = |k: i64, tp: u64, fp: u64, fneg: u64| {
            let mut params = ParamMap::new();
            params.insert("k".into(), ParamValue::Int(k));
            let matrix = cm(tp, 50, fp, fneg);
            GridOutcome {
                params,
                confusion: Some(matrix),
                metrics: Some(ir_measures(&matrix)),
                error: None,
            }
        };
        // Config 1: precision 1.0, low recall. Config 2: better F, worse
        // precision.
        let a = mk(1, 10, 0, 30);
        let b = mk(3, 35, 10, 5);
        let mut by_f = alloc::vec![a.clone(), b.clone()];
        rank_outcomes(&mut by_f, Objective::FMeasure);
        assert_eq!(by_f[0].params["k"], ParamValue::Int(3));
        let mut by_p = alloc::vec![a, b];
        rank_outcomes(&mut by_p, Objective::Precision);
        assert_eq!(by_p[0].params["k"], ParamValue::Int(1));
    }

    #[test]
    fn test_cross_validate_pools_all_samples() {
        let data = testutil::dataset(20, 30);
        let spec = SplitSpec::standard(7);
        let (pooled, m) = cross_validate(
            Algorithm::Dt,
            &ParamMap::new(),
            &data,
            FeatureSelection::StaticOnly,
            &spec,
            &ResamplePlan::none(),
        )
        .unwrap();
        // Every sample lands in exactly one held-out fold.
        assert_eq!(pooled.total(), 50);
        assert_eq!(m.accuracy, 1.0);
    }

    #[test]
    fn test_objective_parse() {
        assert_eq!(Objective::parse("f_measure"), Some(Objective::FMeasure));
        assert_eq!(Objective::parse("precision"), Some(Objective::Precision));
        assert_eq!(Objective::parse("auc"), None);
    }
}
