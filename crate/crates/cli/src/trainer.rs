//! `train` and `evaluate`: hyperparameter sweeps and held-out-test scoring.
//!
//! A sweep scores every Cartesian combination of the grid file, in parallel
//! across configurations, and writes the ranked table plus the winning
//! configuration. Evaluation trains one configuration on the training
//! partition and scores the untouched test partition, emitting the
//! prediction and truth vectors other runs can be compared against.

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use vulnjs_core::dataset::{
    resample, split, FeatureSelection, ResamplePlan, SplitSpec,
};
use vulnjs_core::eval::{
    build_search_units, confusion, evaluate_config, ir_measures, percent, rank_outcomes,
    GridOutcome, Objective, SearchScoring,
};
use vulnjs_core::learn::{train, Algorithm, HyperGrid, LearnError, ParamMap, TrainSet};

use crate::config::{self, AppConfig};
use crate::csvio;
use crate::errors::{Failure, Result};

pub const RESULTS_NAME: &str = "results.csv";
pub const BEST_NAME: &str = "best.toml";
pub const PREDICTIONS_NAME: &str = "predictions.csv";
pub const TRUTH_NAME: &str = "truth.csv";
pub const EVALUATION_NAME: &str = "evaluation.csv";

/// Parameter errors are configuration mistakes; everything else the learner
/// reports is a data problem.
fn learn_failure(e: LearnError) -> Failure {
    match e {
        LearnError::UnknownParameter { .. }
        | LearnError::InvalidParameter { .. }
        | LearnError::MissingDevSet { .. } => Failure::config(e.to_string()),
        _ => Failure::data(e.to_string()),
    }
}

pub fn parse_algorithm(id: &str) -> Result<Algorithm> {
    Algorithm::parse(id).ok_or_else(|| {
        let ids: Vec<&str> = Algorithm::ALL.iter().map(|a| a.id()).collect();
        Failure::usage(format!(
            "unknown algorithm `{id}`; expected one of {}",
            ids.join(", ")
        ))
    })
}

/// The winning configuration of a sweep, written as `best.toml` and read
/// back by `evaluate`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelChoice {
    pub algorithm: String,
    pub seed: u64,
    pub params: ParamMap,
}

fn params_json(params: &ParamMap) -> String {
    serde_json::to_string(params).expect("params serialize")
}

fn write_results_csv(
    path: &Path,
    algorithm: Algorithm,
    outcomes: &[GridOutcome],
) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .from_path(path)
        .map_err(|e| Failure::io_ctx(path.display(), e))?;
    w.write_record([
        "rank",
        "algorithm",
        "params",
        "tp",
        "tn",
        "fp",
        "fn",
        "accuracy",
        "precision",
        "recall",
        "f_measure",
        "error",
    ])
    .map_err(|e| Failure::io_ctx(path.display(), e))?;
    for (i, outcome) in outcomes.iter().enumerate() {
        let (counts, measures) = match (&outcome.confusion, &outcome.metrics) {
            (Some(cm), Some(m)) => (
                [
                    cm.true_pos.to_string(),
                    cm.true_neg.to_string(),
                    cm.false_pos.to_string(),
                    cm.false_neg.to_string(),
                ],
                [
                    percent(Some(m.accuracy)),
                    percent(m.precision),
                    percent(Some(m.recall)),
                    percent(m.f_measure),
                ],
            ),
            _ => (
                [String::new(), String::new(), String::new(), String::new()],
                [String::new(), String::new(), String::new(), String::new()],
            ),
        };
        let error = outcome.error.as_ref().map(|e| e.to_string()).unwrap_or_default();
        let mut record = vec![
            (i + 1).to_string(),
            algorithm.id().to_string(),
            params_json(&outcome.params),
        ];
        record.extend(counts);
        record.extend(measures);
        record.push(error);
        w.write_record(&record).map_err(|e| Failure::io_ctx(path.display(), e))?;
    }
    w.flush().map_err(|e| Failure::io_ctx(path.display(), e))
}

#[allow(clippy::too_many_arguments)]
pub fn run_train(
    data_path: &Path,
    algorithm: Algorithm,
    grid_path: &Path,
    selection: FeatureSelection,
    objective: Objective,
    scoring: SearchScoring,
    seed: u64,
    k: usize,
    plan: ResamplePlan,
    out_dir: &Path,
    cfg: &AppConfig,
    config_file: Option<&Path>,
) -> Result<()> {
    let dataset = csvio::read_dataset_csv(data_path)?;
    let grid_text = std::fs::read_to_string(grid_path)
        .map_err(|e| Failure::io_ctx(grid_path.display(), e))?;
    let grid: HyperGrid = toml::from_str(&grid_text)
        .map_err(|e| Failure::config(format!("{}: {e}", grid_path.display())))?;
    grid.validate(algorithm)
        .map_err(|e| Failure::config(format!("{}: {e}", grid_path.display())))?;

    let spec = SplitSpec { k, ..SplitSpec::standard(seed) };
    let units = build_search_units(algorithm, &dataset, selection, &spec, &plan, scoring)
        .map_err(|e| Failure::data(e.to_string()))?;

    let configs = grid.cartesian();
    // Units are shared read-only; each configuration trains independently.
    let mut outcomes: Vec<GridOutcome> = configs
        .par_iter()
        .map(|params| evaluate_config(algorithm, params, &units, spec.seed))
        .collect();
    rank_outcomes(&mut outcomes, objective);

    config::ensure_out_dir(out_dir)?;
    let results_path = out_dir.join(RESULTS_NAME);
    write_results_csv(&results_path, algorithm, &outcomes)?;

    let best = outcomes.iter().find(|o| o.error.is_none());
    match best {
        Some(outcome) => {
            let choice = ModelChoice {
                algorithm: algorithm.id().to_string(),
                seed,
                params: outcome.params.clone(),
            };
            let text = toml::to_string_pretty(&choice).expect("choice serializes");
            let best_path = out_dir.join(BEST_NAME);
            std::fs::write(&best_path, text)
                .map_err(|e| Failure::io_ctx(best_path.display(), e))?;
            let m = outcome.metrics.as_ref().expect("error-free outcome has measures");
            println!(
                "swept {} configurations; best {}: accuracy {} precision {} recall {} F {}",
                outcomes.len(),
                params_json(&outcome.params),
                percent(Some(m.accuracy)),
                percent(m.precision),
                percent(Some(m.recall)),
                percent(m.f_measure),
            );
        }
        None => {
            let first = outcomes.first().and_then(|o| o.error.as_ref());
            return Err(Failure::data(format!(
                "every configuration failed to train{}",
                first.map(|e| format!(": {e}")).unwrap_or_default()
            )));
        }
    }

    let mut args = BTreeMap::new();
    args.insert("data", data_path.display().to_string());
    args.insert("algo", algorithm.id().to_string());
    args.insert("grid", grid_path.display().to_string());
    args.insert("selection", format!("{selection:?}"));
    args.insert("objective", format!("{objective:?}"));
    args.insert("scoring", format!("{scoring:?}"));
    args.insert("seed", seed.to_string());
    args.insert("k", k.to_string());
    args.insert("resample", format!("{:?} ratio {} {:?}", plan.mode, plan.ratio, plan.basis));
    args.insert("out", out_dir.display().to_string());
    config::write_run_record(out_dir, "train", cfg, config_file, &args)?;

    println!("wrote {}", results_path.display());
    Ok(())
}

/// Reads a configuration file: either a full [`ModelChoice`] or a bare
/// parameter table combined with `--algo`.
fn read_choice(
    path: &Path,
    algo_override: Option<Algorithm>,
    seed_override: Option<u64>,
) -> Result<(Algorithm, ParamMap, u64)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::io_ctx(path.display(), e))?;
    if let Ok(choice) = toml::from_str::<ModelChoice>(&text) {
        let algorithm = match algo_override {
            Some(a) => a,
            None => parse_algorithm(&choice.algorithm)?,
        };
        return Ok((algorithm, choice.params, seed_override.unwrap_or(choice.seed)));
    }
    let params: ParamMap = toml::from_str(&text)
        .map_err(|e| Failure::config(format!("{}: {e}", path.display())))?;
    let algorithm = algo_override.ok_or_else(|| {
        Failure::usage(format!(
            "{} has no `algorithm` key; pass --algo",
            path.display()
        ))
    })?;
    Ok((algorithm, params, seed_override.unwrap_or(42)))
}

#[allow(clippy::too_many_arguments)]
pub fn run_evaluate(
    data_path: &Path,
    params_path: &Path,
    algo_override: Option<Algorithm>,
    selection: FeatureSelection,
    seed_override: Option<u64>,
    plan: ResamplePlan,
    out_dir: &Path,
    cfg: &AppConfig,
    config_file: Option<&Path>,
) -> Result<()> {
    let (algorithm, params, seed) = read_choice(params_path, algo_override, seed_override)?;
    let dataset = csvio::read_dataset_csv(data_path)?;

    let spec = SplitSpec::standard(seed);
    let (train_ds, dev_ds, test_ds) =
        split(&dataset, &spec).map_err(|e| Failure::data(e.to_string()))?;
    let fit_ds = resample(&train_ds, &plan, seed).map_err(|e| Failure::data(e.to_string()))?;

    let train_x = fit_ds.features(selection);
    let train_y = fit_ds.labels();
    let dev_x = dev_ds.features(selection);
    let dev_y = dev_ds.labels();
    let dev = (algorithm == Algorithm::Cdnn)
        .then_some(TrainSet { features: &dev_x, labels: &dev_y });

    let model = train(
        algorithm,
        &params,
        TrainSet { features: &train_x, labels: &train_y },
        dev,
        seed,
    )
    .map_err(learn_failure)?;

    let test_x = test_ds.features(selection);
    let truth = test_ds.labels();
    let preds = model.predict(&test_x).map_err(learn_failure)?;
    let cm = confusion(&truth, &preds).map_err(|e| Failure::data(e.to_string()))?;
    let measures = ir_measures(&cm);

    config::ensure_out_dir(out_dir)?;
    csvio::write_bit_column(&out_dir.join(PREDICTIONS_NAME), "pred", &preds)?;
    csvio::write_bit_column(&out_dir.join(TRUTH_NAME), "label", &truth)?;

    let eval_path = out_dir.join(EVALUATION_NAME);
    let mut w = csv::WriterBuilder::new()
        .from_path(&eval_path)
        .map_err(|e| Failure::io_ctx(eval_path.display(), e))?;
    w.write_record([
        "algorithm",
        "params",
        "tp",
        "tn",
        "fp",
        "fn",
        "accuracy",
        "precision",
        "recall",
        "f_measure",
    ])
    .map_err(|e| Failure::io_ctx(eval_path.display(), e))?;
    w.write_record([
        algorithm.id().to_string(),
        params_json(&params),
        cm.true_pos.to_string(),
        cm.true_neg.to_string(),
        cm.false_pos.to_string(),
        cm.false_neg.to_string(),
        percent(Some(measures.accuracy)),
        percent(measures.precision),
        percent(Some(measures.recall)),
        percent(measures.f_measure),
    ])
    .map_err(|e| Failure::io_ctx(eval_path.display(), e))?;
    w.flush().map_err(|e| Failure::io_ctx(eval_path.display(), e))?;

    let mut args = BTreeMap::new();
    args.insert("data", data_path.display().to_string());
    args.insert("params", params_path.display().to_string());
    args.insert("algo", algorithm.id().to_string());
    args.insert("selection", format!("{selection:?}"));
    args.insert("seed", seed.to_string());
    args.insert("resample", format!("{:?} ratio {} {:?}", plan.mode, plan.ratio, plan.basis));
    args.insert("out", out_dir.display().to_string());
    config::write_run_record(out_dir, "evaluate", cfg, config_file, &args)?;

    println!(
        "{} on {} test functions: TP {} TN {} FP {} FN {}; accuracy {} precision {} recall {} F {}",
        algorithm.id(),
        truth.len(),
        cm.true_pos,
        cm.true_neg,
        cm.false_pos,
        cm.false_neg,
        percent(Some(measures.accuracy)),
        percent(measures.precision),
        percent(Some(measures.recall)),
        percent(measures.f_measure),
    );
    println!("wrote {}", eval_path.display());
    Ok(())
}
