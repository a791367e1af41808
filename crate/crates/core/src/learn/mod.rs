//! The ten classifiers, implemented from scratch with seeded determinism.
//!
//! All models speak the same protocol: `train` validates the feature matrix,
//! standardizes it when the algorithm is distance- or gradient-based, fits,
//! and returns a self-contained [`TrainedModel`]; `predict` re-applies the
//! stored scaling and is pure. Identical (algorithm, hyperparameters, data,
//! seed) inputs produce bit-identical models and predictions regardless of
//! thread count, which is what makes grid sweeps auditable.
//!
//! Hyperparameters travel as a name -> value map so the grid-search driver
//! can enumerate Cartesian products without knowing algorithm internals;
//! unknown names are rejected up front rather than ignored.

mod forest;
mod knn;
mod linreg;
mod logreg;
mod naive_bayes;
mod nn;
mod scale;
mod svm;
mod tree;
mod zeror;

pub use forest::RandomForest;
pub use knn::KnnModel;
pub use linreg::LinRegModel;
pub use logreg::{logreg_gradient, logreg_loss, LogRegModel};
pub use naive_bayes::NbModel;
pub use nn::{NnModel, PolicyAction, ValidationPolicy};
pub use scale::Scaler;
pub use svm::{Kernel, SvmModel};
pub use tree::DecisionTree;
pub use zeror::ZeroRModel;

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Algorithm {
    Rfc,
    Dt,
    Knn,
    Svm,
    LinReg,
    LogReg,
    Nb,
    ZeroR,
    Sdnn,
    Cdnn,
}

impl Algorithm {
    pub const ALL: [Algorithm; 10] = [
        Algorithm::Rfc,
        Algorithm::Dt,
        Algorithm::Knn,
        Algorithm::Svm,
        Algorithm::LinReg,
        Algorithm::LogReg,
        Algorithm::Nb,
        Algorithm::ZeroR,
        Algorithm::Sdnn,
        Algorithm::Cdnn,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Algorithm::Rfc => "RFC",
            Algorithm::Dt => "DT",
            Algorithm::Knn => "KNN",
            Algorithm::Svm => "SVM",
            Algorithm::LinReg => "LinReg",
            Algorithm::LogReg => "LogReg",
            Algorithm::Nb => "NB",
            Algorithm::ZeroR => "ZeroR",
            Algorithm::Sdnn => "SDNN",
            Algorithm::Cdnn => "CDNN",
        }
    }

    pub fn parse(s: &str) -> Option<Algorithm> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.id().eq_ignore_ascii_case(s))
    }

    /// Whether features are z-scored from training statistics before fitting.
    /// Trees and the probabilistic models consume raw values.
    pub fn standardizes(self) -> bool {
        matches!(
            self,
            Algorithm::Knn
                | Algorithm::Svm
                | Algorithm::LinReg
                | Algorithm::LogReg
                | Algorithm::Sdnn
                | Algorithm::Cdnn
        )
    }

    /// Parameter names `train` understands for this algorithm.
    pub fn known_params(self) -> &'static [&'static str] {
        match self {
            Algorithm::Rfc => &[
                "n_trees",
                "max_features",
                "max_depth",
                "min_samples_split",
                "bootstrap",
            ],
            Algorithm::Dt => &["max_depth", "min_samples_split"],
            Algorithm::Knn => &["k"],
            Algorithm::Svm => &["c", "kernel", "gamma", "tol", "max_passes"],
            Algorithm::LinReg => &[],
            Algorithm::LogReg => &["lr", "epochs", "l2"],
            Algorithm::Nb => &[],
            Algorithm::ZeroR => &[],
            Algorithm::Sdnn => &["layers", "lr", "epochs", "batch_size"],
            Algorithm::Cdnn => &["layers", "lr", "epochs", "batch_size", "max_misses"],
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LearnError {
    #[error("non-finite feature value at row {row}, column {col}")]
    NonFiniteFeature { row: usize, col: usize },
    #[error("class {label} has no training samples")]
    EmptyClass { label: u8 },
    #[error("feature manifest mismatch: model expects {expected} features, got {got}")]
    FeatureManifestMismatch { expected: usize, got: usize },
    #[error("unknown parameter `{name}` for {algorithm}")]
    UnknownParameter { algorithm: String, name: String },
    #[error("invalid value for `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("{algorithm} requires a dev set")]
    MissingDevSet { algorithm: String },
}

/// One hyperparameter value. The untagged serde shape lets grid files write
/// plain literals (`k = [1, 3, 5]`, `layers = [[64, 32]]`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Bool(bool),
    Int(i64),
    Float(f64),
    Text(String),
    IntList(Vec<i64>),
}

pub type ParamMap = BTreeMap<String, ParamValue>;

/// Candidate values per parameter; the grid is the Cartesian product.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct HyperGrid(pub BTreeMap<String, Vec<ParamValue>>);

impl HyperGrid {
    pub fn validate(&self, algorithm: Algorithm) -> Result<(), LearnError> {
        for (name, values) in &self.0 {
            if !algorithm.known_params().contains(&name.as_str()) {
                return Err(LearnError::UnknownParameter {
                    algorithm: algorithm.id().to_string(),
                    name: name.clone(),
                });
            }
            if values.is_empty() {
                return Err(LearnError::InvalidParameter {
                    name: name.clone(),
                    reason: "empty candidate list".to_string(),
                });
            }
        }
        Ok(())
    }

    /// All combinations, ordered lexicographically by parameter name and then
    /// by each parameter's listed candidate order.
    pub fn cartesian(&self) -> Vec<ParamMap> {
        let mut out: Vec<ParamMap> = alloc::vec![ParamMap::new()];
        for (name, values) in &self.0 {
            let mut next = Vec::with_capacity(out.len() * values.len());
            for base in &out {
                for value in values {
                    let mut m = base.clone();
                    m.insert(name.clone(), value.clone());
                    next.push(m);
                }
            }
            out = next;
        }
        out
    }
}

// Typed lookups with defaults; a present-but-mistyped value is an error, a
// missing one falls back.

pub(crate) fn param_f64(params: &ParamMap, name: &str, default: f64) -> Result<f64, LearnError> {
    match params.get(name) {
        None => Ok(default),
        Some(ParamValue::Float(v)) => Ok(*v),
        Some(ParamValue::Int(v)) => Ok(*v as f64),
        Some(_) => Err(LearnError::InvalidParameter {
            name: name.to_string(),
            reason: "expected a number".to_string(),
        }),
    }
}

pub(crate) fn param_usize(
    params: &ParamMap,
    name: &str,
    default: usize,
) -> Result<usize, LearnError> {
    match params.get(name) {
        None => Ok(default),
        Some(ParamValue::Int(v)) if *v >= 0 => Ok(*v as usize),
        Some(_) => Err(LearnError::InvalidParameter {
            name: name.to_string(),
            reason: "expected a non-negative integer".to_string(),
        }),
    }
}

pub(crate) fn param_bool(params: &ParamMap, name: &str, default: bool) -> Result<bool, LearnError> {
    match params.get(name) {
        None => Ok(default),
        Some(ParamValue::Bool(v)) => Ok(*v),
        Some(_) => Err(LearnError::InvalidParameter {
            name: name.to_string(),
            reason: "expected a boolean".to_string(),
        }),
    }
}

pub(crate) fn param_text<'a>(params: &'a ParamMap, name: &str, default: &'a str) -> Result<&'a str, LearnError> {
    match params.get(name) {
        None => Ok(default),
        Some(ParamValue::Text(v)) => Ok(v),
        Some(_) => Err(LearnError::InvalidParameter {
            name: name.to_string(),
            reason: "expected a string".to_string(),
        }),
    }
}

pub(crate) fn param_layers(
    params: &ParamMap,
    name: &str,
    default: &[usize],
) -> Result<Vec<usize>, LearnError> {
    match params.get(name) {
        None => Ok(default.to_vec()),
        Some(ParamValue::IntList(v)) if v.iter().all(|&x| x > 0) => {
            Ok(v.iter().map(|&x| x as usize).collect())
        }
        Some(_) => Err(LearnError::InvalidParameter {
            name: name.to_string(),
            reason: "expected a list of positive integers".to_string(),
        }),
    }
}

/// Numerically stable logistic function, shared by the gradient models.
pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + crate::fmath::exp(-z))
    } else {
        let e = crate::fmath::exp(z);
        e / (1.0 + e)
    }
}

/// Borrowed view of a feature matrix with labels.
#[derive(Debug, Clone, Copy)]
pub struct TrainSet<'a> {
    pub features: &'a [Vec<f64>],
    pub labels: &'a [u8],
}

fn validate_matrix(rows: &[Vec<f64>], width: usize) -> Result<(), LearnError> {
    for (r, row) in rows.iter().enumerate() {
        if row.len() != width {
            return Err(LearnError::FeatureManifestMismatch {
                expected: width,
                got: row.len(),
            });
        }
        for (c, v) in row.iter().enumerate() {
            if !v.is_finite() {
                return Err(LearnError::NonFiniteFeature { row: r, col: c });
            }
        }
    }
    Ok(())
}

/// Fitted per-algorithm parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ModelKind {
    Tree(DecisionTree),
    Forest(RandomForest),
    Knn(KnnModel),
    Svm(SvmModel),
    LinReg(LinRegModel),
    LogReg(LogRegModel),
    Nb(NbModel),
    ZeroR(ZeroRModel),
    Nn(NnModel),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub algorithm: Algorithm,
    pub params: ParamMap,
    pub seed: u64,
    pub n_features: usize,
    pub scaler: Option<Scaler>,
    pub model: ModelKind,
}

pub fn train(
    algorithm: Algorithm,
    params: &ParamMap,
    train: TrainSet<'_>,
    dev: Option<TrainSet<'_>>,
    seed: u64,
) -> Result<TrainedModel, LearnError> {
    for name in params.keys() {
        if !algorithm.known_params().contains(&name.as_str()) {
            return Err(LearnError::UnknownParameter {
                algorithm: algorithm.id().to_string(),
                name: name.clone(),
            });
        }
    }
    if train.features.is_empty() {
        return Err(LearnError::EmptyTrainingSet);
    }
    let n_features = train.features[0].len();
    validate_matrix(train.features, n_features)?;
    debug_assert_eq!(train.features.len(), train.labels.len());
    if let Some(dev) = dev {
        validate_matrix(dev.features, n_features)?;
    }

    let scaler = algorithm.standardizes().then(|| Scaler::fit(train.features));
    let scaled_train;
    let scaled_dev;
    let (x, dev_x): (&[Vec<f64>], Option<&[Vec<f64>]>) = match &scaler {
        Some(s) => {
            scaled_train = s.transform_all(train.features);
            scaled_dev = dev.map(|d| s.transform_all(d.features));
            (&scaled_train, scaled_dev.as_deref())
        }
        None => (train.features, dev.map(|d| d.features)),
    };
    let y = train.labels;

    let model = match algorithm {
        Algorithm::Dt => ModelKind::Tree(tree::fit(x, y, params)?),
        Algorithm::Rfc => ModelKind::Forest(forest::fit(x, y, params, seed)?),
        Algorithm::Knn => ModelKind::Knn(knn::fit(x, y, params)?),
        Algorithm::Svm => ModelKind::Svm(svm::fit(x, y, params, seed)?),
        Algorithm::LinReg => ModelKind::LinReg(linreg::fit(x, y)?),
        Algorithm::LogReg => ModelKind::LogReg(logreg::fit(x, y, params)?),
        Algorithm::Nb => ModelKind::Nb(naive_bayes::fit(x, y)?),
        Algorithm::ZeroR => ModelKind::ZeroR(zeror::fit(y)?),
        Algorithm::Sdnn => ModelKind::Nn(nn::fit_static(x, y, params, seed)?),
        Algorithm::Cdnn => {
            let dev = dev.ok_or_else(|| LearnError::MissingDevSet {
                algorithm: algorithm.id().to_string(),
            })?;
            ModelKind::Nn(nn::fit_validated(
                x,
                y,
                dev_x.expect("validated above"),
                dev.labels,
                params,
                seed,
            )?)
        }
    };

    Ok(TrainedModel {
        algorithm,
        params: params.clone(),
        seed,
        n_features,
        scaler,
        model,
    })
}

impl TrainedModel {
    /// Scores in [0, 1]; 0.5 is the decision boundary for every model that
    /// produces graded scores, and hard classifiers emit exactly 0.0 or 1.0.
    pub fn scores(&self, rows: &[Vec<f64>]) -> Result<Vec<f64>, LearnError> {
        validate_matrix(rows, self.n_features)?;
        let scaled;
        let x: &[Vec<f64>] = match &self.scaler {
            Some(s) => {
                scaled = s.transform_all(rows);
                &scaled
            }
            None => rows,
        };
        Ok(x.iter()
            .map(|row| match &self.model {
                ModelKind::Tree(m) => f64::from(m.predict(row)),
                ModelKind::Forest(m) => m.score(row),
                ModelKind::Knn(m) => m.score(row),
                ModelKind::Svm(m) => f64::from(m.predict(row)),
                ModelKind::LinReg(m) => m.score(row),
                ModelKind::LogReg(m) => m.score(row),
                ModelKind::Nb(m) => m.score(row),
                ModelKind::ZeroR(m) => m.score(),
                ModelKind::Nn(m) => m.score(row),
            })
            .collect())
    }

    /// Each model applies its own documented boundary rule: vote-based
    /// models (forest, KNN) and NB break exact ties toward the negative
    /// class, the threshold models classify score >= 0.5 as positive, SVM
    /// classifies decision >= 0 as positive, and ZeroR always answers the
    /// training majority.
    pub fn predict(&self, rows: &[Vec<f64>]) -> Result<Vec<u8>, LearnError> {
        validate_matrix(rows, self.n_features)?;
        let scaled;
        let x: &[Vec<f64>] = match &self.scaler {
            Some(s) => {
                scaled = s.transform_all(rows);
                &scaled
            }
            None => rows,
        };
        Ok(x.iter()
            .map(|row| match &self.model {
                ModelKind::Tree(m) => m.predict(row),
                ModelKind::Forest(m) => m.predict(row),
                ModelKind::Knn(m) => m.predict(row),
                ModelKind::Svm(m) => m.predict(row),
                ModelKind::LinReg(m) => m.predict(row),
                ModelKind::LogReg(m) => m.predict(row),
                ModelKind::Nb(m) => m.predict(row),
                ModelKind::ZeroR(m) => m.majority,
                ModelKind::Nn(m) => m.predict(row),
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> (Vec<Vec<f64>>, Vec<u8>) {
        let x = alloc::vec![
            alloc::vec![0.0, 0.0],
            alloc::vec![0.2, 0.1],
            alloc::vec![1.0, 1.0],
            alloc::vec![0.9, 1.1],
        ];
        (x, alloc::vec![0, 0, 1, 1])
    }

    #[test]
    fn test_cartesian_product_size_and_order() {
        let mut grid = HyperGrid::default();
        grid.0.insert(
            "a".to_string(),
            alloc::vec![ParamValue::Int(1), ParamValue::Int(2)],
        );
        grid.0.insert(
            "b".to_string(),
            alloc::vec![ParamValue::Int(10), ParamValue::Int(20)],
        );
        let combos = grid.cartesian();
        assert_eq!(combos.len(), 4);
        assert_eq!(combos[0]["a"], ParamValue::Int(1));
        assert_eq!(combos[0]["b"], ParamValue::Int(10));
        assert_eq!(combos[1]["b"], ParamValue::Int(20));
        assert_eq!(combos[3]["a"], ParamValue::Int(2));
    }

    #[test]
    fn test_single_point_grid() {
        let mut grid = HyperGrid::default();
        grid.0
            .insert("k".to_string(), alloc::vec![ParamValue::Int(3)]);
        assert_eq!(grid.cartesian().len(), 1);
    }

    #[test]
    fn test_empty_grid_yields_default_config() {
        assert_eq!(HyperGrid::default().cartesian(), alloc::vec![ParamMap::new()]);
    }

    #[test]
    fn test_unknown_parameter_rejected() {
        let mut grid = HyperGrid::default();
        grid.0
            .insert("wat".to_string(), alloc::vec![ParamValue::Int(3)]);
        assert!(matches!(
            grid.validate(Algorithm::Knn),
            Err(LearnError::UnknownParameter { .. })
        ));
        let mut params = ParamMap::new();
        params.insert("wat".to_string(), ParamValue::Int(3));
        let (x, y) = tiny();
        let r = train(Algorithm::Knn, &params, TrainSet { features: &x, labels: &y }, None, 0);
        assert!(matches!(r, Err(LearnError::UnknownParameter { .. })));
    }

    #[test]
    fn test_non_finite_feature_rejected() {
        let x = alloc::vec![alloc::vec![1.0, f64::NAN]];
        let y = alloc::vec![1u8];
        let r = train(Algorithm::Dt, &ParamMap::new(), TrainSet { features: &x, labels: &y }, None, 0);
        assert_eq!(r.unwrap_err(), LearnError::NonFiniteFeature { row: 0, col: 1 });
    }

    #[test]
    fn test_manifest_mismatch_on_predict() {
        let (x, y) = tiny();
        let m = train(Algorithm::Dt, &ParamMap::new(), TrainSet { features: &x, labels: &y }, None, 0)
            .unwrap();
        let bad = alloc::vec![alloc::vec![1.0, 2.0, 3.0]];
        assert_eq!(
            m.predict(&bad).unwrap_err(),
            LearnError::FeatureManifestMismatch { expected: 2, got: 3 }
        );
    }

    #[test]
    fn test_algorithm_ids_roundtrip() {
        for algo in Algorithm::ALL {
            assert_eq!(Algorithm::parse(algo.id()), Some(algo));
        }
        assert_eq!(Algorithm::parse("rfc"), Some(Algorithm::Rfc));
        assert_eq!(Algorithm::parse("bogus"), None);
    }

    #[test]
    fn test_every_algorithm_fits_tiny_separable_data() {
        let (x, y) = tiny();
        let train_set = TrainSet { features: &x, labels: &y };
        for algo in Algorithm::ALL {
            let mut params = ParamMap::new();
            if matches!(algo, Algorithm::Sdnn | Algorithm::Cdnn) {
                params.insert("layers".to_string(), ParamValue::IntList(alloc::vec![4]));
                params.insert("epochs".to_string(), ParamValue::Int(50));
            }
            if algo == Algorithm::Knn {
                params.insert("k".to_string(), ParamValue::Int(1));
            }
            let dev = matches!(algo, Algorithm::Cdnn).then_some(train_set);
            let model = train(algo, &params, train_set, dev, 7).unwrap();
            let preds = model.predict(&x).unwrap();
            if algo == Algorithm::ZeroR {
                // Majority with a 2-2 tie resolves to 0.
                assert_eq!(preds, [0, 0, 0, 0]);
            } else {
                assert_eq!(preds, [0, 0, 1, 1], "{} failed to separate", algo.id());
            }
        }
    }

    #[test]
    fn test_same_seed_same_predictions() {
        let (x, y) = tiny();
        let ts = TrainSet { features: &x, labels: &y };
        for algo in [Algorithm::Rfc, Algorithm::Svm, Algorithm::Sdnn] {
            let a = train(algo, &ParamMap::new(), ts, None, 11).unwrap();
            let b = train(algo, &ParamMap::new(), ts, None, 11).unwrap();
            assert_eq!(a, b, "{} not reproducible", algo.id());
        }
    }
}
