//! Dataset assembly: labeling from fix commits, feature joining, splits, and
//! class rebalancing.
//!
//! A sample is one function with its 61 features (42 static, 19 process) and
//! a binary label. Keys are `(project, path, qualified name, span)`; the
//! feature column order is fixed by [`feature_columns`] and recorded with the
//! dataset so emitted CSVs are stable across runs.

mod join;
mod label;
mod resample;
mod split;

pub use join::{join, JoinReport};
pub use label::{label_from_fix, FilePatch};
pub use resample::{resample, RatioBasis, ResampleMode, ResamplePlan};
pub use split::{folds, split, SplitSpec};

use alloc::string::String;
use alloc::vec::Vec;

use hashbrown::HashSet;
use serde::{Deserialize, Serialize};

use crate::metrics::{StaticVector, STATIC_COLUMNS};
use crate::process::{ProcessVector, PROCESS_COLUMNS};
use crate::span::FunctionKey;

pub const FEATURE_COUNT: usize = 61;

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum DatasetError {
    #[error("fix patch is empty; nothing to label")]
    EmptyPatch,
    #[error("duplicate key {key}")]
    DuplicateKey { key: String },
    #[error("label {label} has {count} samples, fewer than {k} folds")]
    InsufficientClassSamples { label: u8, count: usize, k: usize },
    #[error("resample target ratio {requested} lies on the wrong side of current {current}")]
    RatioUnreachable { current: f64, requested: f64 },
    #[error("invalid split: {reason}")]
    InvalidSplit { reason: String },
    #[error("invalid resample plan: {reason}")]
    InvalidPlan { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledSample {
    pub project: String,
    pub key: FunctionKey,
    pub statics: StaticVector,
    pub process: ProcessVector,
    pub label: u8,
}

impl LabeledSample {
    /// The 61 feature values in manifest order.
    pub fn features(&self, selection: FeatureSelection) -> Vec<f64> {
        let mut row = Vec::with_capacity(FEATURE_COUNT);
        if selection != FeatureSelection::ProcessOnly {
            row.extend(self.statics.to_row());
        }
        if selection != FeatureSelection::StaticOnly {
            row.extend(self.process.to_row());
        }
        row
    }
}

/// Which feature groups flow into training.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FeatureSelection {
    StaticOnly,
    ProcessOnly,
    All,
}

/// Column names matching [`LabeledSample::features`] for a selection.
pub fn feature_columns(selection: FeatureSelection) -> Vec<&'static str> {
    let mut cols = Vec::with_capacity(FEATURE_COUNT);
    if selection != FeatureSelection::ProcessOnly {
        cols.extend(STATIC_COLUMNS);
    }
    if selection != FeatureSelection::StaticOnly {
        cols.extend(PROCESS_COLUMNS);
    }
    cols
}

/// Header of the dataset CSV: key columns, all 61 features, label.
pub fn csv_header() -> Vec<&'static str> {
    let mut header = alloc::vec!["project", "path", "name", "start_line", "end_line"];
    header.extend(feature_columns(FeatureSelection::All));
    header.push("label");
    header
}

/// An ordered sample collection with unique keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    samples: Vec<LabeledSample>,
}

impl Dataset {
    pub fn new(samples: Vec<LabeledSample>) -> Result<Dataset, DatasetError> {
        {
            let mut seen: HashSet<(&str, &FunctionKey)> = HashSet::new();
            for sample in &samples {
                if !seen.insert((&sample.project, &sample.key)) {
                    return Err(DatasetError::DuplicateKey {
                        key: alloc::format!(
                            "{}:{}:{}:{}",
                            sample.project,
                            sample.key.file_path,
                            sample.key.qualified_name,
                            sample.key.span.start_line
                        ),
                    });
                }
            }
        }
        Ok(Dataset { samples })
    }

    pub fn samples(&self) -> &[LabeledSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn labels(&self) -> Vec<u8> {
        self.samples.iter().map(|s| s.label).collect()
    }

    /// Row-major feature matrix.
    pub fn features(&self, selection: FeatureSelection) -> Vec<Vec<f64>> {
        self.samples.iter().map(|s| s.features(selection)).collect()
    }

    /// Samples at `indices`, in the given order. Duplicate-key checking is
    /// skipped: resampled subsets legitimately repeat rows.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            samples: indices.iter().map(|&i| self.samples[i].clone()).collect(),
        }
    }

    pub fn class_counts(&self) -> (usize, usize) {
        let pos = self.samples.iter().filter(|s| s.label == 1).count();
        (pos, self.samples.len() - pos)
    }
}

#[cfg(test)]
pub(crate) mod testutil {
    use super::*;
    use crate::span::SourceSpan;
    use alloc::string::ToString;

    /// A minimal sample whose features are all zero except HVOL, which holds
    /// `marker` so tests can tell rows apart.
    pub fn sample(name: &str, label: u8, marker: f64) -> LabeledSample {
        let mut statics = StaticVector::default();
        statics.hvol = marker;
        LabeledSample {
            project: "p".to_string(),
            key: FunctionKey::new("a.js", name, SourceSpan::new(1, 0, 2, 1)),
            statics,
            process: ProcessVector::default(),
            label,
        }
    }

    /// Positive markers sit at 0.. and negatives from 1000.., far enough
    /// apart that any reasonable learner separates the classes under any
    /// split of the rows.
    pub fn dataset(pos: usize, neg: usize) -> Dataset {
        let mut samples = Vec::new();
        for i in 0..pos {
            samples.push(sample(&alloc::format!("pos{i}"), 1, i as f64));
        }
        for i in 0..neg {
            samples.push(sample(&alloc::format!("neg{i}"), 0, 1000.0 + i as f64));
        }
        Dataset::new(samples).unwrap()
    }
}
