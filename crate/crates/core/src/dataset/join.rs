//! Inner join of the static and process feature tables.
//!
//! Both tables are keyed by `(path, qualified name, span)`. Functions seen by
//! only one side are dropped, not imputed: a missing side means the two
//! analyses disagree about the function's existence, and a half-filled row
//! would silently distort training. The drops are tallied in a report the
//! pipeline prints.

use alloc::string::ToString;
use alloc::vec::Vec;

use hashbrown::{HashMap, HashSet};

use crate::metrics::StaticVector;
use crate::process::ProcessVector;
use crate::span::FunctionKey;

use super::{Dataset, DatasetError, LabeledSample};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct JoinReport {
    pub joined: usize,
    /// Static rows with no process match.
    pub static_only: usize,
    /// Process rows with no static match.
    pub process_only: usize,
    /// Vulnerable keys that matched no joined row.
    pub unmatched_labels: usize,
}

fn check_unique<'a, T>(
    rows: impl Iterator<Item = &'a (FunctionKey, T)>,
) -> Result<(), DatasetError>
where
    T: 'a,
{
    let mut seen: HashSet<&FunctionKey> = HashSet::new();
    for (key, _) in rows {
        if !seen.insert(key) {
            return Err(DatasetError::DuplicateKey {
                key: alloc::format!(
                    "{}:{}:{}",
                    key.file_path,
                    key.qualified_name,
                    key.span.start_line
                ),
            });
        }
    }
    Ok(())
}

pub fn join(
    project: &str,
    statics: &[(FunctionKey, StaticVector)],
    process: &[(FunctionKey, ProcessVector)],
    vulnerable: &[FunctionKey],
) -> Result<(Dataset, JoinReport), DatasetError> {
    check_unique(statics.iter())?;
    check_unique(process.iter())?;

    let process_by_key: HashMap<&FunctionKey, &ProcessVector> =
        process.iter().map(|(k, v)| (k, v)).collect();
    let vulnerable_set: HashSet<&FunctionKey> = vulnerable.iter().collect();

    // Sort so the joined dataset (and any CSV written from it) is identical
    // across runs regardless of input order.
    let mut order: Vec<usize> = (0..statics.len()).collect();
    order.sort_by(|&a, &b| {
        let (ka, kb) = (&statics[a].0, &statics[b].0);
        (&ka.file_path, ka.span.start_line, &ka.qualified_name).cmp(&(
            &kb.file_path,
            kb.span.start_line,
            &kb.qualified_name,
        ))
    });

    let mut samples = Vec::new();
    let mut report = JoinReport::default();
    let mut joined_keys: HashSet<&FunctionKey> = HashSet::new();
    for idx in order {
        let (key, statics_row) = &statics[idx];
        match process_by_key.get(key) {
            Some(process_row) => {
                joined_keys.insert(key);
                samples.push(LabeledSample {
                    project: project.to_string(),
                    key: key.clone(),
                    statics: *statics_row,
                    process: **process_row,
                    label: u8::from(vulnerable_set.contains(key)),
                });
            }
            None => report.static_only += 1,
        }
    }
    report.joined = samples.len();
    report.process_only = process
        .iter()
        .filter(|(k, _)| !joined_keys.contains(k))
        .count();
    report.unmatched_labels = vulnerable
        .iter()
        .filter(|k| !joined_keys.contains(k))
        .count();

    let dataset = Dataset::new(samples)?;
    Ok((dataset, report))
}
