//! Incremental accumulator behind the process metrics.
//!
//! The counting rules, since the metric names alone leave room: creation
//! counts as addition; a commit increments NOADD/NODEL/NOMOD only when the
//! respective line count is positive; NOCHG counts every commit touching the
//! function; author identity is the lowercased email; time gaps use committer
//! timestamps. Averages use the zero-denominator-is-zero convention.

use alloc::string::String;
use alloc::vec::Vec;

use super::{CommitMeta, FunctionDelta, ProcessError, ProcessVector};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ProcessState {
    pub total_added: u64,
    pub total_deleted: u64,
    pub total_modified: u64,
    pub max_added: u32,
    pub max_deleted: u32,
    pub max_modified: u32,
    pub max_emt: u32,
    pub change_commits: u32,
    pub add_commits: u32,
    pub del_commits: u32,
    pub mod_commits: u32,
    pub emt_sum: u64,
    /// Sorted distinct author ids; functions rarely see more than a handful.
    pub contributors: Vec<String>,
    pub contributor_changes: u32,
    pub last_author: Option<String>,
    pub last_change_time: Option<i64>,
    pub time_gap_sum: u64,
}

/// Folds one commit's delta into the state.
pub fn update_state(
    state: &mut ProcessState,
    meta: &CommitMeta,
    delta: &FunctionDelta,
) -> Result<(), ProcessError> {
    if let Some(last) = state.last_change_time {
        if meta.timestamp < last {
            return Err(ProcessError::OutOfOrderCommit {
                commit: meta.commit_id.clone(),
                timestamp: meta.timestamp,
            });
        }
        state.time_gap_sum += (meta.timestamp - last) as u64;
    }

    state.change_commits += 1;
    if delta.added > 0 {
        state.add_commits += 1;
        state.total_added += u64::from(delta.added);
        state.max_added = state.max_added.max(delta.added);
    }
    if delta.deleted > 0 {
        state.del_commits += 1;
        state.total_deleted += u64::from(delta.deleted);
        state.max_deleted = state.max_deleted.max(delta.deleted);
    }
    if delta.modified > 0 {
        state.mod_commits += 1;
        state.total_modified += u64::from(delta.modified);
        state.max_modified = state.max_modified.max(delta.modified);
    }
    state.emt_sum += u64::from(delta.co_changed);
    state.max_emt = state.max_emt.max(delta.co_changed);

    if let Err(pos) = state.contributors.binary_search(&meta.author_id) {
        state.contributors.insert(pos, meta.author_id.clone());
    }
    if state.last_author.as_deref().is_some_and(|prev| prev != meta.author_id) {
        state.contributor_changes += 1;
    }
    state.last_author = Some(meta.author_id.clone());
    state.last_change_time = Some(meta.timestamp);
    Ok(())
}

/// Derives the 19-metric vector from accumulated state.
pub fn finalize(state: &ProcessState) -> ProcessVector {
    let avg = |sum: u64, n: u32| if n == 0 { 0.0 } else { sum as f64 / f64::from(n) };
    ProcessVector {
        avgnoal: avg(state.total_added, state.add_commits),
        avgnodl: avg(state.total_deleted, state.del_commits),
        avgnoemt: avg(state.emt_sum, state.change_commits),
        avgnoml: avg(state.total_modified, state.mod_commits),
        avgtbc: if state.change_commits >= 2 {
            state.time_gap_sum as f64 / f64::from(state.change_commits - 1)
        } else {
            0.0
        },
        cchurn: state.total_added as f64 - state.total_deleted as f64,
        mnoal: f64::from(state.max_added),
        mnodl: f64::from(state.max_deleted),
        mnoemt: f64::from(state.max_emt),
        mnoml: f64::from(state.max_modified),
        noadd: f64::from(state.add_commits),
        nocc: f64::from(state.contributor_changes),
        nochg: f64::from(state.change_commits),
        nocontr: state.contributors.len() as f64,
        nodel: f64::from(state.del_commits),
        nomod: f64::from(state.mod_commits),
        soadd: state.total_added as f64,
        sodel: state.total_deleted as f64,
        somod: state.total_modified as f64,
    }
}
