//! Version-history process metrics: 19 values per function.
//!
//! The pipeline walks a repository's linearized commit chain oldest-first and
//! folds each commit into per-function accumulator state; the final state
//! yields the metric vector. Everything here is pure: the host supplies
//! commit metadata, post-image sources, and diff hunks (typically from git),
//! and the tracker does the rest.

mod delta;
mod identity;
mod state;
mod tracker;

pub use delta::{affected_pre_lines, changes_for_span, Hunk, LineChanges};
pub use identity::{fingerprint_records, jaccard, match_functions, FnFingerprint};
pub use state::{finalize, update_state, ProcessState};
pub use tracker::{FileChange, HistoryTracker, TrackedFunction};

use alloc::string::String;

use serde::{Deserialize, Serialize};

use crate::span::FunctionKey;

/// CSV column order for the process block (alphabetical by abbreviation).
pub const PROCESS_COLUMNS: [&str; 19] = [
    "AVGNOAL",
    "AVGNODL",
    "AVGNOEMT",
    "AVGNOML",
    "AVGTBC",
    "CChurn",
    "MNOAL",
    "MNODL",
    "MNOEMT",
    "MNOML",
    "NOADD",
    "NOCC",
    "NOCHG",
    "NOContr",
    "NODEL",
    "NOMOD",
    "SOADD",
    "SODEL",
    "SOMOD",
];

/// One function's process metrics. Stored as `f64` like [`StaticVector`] so
/// rows flow into CSV and training unchanged; counts hold exact integers.
///
/// [`StaticVector`]: crate::metrics::StaticVector
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ProcessVector {
    pub avgnoal: f64,
    pub avgnodl: f64,
    pub avgnoemt: f64,
    pub avgnoml: f64,
    pub avgtbc: f64,
    pub cchurn: f64,
    pub mnoal: f64,
    pub mnodl: f64,
    pub mnoemt: f64,
    pub mnoml: f64,
    pub noadd: f64,
    pub nocc: f64,
    pub nochg: f64,
    pub nocontr: f64,
    pub nodel: f64,
    pub nomod: f64,
    pub soadd: f64,
    pub sodel: f64,
    pub somod: f64,
}

impl ProcessVector {
    /// Values in [`PROCESS_COLUMNS`] order.
    pub fn to_row(&self) -> [f64; 19] {
        [
            self.avgnoal,
            self.avgnodl,
            self.avgnoemt,
            self.avgnoml,
            self.avgtbc,
            self.cchurn,
            self.mnoal,
            self.mnodl,
            self.mnoemt,
            self.mnoml,
            self.noadd,
            self.nocc,
            self.nochg,
            self.nocontr,
            self.nodel,
            self.nomod,
            self.soadd,
            self.sodel,
            self.somod,
        ]
    }
}

/// One commit's identity as the state fold sees it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommitMeta {
    pub commit_id: String,
    /// Normalized author identity: lowercased email.
    pub author_id: String,
    /// Committer time, seconds since epoch, monotone along the walked chain.
    pub timestamp: i64,
}

/// Per-function outcome of one commit.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionDelta {
    /// Post-commit identity.
    pub key: FunctionKey,
    pub added: u32,
    pub deleted: u32,
    pub modified: u32,
    /// Other functions changed by the same commit.
    pub co_changed: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProcessError {
    /// A commit arrived with a timestamp earlier than state already folded.
    /// The walker is responsible for ordering; seeing this is a bug upstream.
    #[error("commit {commit} at t={timestamp} precedes already-applied state")]
    OutOfOrderCommit { commit: String, timestamp: i64 },
}
