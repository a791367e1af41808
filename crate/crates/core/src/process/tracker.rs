//! Commit-by-commit function tracking.
//!
//! The tracker consumes commits oldest-first. For every changed file it
//! parses the post-image, matches the functions found there against the
//! tracks it already holds for that file (by name, then by content
//! similarity), attributes the commit's hunks to each function, and folds the
//! result into that function's running [`ProcessState`].
//!
//! A function has a delta in a commit when the hunks add, delete, or modify
//! at least one of its lines, or when the commit creates it. A pure file
//! move produces no delta: no line of the function changed. A function
//! rename does, because the header line is rewritten.
//!
//! Co-change is commit-wide: every delta's `co_changed` is the number of
//! other deltas in the same commit, across all files, so deltas are collected
//! first and applied after the whole commit has been scanned.

use alloc::string::String;
use alloc::vec::Vec;

use hashbrown::HashMap;

use crate::inventory::inventory_program;
use crate::lex::tokenize;
use crate::parse::parse;
use crate::span::FunctionKey;

use super::delta::{changes_for_span, Hunk};
use super::identity::{fingerprint_records, match_functions, FnFingerprint};
use super::state::{finalize, update_state, ProcessState};
use super::{CommitMeta, FunctionDelta, ProcessError, ProcessVector};

/// One file's part of a commit, as mined from the repository.
///
/// `old_path`/`new_path` follow diff conventions: an added file has no
/// `old_path`, a deleted file no `new_path`, a rename differing paths.
/// `post_source` is the file content after the commit; `None` stands for an
/// unreadable or absent post-image, in which case tracks are carried over
/// untouched (a deleted file ends them instead).
#[derive(Debug, Clone, Default)]
pub struct FileChange {
    pub old_path: Option<String>,
    pub new_path: Option<String>,
    pub post_source: Option<String>,
    pub hunks: Vec<Hunk>,
}

/// A function alive at the last applied commit, with its finished metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackedFunction {
    pub key: FunctionKey,
    pub vector: ProcessVector,
}

struct Track {
    key: FunctionKey,
    fingerprint: FnFingerprint,
    state: ProcessState,
    live: bool,
}

pub struct HistoryTracker {
    threshold: f64,
    tracks: Vec<Track>,
    /// path -> qualified name -> index into `tracks`, live tracks only.
    by_file: HashMap<String, HashMap<String, usize>>,
    last_timestamp: Option<i64>,
}

impl HistoryTracker {
    pub fn new(similarity_threshold: f64) -> Self {
        HistoryTracker {
            threshold: similarity_threshold,
            tracks: Vec::new(),
            by_file: HashMap::new(),
            last_timestamp: None,
        }
    }

    pub fn apply_commit(
        &mut self,
        meta: &CommitMeta,
        changes: &[FileChange],
    ) -> Result<(), ProcessError> {
        if self.last_timestamp.is_some_and(|last| meta.timestamp < last) {
            return Err(ProcessError::OutOfOrderCommit {
                commit: meta.commit_id.clone(),
                timestamp: meta.timestamp,
            });
        }
        self.last_timestamp = Some(meta.timestamp);

        let mut deltas: Vec<(usize, FunctionDelta)> = Vec::new();
        for change in changes {
            self.apply_file_change(change, &mut deltas);
        }

        // Every other delta in the commit counts as a co-change.
        let co_changed = (deltas.len() as u32).saturating_sub(1);
        for (id, mut delta) in deltas {
            delta.co_changed = co_changed;
            update_state(&mut self.tracks[id].state, meta, &delta)?;
        }
        Ok(())
    }

    fn apply_file_change(&mut self, change: &FileChange, deltas: &mut Vec<(usize, FunctionDelta)>) {
        let Some(new_path) = &change.new_path else {
            // File deleted: its functions end here, without a final delta.
            if let Some(old) = &change.old_path {
                if let Some(map) = self.by_file.remove(old) {
                    for (_, id) in map {
                        self.tracks[id].live = false;
                    }
                }
            }
            return;
        };

        let prior: HashMap<String, usize> = change
            .old_path
            .as_ref()
            .and_then(|path| self.by_file.remove(path))
            .unwrap_or_default();

        let Some(source) = &change.post_source else {
            // Post-image unavailable: carry the tracks over under the new
            // path and leave their metrics alone.
            let mut kept = HashMap::new();
            for (name, id) in prior {
                self.tracks[id].key.file_path = new_path.clone();
                kept.insert(name, id);
            }
            self.by_file.insert(new_path.clone(), kept);
            return;
        };

        let stream = tokenize(source);
        let parsed = parse(&stream);
        let inventory = inventory_program(new_path, &parsed.program);
        let next_fps = fingerprint_records(&stream.tokens, &inventory.records);

        // Fix prev ordering by position so greedy matching is reproducible.
        let mut prev_ids: Vec<usize> = prior.values().copied().collect();
        prev_ids.sort_by(|&a, &b| {
            let (ka, kb) = (&self.tracks[a].key, &self.tracks[b].key);
            (ka.span.start_line, ka.span.start_col, &ka.qualified_name).cmp(&(
                kb.span.start_line,
                kb.span.start_col,
                &kb.qualified_name,
            ))
        });
        let prev_fps: Vec<FnFingerprint> = prev_ids
            .iter()
            .map(|&id| self.tracks[id].fingerprint.clone())
            .collect();

        let matches = match_functions(&prev_fps, &next_fps, self.threshold);
        let mut prev_matched = alloc::vec![false; prev_ids.len()];
        let mut current: HashMap<String, usize> = HashMap::new();

        for (ni, record) in inventory.records.iter().enumerate() {
            let matched = matches[ni].map(|pi| {
                prev_matched[pi] = true;
                prev_ids[pi]
            });
            let pre_span = matched.map(|id| self.tracks[id].key.span.clone());
            let line_changes = changes_for_span(&change.hunks, pre_span.as_ref(), &record.key.span);

            let id = match matched {
                Some(id) => {
                    // Spans shift even without a delta; the key must follow.
                    self.tracks[id].key = record.key.clone();
                    self.tracks[id].fingerprint = next_fps[ni].clone();
                    id
                }
                None => {
                    let id = self.tracks.len();
                    self.tracks.push(Track {
                        key: record.key.clone(),
                        fingerprint: next_fps[ni].clone(),
                        state: ProcessState::default(),
                        live: true,
                    });
                    id
                }
            };
            current.insert(record.key.qualified_name.clone(), id);

            if line_changes.total() > 0 || matches[ni].is_none() {
                deltas.push((
                    id,
                    FunctionDelta {
                        key: record.key.clone(),
                        added: line_changes.added,
                        deleted: line_changes.deleted,
                        modified: line_changes.modified,
                        co_changed: 0,
                    },
                ));
            }
        }

        for (pi, &id) in prev_ids.iter().enumerate() {
            if !prev_matched[pi] {
                self.tracks[id].live = false;
            }
        }
        self.by_file.insert(new_path.clone(), current);
    }

    /// Metrics for every function alive at the last commit, ordered by
    /// file, start line, then name.
    pub fn finalize_all(&self) -> Vec<TrackedFunction> {
        let mut out: Vec<TrackedFunction> = self
            .tracks
            .iter()
            .filter(|t| t.live)
            .map(|t| TrackedFunction {
                key: t.key.clone(),
                vector: finalize(&t.state),
            })
            .collect();
        out.sort_by(|a, b| {
            (&a.key.file_path, a.key.span.start_line, &a.key.qualified_name).cmp(&(
                &b.key.file_path,
                b.key.span.start_line,
                &b.key.qualified_name,
            ))
        });
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    const FILE_V1: &str = "function f(n) {\n  var acc = 0;\n  acc += n;\n  acc += 2 * n;\n  return acc;\n}\nfunction g(n) {\n  var out = 1;\n  out *= n;\n  out -= 3;\n  return out;\n}\n";

    fn meta(id: &str, author: &str, timestamp: i64) -> CommitMeta {
        CommitMeta {
            commit_id: id.to_string(),
            author_id: author.to_string(),
            timestamp,
        }
    }

    fn add_file(path: &str, source: &str) -> FileChange {
        let lines = source.lines().count() as u32;
        FileChange {
            old_path: None,
            new_path: Some(path.to_string()),
            post_source: Some(source.to_string()),
            hunks: alloc::vec![Hunk { old_start: 0, old_len: 0, new_start: 1, new_len: lines }],
        }
    }

    fn edit_file(path: &str, source: &str, hunks: Vec<Hunk>) -> FileChange {
        FileChange {
            old_path: Some(path.to_string()),
            new_path: Some(path.to_string()),
            post_source: Some(source.to_string()),
            hunks,
        }
    }

    #[test]
    fn test_created_functions_counted_once() {
        let mut tracker = HistoryTracker::new(0.8);
        tracker
            .apply_commit(&meta("c1", "alice", 100), &[add_file("a.js", FILE_V1)])
            .unwrap();
        let out = tracker.finalize_all();
        assert_eq!(out.len(), 2);
        let f = &out[0];
        assert_eq!(f.key.qualified_name, "f");
        assert_eq!(f.vector.nochg, 1.0);
        assert_eq!(f.vector.soadd, 6.0);
        assert_eq!(f.vector.nocontr, 1.0);
        // Two functions changed together in the creating commit.
        assert_eq!(f.vector.avgnoemt, 1.0);
        assert_eq!(out[1].key.qualified_name, "g");
        assert_eq!(out[1].vector.soadd, 6.0);
    }

    #[test]
    fn test_modification_attributes_to_one_function() {
        let v2 = FILE_V1.replace("  acc += n;\n", "  acc += n + 1;\n");
        let mut tracker = HistoryTracker::new(0.8);
        tracker
            .apply_commit(&meta("c1", "alice", 100), &[add_file("a.js", FILE_V1)])
            .unwrap();
        tracker
            .apply_commit(
                &meta("c2", "bob", 200),
                &[edit_file(
                    "a.js",
                    &v2,
                    alloc::vec![Hunk { old_start: 3, old_len: 1, new_start: 3, new_len: 1 }],
                )],
            )
            .unwrap();
        let out = tracker.finalize_all();
        let f = &out[0];
        assert_eq!(f.vector.nochg, 2.0);
        assert_eq!(f.vector.nomod, 1.0);
        assert_eq!(f.vector.somod, 1.0);
        assert_eq!(f.vector.nocontr, 2.0);
        assert_eq!(f.vector.nocc, 1.0);
        assert_eq!(f.vector.avgtbc, 100.0);
        // The lone delta in c2 has nothing changing alongside it.
        assert_eq!(f.vector.mnoemt, 1.0);
        let g = &out[1];
        assert_eq!(g.vector.nochg, 1.0, "untouched function gained a change");
        assert_eq!(g.vector.nocontr, 1.0);
    }

    #[test]
    fn test_function_rename_keeps_history() {
        let v2 = FILE_V1.replace("function f(n) {", "function h(n) {");
        let mut tracker = HistoryTracker::new(0.8);
        tracker
            .apply_commit(&meta("c1", "alice", 100), &[add_file("a.js", FILE_V1)])
            .unwrap();
        tracker
            .apply_commit(
                &meta("c2", "alice", 200),
                &[edit_file(
                    "a.js",
                    &v2,
                    alloc::vec![Hunk { old_start: 1, old_len: 1, new_start: 1, new_len: 1 }],
                )],
            )
            .unwrap();
        let out = tracker.finalize_all();
        assert_eq!(out.len(), 2, "rename spawned a duplicate track");
        let h = out.iter().find(|t| t.key.qualified_name == "h").unwrap();
        assert_eq!(h.vector.nochg, 2.0);
        assert_eq!(h.vector.somod, 1.0);
    }

    #[test]
    fn test_file_rename_without_edit_is_silent() {
        let mut tracker = HistoryTracker::new(0.8);
        tracker
            .apply_commit(&meta("c1", "alice", 100), &[add_file("a.js", FILE_V1)])
            .unwrap();
        tracker
            .apply_commit(
                &meta("c2", "bob", 200),
                &[FileChange {
                    old_path: Some("a.js".to_string()),
                    new_path: Some("b.js".to_string()),
                    post_source: Some(FILE_V1.to_string()),
                    hunks: Vec::new(),
                }],
            )
            .unwrap();
        let out = tracker.finalize_all();
        assert_eq!(out.len(), 2);
        for t in &out {
            assert_eq!(t.key.file_path, "b.js");
            assert_eq!(t.vector.nochg, 1.0, "pure move must not count as change");
            assert_eq!(t.vector.nocontr, 1.0);
        }
    }

    #[test]
    fn test_file_deletion_ends_tracks() {
        let mut tracker = HistoryTracker::new(0.8);
        tracker
            .apply_commit(&meta("c1", "alice", 100), &[add_file("a.js", FILE_V1)])
            .unwrap();
        tracker
            .apply_commit(
                &meta("c2", "alice", 200),
                &[FileChange {
                    old_path: Some("a.js".to_string()),
                    new_path: None,
                    post_source: None,
                    hunks: Vec::new(),
                }],
            )
            .unwrap();
        assert!(tracker.finalize_all().is_empty());
    }

    #[test]
    fn test_co_change_spans_files() {
        let single = "function f(n) {\n  var acc = 0;\n  acc += n;\n  acc += 2 * n;\n  return acc;\n}\n";
        let other = "function k(n) {\n  var out = 1;\n  out *= n;\n  out -= 3;\n  return out;\n}\n";
        let v2 = single.replace("  acc += n;\n", "  acc += n + 1;\n");
        let mut tracker = HistoryTracker::new(0.8);
        tracker
            .apply_commit(&meta("c1", "alice", 100), &[add_file("a.js", single)])
            .unwrap();
        tracker
            .apply_commit(
                &meta("c2", "alice", 200),
                &[
                    edit_file(
                        "a.js",
                        &v2,
                        alloc::vec![Hunk { old_start: 3, old_len: 1, new_start: 3, new_len: 1 }],
                    ),
                    add_file("b.js", other),
                ],
            )
            .unwrap();
        let out = tracker.finalize_all();
        let f = out.iter().find(|t| t.key.qualified_name == "f").unwrap();
        // Creation carried 0 co-changes, the c2 edit carried 1.
        assert_eq!(f.vector.mnoemt, 1.0);
        assert_eq!(f.vector.avgnoemt, 0.5);
        let k = out.iter().find(|t| t.key.qualified_name == "k").unwrap();
        assert_eq!(k.vector.avgnoemt, 1.0);
    }

    #[test]
    fn test_span_shift_without_delta_rekeys() {
        // Two lines inserted inside f push g down without touching it.
        let v2 = FILE_V1.replace(
            "  acc += n;\n",
            "  acc += n;\n  acc += 1;\n  acc += 2;\n",
        );
        let mut tracker = HistoryTracker::new(0.8);
        tracker
            .apply_commit(&meta("c1", "alice", 100), &[add_file("a.js", FILE_V1)])
            .unwrap();
        tracker
            .apply_commit(
                &meta("c2", "alice", 200),
                &[edit_file(
                    "a.js",
                    &v2,
                    alloc::vec![Hunk { old_start: 3, old_len: 0, new_start: 4, new_len: 2 }],
                )],
            )
            .unwrap();
        let out = tracker.finalize_all();
        let g = out.iter().find(|t| t.key.qualified_name == "g").unwrap();
        assert_eq!(g.key.span.start_line, 9);
        assert_eq!(g.vector.nochg, 1.0);
        let f = out.iter().find(|t| t.key.qualified_name == "f").unwrap();
        assert_eq!(f.vector.soadd, 6.0 + 2.0);
        assert_eq!(f.vector.noadd, 2.0);
    }

    #[test]
    fn test_out_of_order_commit_rejected() {
        let mut tracker = HistoryTracker::new(0.8);
        tracker
            .apply_commit(&meta("c1", "alice", 100), &[add_file("a.js", FILE_V1)])
            .unwrap();
        let err = tracker
            .apply_commit(&meta("c2", "alice", 50), &[])
            .unwrap_err();
        assert!(matches!(err, ProcessError::OutOfOrderCommit { .. }));
    }

    #[test]
    fn test_author_alternation_over_three_commits() {
        let v2 = FILE_V1.replace("  acc += n;\n", "  acc += n + 1;\n");
        let v3 = v2.replace("  acc += n + 1;\n", "  acc += n + 2;\n");
        let hunk = |_: ()| alloc::vec![Hunk { old_start: 3, old_len: 1, new_start: 3, new_len: 1 }];
        let mut tracker = HistoryTracker::new(0.8);
        tracker
            .apply_commit(&meta("c1", "alice", 100), &[add_file("a.js", FILE_V1)])
            .unwrap();
        tracker
            .apply_commit(&meta("c2", "bob", 200), &[edit_file("a.js", &v2, hunk(()))])
            .unwrap();
        tracker
            .apply_commit(&meta("c3", "alice", 350), &[edit_file("a.js", &v3, hunk(()))])
            .unwrap();
        let out = tracker.finalize_all();
        let f = out.iter().find(|t| t.key.qualified_name == "f").unwrap();
        assert_eq!(f.vector.nochg, 3.0);
        assert_eq!(f.vector.nocontr, 2.0);
        assert_eq!(f.vector.nocc, 2.0);
        assert_eq!(f.vector.avgtbc, 125.0);
    }
}
