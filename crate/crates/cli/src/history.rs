//! `mine-history`: walk a repository's first-parent chain and emit the
//! process feature table for every function alive at the snapshot.

use std::collections::BTreeMap;
use std::path::Path;

use vulnjs_core::process::{CommitMeta, FileChange, HistoryTracker, Hunk};

use crate::config::{self, AppConfig};
use crate::csvio;
use crate::errors::{Failure, Result};
use crate::gitio::{Blob, DiffFile, GitRepo};

pub const OUTPUT_NAME: &str = "process.csv";

fn is_js(path: &Option<String>) -> bool {
    path.as_deref().is_some_and(|p| p.ends_with(".js"))
}

/// Counters surfaced in the mining summary.
#[derive(Debug, Default, PartialEq, Eq)]
pub struct MineStats {
    pub commits: usize,
    pub file_changes: usize,
    pub unreadable_blobs: usize,
    pub clamped_timestamps: usize,
}

/// Maps one git-level diff entry onto the tracker's change model, fetching
/// the post-image blob when one is needed.
fn to_file_change(
    repo: &GitRepo,
    commit_id: &str,
    diff: &DiffFile,
    stats: &mut MineStats,
) -> Option<FileChange> {
    let old_js = is_js(&diff.old_path);
    let new_js = is_js(&diff.new_path);
    if !old_js && !new_js {
        return None;
    }

    // A file renamed away from `.js` leaves the analyzed set: its functions
    // end exactly as if the file had been deleted.
    if old_js && !new_js && diff.new_path.is_some() {
        return Some(FileChange {
            old_path: diff.old_path.clone(),
            new_path: None,
            post_source: None,
            hunks: Vec::new(),
        });
    }

    if diff.new_path.is_none() {
        return Some(FileChange {
            old_path: diff.old_path.clone(),
            new_path: None,
            post_source: None,
            hunks: diff.hunks.clone(),
        });
    }
    let new_path = diff.new_path.clone().expect("checked above");

    let (post_source, hunks) = if diff.binary {
        stats.unreadable_blobs += 1;
        eprintln!("unreadable blob (binary): {commit_id}:{new_path}");
        (None, Vec::new())
    } else {
        match repo.read_blob(commit_id, &new_path) {
            Ok(Blob::Text(text)) => {
                // A file renamed into `.js` enters the analyzed set as a
                // whole-file addition regardless of how small the edit was.
                let hunks = if old_js {
                    diff.hunks.clone()
                } else {
                    let lines = text.lines().count() as u32;
                    vec![Hunk { old_start: 0, old_len: 0, new_start: 1, new_len: lines }]
                };
                (Some(text), hunks)
            }
            Ok(Blob::Unreadable(reason)) => {
                stats.unreadable_blobs += 1;
                eprintln!("unreadable blob: {reason}");
                (None, Vec::new())
            }
            Err(e) => {
                stats.unreadable_blobs += 1;
                eprintln!("unreadable blob: {e}");
                (None, Vec::new())
            }
        }
    };

    Some(FileChange {
        old_path: if old_js { diff.old_path.clone() } else { None },
        new_path: Some(new_path),
        post_source,
        hunks,
    })
}

pub fn run(
    repo_path: &Path,
    until: Option<&str>,
    out_dir: &Path,
    cfg: &AppConfig,
    config_file: Option<&Path>,
) -> Result<()> {
    let repo = GitRepo::open(repo_path)?;
    let tip = repo.resolve_commit(until.unwrap_or("HEAD"))?;
    let chain = repo.first_parent_chain(&tip)?;

    let mut tracker = HistoryTracker::new(cfg.history.similarity_threshold);
    let mut stats = MineStats::default();
    let mut last_ts = i64::MIN;

    for commit in &chain {
        let mut timestamp = commit.timestamp;
        if timestamp < last_ts {
            // The tracker needs non-decreasing time; clock skew along the
            // chain is clamped rather than rejected.
            timestamp = last_ts;
            stats.clamped_timestamps += 1;
        }
        last_ts = timestamp;

        let changes: Vec<FileChange> = repo
            .diff_first_parent(commit)?
            .iter()
            .filter_map(|d| to_file_change(&repo, &commit.id, d, &mut stats))
            .collect();
        stats.commits += 1;
        stats.file_changes += changes.len();

        let meta = CommitMeta {
            commit_id: commit.id.clone(),
            author_id: commit.author_email.clone(),
            timestamp,
        };
        tracker
            .apply_commit(&meta, &changes)
            .map_err(|e| Failure::data(format!("commit {}: {e}", commit.id)))?;
    }

    let tracked = tracker.finalize_all();
    let rows: Vec<_> = tracked
        .into_iter()
        .map(|t| (t.key, t.vector))
        .collect();

    config::ensure_out_dir(out_dir)?;
    let out_path = out_dir.join(OUTPUT_NAME);
    csvio::write_process_csv(&out_path, &rows)?;

    let mut args = BTreeMap::new();
    args.insert("repo", repo_path.display().to_string());
    args.insert("until", tip.clone());
    args.insert("out", out_dir.display().to_string());
    config::write_run_record(out_dir, "mine-history", cfg, config_file, &args)?;

    println!(
        "mined {} commits ({} file changes); {} functions alive at {}",
        stats.commits,
        stats.file_changes,
        rows.len(),
        &tip[..tip.len().min(12)]
    );
    if stats.unreadable_blobs > 0 || stats.clamped_timestamps > 0 {
        println!(
            "{} unreadable blobs skipped, {} timestamps clamped",
            stats.unreadable_blobs, stats.clamped_timestamps
        );
    }
    println!("wrote {}", out_path.display());
    Ok(())
}
