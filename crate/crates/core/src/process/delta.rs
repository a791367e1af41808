//! Diff-hunk arithmetic: turning `-`/`+` line ranges into per-function added,
//! deleted, and modified counts.
//!
//! Hunks are expected context-free (unified diff with zero context), so every
//! old/new line they name is an actual change. Within one hunk clipped to one
//! function, removed and inserted lines pair up as in-place modifications;
//! the surplus on either side is a pure deletion or addition. This mirrors
//! how a reviewer reads `-old`/`+new` pairs.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::span::SourceSpan;

/// One unified-diff hunk header: `@@ -old_start,old_len +new_start,new_len @@`.
/// A zero length means the start marks the line *after which* the change
/// applies on that side, per diff convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hunk {
    pub old_start: u32,
    pub old_len: u32,
    pub new_start: u32,
    pub new_len: u32,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LineChanges {
    pub added: u32,
    pub deleted: u32,
    pub modified: u32,
}

impl LineChanges {
    pub fn total(&self) -> u32 {
        self.added + self.deleted + self.modified
    }
}

/// Lines of `[start, start+len)` falling inside the spanned lines.
fn overlap(start: u32, len: u32, span: &SourceSpan) -> u32 {
    if len == 0 {
        return 0;
    }
    let lo = start.max(span.start_line);
    let hi = (start + len - 1).min(span.end_line);
    if lo > hi {
        0
    } else {
        hi - lo + 1
    }
}

/// Accumulates one function's line changes over a commit's hunks.
/// `pre_span` is the function's extent before the commit (`None` for a
/// function created by it); `post_span` its extent after.
pub fn changes_for_span(
    hunks: &[Hunk],
    pre_span: Option<&SourceSpan>,
    post_span: &SourceSpan,
) -> LineChanges {
    let mut out = LineChanges::default();
    for hunk in hunks {
        let removed = pre_span.map_or(0, |span| overlap(hunk.old_start, hunk.old_len, span));
        let inserted = overlap(hunk.new_start, hunk.new_len, post_span);
        let modified = removed.min(inserted);
        out.modified += modified;
        out.added += inserted - modified;
        out.deleted += removed - modified;
    }
    out
}

/// Pre-image lines a patch touches, for mapping fixes onto pre-fix functions.
/// Deletions and replacements contribute their removed range; a pure
/// insertion contributes the two lines it sits between, so a fix that only
/// inserts still marks the function it lands in.
pub fn affected_pre_lines(hunks: &[Hunk]) -> Vec<u32> {
    let mut lines = Vec::new();
    for hunk in hunks {
        if hunk.old_len > 0 {
            lines.extend(hunk.old_start..hunk.old_start + hunk.old_len);
        } else {
            lines.push(hunk.old_start.max(1));
            lines.push(hunk.old_start + 1);
        }
    }
    lines.sort_unstable();
    lines.dedup();
    lines
}

#[cfg(test)]
mod tests {
    use super::*;

    fn span(start: u32, end: u32) -> SourceSpan {
        SourceSpan::new(start, 0, end, 1)
    }

    #[test]
    fn test_creation_is_pure_addition() {
        // New 10-line function; file created, one all-inclusive hunk.
        let hunks = [Hunk { old_start: 0, old_len: 0, new_start: 1, new_len: 10 }];
        let c = changes_for_span(&hunks, None, &span(1, 10));
        assert_eq!(c, LineChanges { added: 10, deleted: 0, modified: 0 });
    }

    #[test]
    fn test_paired_replacement_is_modification() {
        // Two lines replaced in place inside f (spans unchanged).
        let hunks = [Hunk { old_start: 7, old_len: 2, new_start: 7, new_len: 2 }];
        let c = changes_for_span(&hunks, Some(&span(5, 20)), &span(5, 20));
        assert_eq!(c, LineChanges { added: 0, deleted: 0, modified: 2 });
    }

    #[test]
    fn test_unbalanced_hunk_splits() {
        // 1 old line became 4 new lines: one modified, three added.
        let hunks = [Hunk { old_start: 8, old_len: 1, new_start: 8, new_len: 4 }];
        let c = changes_for_span(&hunks, Some(&span(5, 12)), &span(5, 15));
        assert_eq!(c, LineChanges { added: 3, deleted: 0, modified: 1 });
    }

    #[test]
    fn test_hunk_clipped_to_span() {
        // Hunk replaces lines 18-22 but f ends at 20: 3 of the old lines are
        // f's; the new lines land at 18-22 of which 18-20 are inside f's new
        // span.
        let hunks = [Hunk { old_start: 18, old_len: 5, new_start: 18, new_len: 5 }];
        let c = changes_for_span(&hunks, Some(&span(5, 20)), &span(5, 20));
        assert_eq!(c, LineChanges { added: 0, deleted: 0, modified: 3 });
    }

    #[test]
    fn test_disjoint_hunk_contributes_nothing() {
        let hunks = [Hunk { old_start: 30, old_len: 2, new_start: 30, new_len: 2 }];
        let c = changes_for_span(&hunks, Some(&span(5, 20)), &span(5, 20));
        assert_eq!(c.total(), 0);
    }

    #[test]
    fn test_multiple_hunks_accumulate() {
        let hunks = [
            Hunk { old_start: 6, old_len: 1, new_start: 6, new_len: 1 },
            Hunk { old_start: 10, old_len: 0, new_start: 11, new_len: 2 },
            Hunk { old_start: 15, old_len: 3, new_start: 18, new_len: 0 },
        ];
        let c = changes_for_span(&hunks, Some(&span(1, 20)), &span(1, 19));
        assert_eq!(c, LineChanges { added: 2, deleted: 3, modified: 1 });
    }

    #[test]
    fn test_affected_lines_for_deletion() {
        let hunks = [Hunk { old_start: 10, old_len: 3, new_start: 9, new_len: 0 }];
        assert_eq!(affected_pre_lines(&hunks), [10, 11, 12]);
    }

    #[test]
    fn test_affected_lines_for_pure_insertion() {
        let hunks = [Hunk { old_start: 7, old_len: 0, new_start: 8, new_len: 2 }];
        assert_eq!(affected_pre_lines(&hunks), [7, 8]);
    }

    #[test]
    fn test_affected_lines_insertion_at_file_start() {
        let hunks = [Hunk { old_start: 0, old_len: 0, new_start: 1, new_len: 3 }];
        assert_eq!(affected_pre_lines(&hunks), [1]);
    }
}
