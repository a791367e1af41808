//! Read-only git access via the `git` binary.
//!
//! History is walked along the first-parent chain, oldest commit first, and
//! each commit is diffed against its first parent (merges therefore
//! contribute exactly what they merged in, not their side branches). All
//! commands run with the global and system git config masked out so a user's
//! diff tweaks cannot change what the miner sees.

use std::path::{Path, PathBuf};
use std::process::Command;

use vulnjs_core::process::Hunk;

use crate::errors::{Failure, Result};

/// Rename detection threshold passed to `diff-tree -M`.
const RENAME_THRESHOLD: &str = "-M50";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommitInfo {
    pub id: String,
    pub first_parent: Option<String>,
    pub author_email: String,
    /// Committer timestamp, seconds since the epoch.
    pub timestamp: i64,
}

/// One file's part of a commit diff. Paths are repo-relative with no `a/`
/// or `b/` prefix; `None` means the file did not exist on that side.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DiffFile {
    pub old_path: Option<String>,
    pub new_path: Option<String>,
    pub hunks: Vec<Hunk>,
    pub binary: bool,
}

pub enum Blob {
    Text(String),
    /// The blob exists but cannot be analyzed (binary or undecodable).
    Unreadable(String),
}

pub struct GitRepo {
    root: PathBuf,
}

impl GitRepo {
    pub fn open(root: &Path) -> Result<GitRepo> {
        let repo = GitRepo { root: root.to_path_buf() };
        match repo.run(&["rev-parse", "--git-dir"]) {
            Ok(_) => Ok(repo),
            Err(_) => Err(Failure::io(format!(
                "not a git repository: {}",
                root.display()
            ))),
        }
    }

    fn run(&self, args: &[&str]) -> Result<Vec<u8>> {
        let output = Command::new("git")
            .arg("-C")
            .arg(&self.root)
            .args(args)
            .env("GIT_CONFIG_GLOBAL", "/dev/null")
            .env("GIT_CONFIG_SYSTEM", "/dev/null")
            .env("LC_ALL", "C")
            .output()
            .map_err(|e| Failure::io_ctx("running git", e))?;
        if !output.status.success() {
            let stderr = String::from_utf8_lossy(&output.stderr);
            return Err(Failure::io(format!(
                "git {} failed: {}",
                args.first().copied().unwrap_or(""),
                stderr.trim()
            )));
        }
        Ok(output.stdout)
    }

    /// Resolves `rev` to a full commit hash.
    pub fn resolve_commit(&self, rev: &str) -> Result<String> {
        let spec = format!("{rev}^{{commit}}");
        let out = self
            .run(&["rev-parse", "--verify", "--quiet", &spec])
            .map_err(|_| Failure::io(format!("commit not found: {rev}")))?;
        Ok(String::from_utf8_lossy(&out).trim().to_string())
    }

    /// First-parent chain from the root commit up to `tip`, oldest first.
    pub fn first_parent_chain(&self, tip: &str) -> Result<Vec<CommitInfo>> {
        let out = self.run(&[
            "rev-list",
            "--first-parent",
            "--reverse",
            "--format=%H%x09%P%x09%ae%x09%ct",
            tip,
        ])?;
        let text = String::from_utf8_lossy(&out);
        let mut commits = Vec::new();
        for line in text.lines() {
            // rev-list prefixes every formatted entry with a `commit <sha>` line.
            if line.starts_with("commit ") {
                continue;
            }
            let mut fields = line.split('\t');
            let (id, parents, email, ts) = match (
                fields.next(),
                fields.next(),
                fields.next(),
                fields.next(),
            ) {
                (Some(a), Some(b), Some(c), Some(d)) => (a, b, c, d),
                _ => {
                    return Err(Failure::data(format!(
                        "unexpected rev-list output line: `{line}`"
                    )))
                }
            };
            let timestamp: i64 = ts.parse().map_err(|_| {
                Failure::data(format!("bad commit timestamp `{ts}` for {id}"))
            })?;
            commits.push(CommitInfo {
                id: id.to_string(),
                first_parent: parents.split_whitespace().next().map(String::from),
                author_email: email.to_ascii_lowercase(),
                timestamp,
            });
        }
        Ok(commits)
    }

    /// Diff of `commit` against its first parent (or the empty tree for a
    /// root commit), with rename detection and zero context lines.
    pub fn diff_first_parent(&self, commit: &CommitInfo) -> Result<Vec<DiffFile>> {
        let out = match &commit.first_parent {
            Some(parent) => self.run(&[
                "diff-tree",
                "-r",
                RENAME_THRESHOLD,
                "-U0",
                "--no-color",
                "--no-commit-id",
                parent,
                &commit.id,
            ])?,
            None => self.run(&[
                "diff-tree",
                "--root",
                "-r",
                RENAME_THRESHOLD,
                "-U0",
                "--no-color",
                "--no-commit-id",
                &commit.id,
            ])?,
        };
        parse_diff(&String::from_utf8_lossy(&out))
    }

    /// Diff between two arbitrary commits, same options as the miner uses.
    pub fn diff_commits(&self, old: &str, new: &str) -> Result<Vec<DiffFile>> {
        let out = self.run(&[
            "diff-tree",
            "-r",
            RENAME_THRESHOLD,
            "-U0",
            "--no-color",
            "--no-commit-id",
            old,
            new,
        ])?;
        parse_diff(&String::from_utf8_lossy(&out))
    }

    /// File paths present in `commit`, repo-relative, sorted by git.
    pub fn list_files(&self, commit: &str) -> Result<Vec<String>> {
        let out = self.run(&["ls-tree", "-r", "-z", "--name-only", commit])?;
        Ok(out
            .split(|b| *b == 0)
            .filter(|chunk| !chunk.is_empty())
            .map(|chunk| String::from_utf8_lossy(chunk).into_owned())
            .collect())
    }

    /// Content of `path` as of `commit`. Undecodable bytes do not fail the
    /// pipeline; the caller records a diagnostic and carries the file.
    pub fn read_blob(&self, commit: &str, path: &str) -> Result<Blob> {
        let spec = format!("{commit}:{path}");
        let bytes = match self.run(&["show", &spec]) {
            Ok(bytes) => bytes,
            Err(e) => return Ok(Blob::Unreadable(e.message)),
        };
        match String::from_utf8(bytes) {
            Ok(text) => Ok(Blob::Text(text)),
            Err(_) => Ok(Blob::Unreadable(format!("{spec} is not valid UTF-8"))),
        }
    }
}

/// Undoes git's C-style path quoting (`"a\303\244.js"` and friends).
fn unquote_path(raw: &str) -> String {
    let inner = match raw.strip_prefix('"').and_then(|r| r.strip_suffix('"')) {
        Some(inner) => inner,
        None => return raw.to_string(),
    };
    let mut bytes = Vec::with_capacity(inner.len());
    let mut chars = inner.bytes().peekable();
    while let Some(b) = chars.next() {
        if b != b'\\' {
            bytes.push(b);
            continue;
        }
        match chars.next() {
            Some(b'n') => bytes.push(b'\n'),
            Some(b't') => bytes.push(b'\t'),
            Some(b'r') => bytes.push(b'\r'),
            Some(b'\\') => bytes.push(b'\\'),
            Some(b'"') => bytes.push(b'"'),
            Some(d @ b'0'..=b'7') => {
                let mut value = (d - b'0') as u32;
                for _ in 0..2 {
                    match chars.peek() {
                        Some(d @ b'0'..=b'7') => {
                            value = value * 8 + (*d - b'0') as u32;
                            chars.next();
                        }
                        _ => break,
                    }
                }
                bytes.push(value as u8);
            }
            Some(other) => bytes.push(other),
            None => break,
        }
    }
    String::from_utf8_lossy(&bytes).into_owned()
}

/// Strips the diff prefix (`a/` or `b/`) from a `---`/`+++` path, handling
/// `/dev/null` and quoted paths.
fn marker_path(raw: &str) -> Option<String> {
    if raw == "/dev/null" {
        return None;
    }
    let unquoted = unquote_path(raw);
    let stripped = unquoted
        .strip_prefix("a/")
        .or_else(|| unquoted.strip_prefix("b/"))
        .unwrap_or(&unquoted);
    Some(stripped.to_string())
}

fn parse_hunk_header(line: &str) -> Option<Hunk> {
    // `@@ -a[,b] +c[,d] @@ ...`; an omitted length means 1.
    let rest = line.strip_prefix("@@ -")?;
    let (old_part, rest) = rest.split_once(" +")?;
    let (new_part, _) = rest.split_once(" @@")?;
    let parse_pair = |part: &str| -> Option<(u32, u32)> {
        match part.split_once(',') {
            Some((s, l)) => Some((s.parse().ok()?, l.parse().ok()?)),
            None => Some((part.parse().ok()?, 1)),
        }
    };
    let (old_start, old_len) = parse_pair(old_part)?;
    let (new_start, new_len) = parse_pair(new_part)?;
    Some(Hunk { old_start, old_len, new_start, new_len })
}

/// Parses `diff-tree -U0` patch output into per-file changes. Only structure
/// is kept: hunk positions, paths, and a binary flag. Content lines are not
/// needed because post-images are read from the object store.
pub fn parse_diff(text: &str) -> Result<Vec<DiffFile>> {
    let mut files: Vec<DiffFile> = Vec::new();
    let mut current: Option<DiffFile> = None;
    let mut rename: (Option<String>, Option<String>) = (None, None);

    let flush = |files: &mut Vec<DiffFile>,
                 current: &mut Option<DiffFile>,
                 rename: &mut (Option<String>, Option<String>)| {
        if let Some(mut file) = current.take() {
            if rename.0.is_some() {
                file.old_path = rename.0.take();
                file.new_path = rename.1.take();
            }
            // Blocks with no path at all (mode-only changes name their file
            // solely on the ambiguous `diff --git` line) carry no content
            // change and are dropped.
            if file.old_path.is_some() || file.new_path.is_some() {
                files.push(file);
            }
        }
        *rename = (None, None);
    };

    for line in text.lines() {
        if line.starts_with("diff --git ") {
            flush(&mut files, &mut current, &mut rename);
            current = Some(DiffFile::default());
            continue;
        }
        let Some(file) = current.as_mut() else { continue };

        if let Some(raw) = line.strip_prefix("rename from ") {
            rename.0 = Some(unquote_path(raw));
        } else if let Some(raw) = line.strip_prefix("rename to ") {
            rename.1 = Some(unquote_path(raw));
        } else if let Some(raw) = line.strip_prefix("--- ") {
            file.old_path = marker_path(raw);
        } else if let Some(raw) = line.strip_prefix("+++ ") {
            file.new_path = marker_path(raw);
        } else if line.starts_with("@@ -") {
            let hunk = parse_hunk_header(line)
                .ok_or_else(|| Failure::data(format!("bad hunk header: `{line}`")))?;
            file.hunks.push(hunk);
        } else if let Some(rest) = line.strip_prefix("Binary files ") {
            file.binary = true;
            // Binary blocks have no ---/+++ markers; recover the paths from
            // `Binary files <old> and <new> differ`.
            if let Some(pair) = rest.strip_suffix(" differ") {
                if let Some((old, new)) = pair.split_once(" and ") {
                    file.old_path = marker_path(old);
                    file.new_path = marker_path(new);
                }
            }
        } else if line == "GIT binary patch" {
            file.binary = true;
        }
    }
    flush(&mut files, &mut current, &mut rename);
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn test_parse_modify_add_delete() {
        let text = "\
diff --git a/src/a.js b/src/a.js
index 111..222 100644
--- a/src/a.js
+++ b/src/a.js
@@ -3,2 +3,4 @@ function f() {
-x
+y
diff --git a/new.js b/new.js
new file mode 100644
index 000..333
--- /dev/null
+++ b/new.js
@@ -0,0 +1,5 @@
+a
diff --git a/gone.js b/gone.js
deleted file mode 100644
index 444..000
--- a/gone.js
+++ /dev/null
@@ -1,7 +0,0 @@
-b
";
        let files = parse_diff(text).unwrap();
        assert_eq!(files.len(), 3);
        assert_eq!(files[0].old_path.as_deref(), Some("src/a.js"));
        assert_eq!(files[0].new_path.as_deref(), Some("src/a.js"));
        assert_eq!(
            files[0].hunks,
            vec![Hunk { old_start: 3, old_len: 2, new_start: 3, new_len: 4 }]
        );
        assert_eq!(files[1].old_path, None);
        assert_eq!(
            files[1].hunks,
            vec![Hunk { old_start: 0, old_len: 0, new_start: 1, new_len: 5 }]
        );
        assert_eq!(files[2].new_path, None);
        assert_eq!(
            files[2].hunks,
            vec![Hunk { old_start: 1, old_len: 7, new_start: 0, new_len: 0 }]
        );
    }

    #[test]
    fn test_parse_pure_rename_has_no_hunks() {
        let text = "\
diff --git a/old name.js b/new name.js
similarity index 100%
rename from old name.js
rename to new name.js
";
        let files = parse_diff(text).unwrap();
        assert_eq!(files.len(), 1);
        assert_eq!(files[0].old_path.as_deref(), Some("old name.js"));
        assert_eq!(files[0].new_path.as_deref(), Some("new name.js"));
        assert!(files[0].hunks.is_empty());
    }

    #[test]
    fn test_parse_rename_with_edits() {
        let text = "\
diff --git a/a.js b/b.js
similarity index 90%
rename from a.js
rename to b.js
index 111..222 100644
--- a/a.js
+++ b/b.js
@@ -10 +10,2 @@
-x
+y
+z
";
        let files = parse_diff(text).unwrap();
        assert_eq!(files[0].old_path.as_deref(), Some("a.js"));
        assert_eq!(files[0].new_path.as_deref(), Some("b.js"));
        assert_eq!(
            files[0].hunks,
            vec![Hunk { old_start: 10, old_len: 1, new_start: 10, new_len: 2 }]
        );
    }

    #[test]
    fn test_parse_binary_flag() {
        let text = "\
diff --git a/blob.js b/blob.js
index 111..222 100644
Binary files a/blob.js and b/blob.js differ
";
        let files = parse_diff(text).unwrap();
        assert!(files[0].binary);
        assert!(files[0].hunks.is_empty());
        assert_eq!(files[0].old_path.as_deref(), Some("blob.js"));
        assert_eq!(files[0].new_path.as_deref(), Some("blob.js"));
    }

    #[test]
    fn test_unquote_octal_utf8() {
        assert_eq!(unquote_path(r#""caf\303\251.js""#), "café.js");
        assert_eq!(unquote_path(r#""tab\there""#), "tab\there");
        assert_eq!(unquote_path("plain.js"), "plain.js");
    }

    #[test]
    fn test_zero_length_hunk_convention() {
        // Insertion after old line 4: old side is `-4,0`.
        let h = parse_hunk_header("@@ -4,0 +5,3 @@").unwrap();
        assert_eq!(h, Hunk { old_start: 4, old_len: 0, new_start: 5, new_len: 3 });
    }
}
