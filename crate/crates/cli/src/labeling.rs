//! `label`: mark the functions a vulnerability fix touched.
//!
//! Each fix commit is diffed against its first parent; the functions of the
//! parent revision whose spans the patch touches are the vulnerable samples
//! for that advisory. Labels are keyed by the parent revision, so feature
//! extraction for a labeled dataset must run against the same revision.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::Deserialize;
use vulnjs_core::dataset::{label_from_fix, FilePatch};
use vulnjs_core::{inventory, lex, parse, FunctionKey};

use crate::config::{self, AppConfig};
use crate::csvio;
use crate::errors::{Failure, Result};
use crate::gitio::{Blob, GitRepo};

pub const OUTPUT_NAME: &str = "labels.csv";

/// One advisory's fix, as listed in the input file. The repository column is
/// informational; every fix is resolved against the repository given on the
/// command line.
#[derive(Debug, Clone, Deserialize)]
pub struct FixRecord {
    #[allow(dead_code)]
    pub repo: String,
    pub fix_commit: String,
    pub advisory_id: String,
}

/// Reads fix records from CSV (`repo,fix_commit,advisory_id`) or a JSON
/// array of objects with the same fields, chosen by file extension.
pub fn read_fixes(path: &Path) -> Result<Vec<FixRecord>> {
    let is_json = path.extension().is_some_and(|e| e == "json");
    if is_json {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::io_ctx(path.display(), e))?;
        return serde_json::from_str(&text)
            .map_err(|e| Failure::data(format!("{}: {e}", path.display())));
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| Failure::io_ctx(path.display(), e))?;
    let headers = reader
        .headers()
        .map_err(|e| Failure::data(format!("{}: {e}", path.display())))?
        .clone();
    let expected = ["repo", "fix_commit", "advisory_id"];
    if headers.iter().ne(expected) {
        return Err(Failure::data(format!(
            "{}: fixes header must be `{}`",
            path.display(),
            expected.join(",")
        )));
    }
    let mut fixes = Vec::new();
    for record in reader.deserialize() {
        let record: FixRecord =
            record.map_err(|e| Failure::data(format!("{}: {e}", path.display())))?;
        fixes.push(record);
    }
    Ok(fixes)
}

/// Function inventory of one revision's `.js` files.
fn revision_inventory(repo: &GitRepo, commit: &str) -> Result<Vec<FunctionKey>> {
    let mut keys = Vec::new();
    for path in repo.list_files(commit)? {
        if !path.ends_with(".js") {
            continue;
        }
        match repo.read_blob(commit, &path)? {
            Blob::Text(text) => {
                let stream = lex::tokenize(&text);
                let parsed = parse::parse(&stream);
                let inv = inventory::inventory_program(&path, &parsed.program);
                keys.extend(inv.records.iter().map(|r| r.key.clone()));
            }
            Blob::Unreadable(reason) => eprintln!("skipping {path}: {reason}"),
        }
    }
    Ok(keys)
}

pub fn run(
    repo_path: &Path,
    fixes_path: &Path,
    out_dir: &Path,
    cfg: &AppConfig,
    config_file: Option<&Path>,
) -> Result<()> {
    let repo = GitRepo::open(repo_path)?;
    let fixes = read_fixes(fixes_path)?;
    if fixes.is_empty() {
        return Err(Failure::data(format!(
            "{}: no fix records",
            fixes_path.display()
        )));
    }

    let mut inventories: HashMap<String, Vec<FunctionKey>> = HashMap::new();
    let mut rows: Vec<(FunctionKey, String)> = Vec::new();
    let mut unusable = 0;

    for fix in &fixes {
        let fix_id = repo.resolve_commit(&fix.fix_commit)?;
        let parent = repo
            .resolve_commit(&format!("{fix_id}^"))
            .map_err(|_| {
                Failure::data(format!(
                    "fix commit {} has no parent to label against",
                    fix.fix_commit
                ))
            })?;

        let patches: Vec<FilePatch> = repo
            .diff_commits(&parent, &fix_id)?
            .into_iter()
            .filter_map(|d| {
                let path = d.old_path?;
                path.ends_with(".js").then(|| FilePatch { path, hunks: d.hunks })
            })
            .collect();

        if !inventories.contains_key(&parent) {
            let inv = revision_inventory(&repo, &parent)?;
            inventories.insert(parent.clone(), inv);
        }
        let inventory = &inventories[&parent];

        match label_from_fix(inventory, &patches) {
            Ok(keys) => {
                if keys.is_empty() {
                    eprintln!(
                        "advisory {}: fix {} touches no tracked function",
                        fix.advisory_id, fix.fix_commit
                    );
                }
                rows.extend(keys.into_iter().map(|k| (k, fix.advisory_id.clone())));
            }
            Err(e) => {
                eprintln!(
                    "advisory {}: fix {} unusable: {e}",
                    fix.advisory_id, fix.fix_commit
                );
                unusable += 1;
            }
        }
    }

    rows.sort_by(|a, b| {
        (&a.0.file_path, a.0.span.start_line, &a.0.qualified_name, &a.1).cmp(&(
            &b.0.file_path,
            b.0.span.start_line,
            &b.0.qualified_name,
            &b.1,
        ))
    });
    rows.dedup();

    config::ensure_out_dir(out_dir)?;
    let out_path = out_dir.join(OUTPUT_NAME);
    csvio::write_labels_csv(&out_path, &rows)?;

    let mut args = BTreeMap::new();
    args.insert("repo", repo_path.display().to_string());
    args.insert("fixes", fixes_path.display().to_string());
    args.insert("out", out_dir.display().to_string());
    config::write_run_record(out_dir, "label", cfg, config_file, &args)?;

    println!(
        "labeled {} function/advisory pairs from {} fixes ({} unusable)",
        rows.len(),
        fixes.len(),
        unusable
    );
    println!("wrote {}", out_path.display());
    Ok(())
}
