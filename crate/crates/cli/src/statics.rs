//! `extract-static`: walk a source tree and emit the static feature table.

use std::collections::BTreeMap;
use std::path::Path;

use vulnjs_core::metrics::{self, StaticVector};
use vulnjs_core::FunctionKey;

use crate::config::{self, AppConfig};
use crate::csvio;
use crate::errors::{Failure, Result};

pub const OUTPUT_NAME: &str = "static.csv";

/// Collects `.js` sources under `root`, keyed by their forward-slash
/// relative path, skipping anything that is not valid UTF-8.
fn collect_sources(root: &Path) -> Result<(Vec<(String, String)>, usize)> {
    if !root.is_dir() {
        return Err(Failure::io(format!("not a directory: {}", root.display())));
    }
    let mut sources = Vec::new();
    let mut skipped = 0;
    let mut entries: Vec<_> = Vec::new();
    for entry in walkdir::WalkDir::new(root) {
        let entry = entry.map_err(|e| Failure::io_ctx(root.display(), e))?;
        if entry.file_type().is_file()
            && entry.path().extension().is_some_and(|e| e == "js")
        {
            entries.push(entry.into_path());
        }
    }
    entries.sort();
    for path in entries {
        let rel = path
            .strip_prefix(root)
            .expect("walked path is under root")
            .to_string_lossy()
            .replace('\\', "/");
        match std::fs::read(&path) {
            Ok(bytes) => match String::from_utf8(bytes) {
                Ok(text) => sources.push((rel, text)),
                Err(_) => {
                    eprintln!("skipping {rel}: not valid UTF-8");
                    skipped += 1;
                }
            },
            Err(e) => return Err(Failure::io_ctx(path.display(), e)),
        }
    }
    Ok((sources, skipped))
}

/// Flattens analyzed files into sorted `(key, vector)` rows.
pub fn rows_from_analysis(
    files: &[metrics::AnalyzedFile],
) -> Vec<(FunctionKey, StaticVector)> {
    let mut rows: Vec<(FunctionKey, StaticVector)> = files
        .iter()
        .flat_map(|f| {
            f.records
                .iter()
                .zip(&f.vectors)
                .map(|(r, v)| (r.key.clone(), *v))
        })
        .collect();
    rows.sort_by(|a, b| {
        (&a.0.file_path, a.0.span.start_line, &a.0.qualified_name).cmp(&(
            &b.0.file_path,
            b.0.span.start_line,
            &b.0.qualified_name,
        ))
    });
    rows
}

pub fn run(
    src_dir: &Path,
    out_dir: &Path,
    cfg: &AppConfig,
    config_file: Option<&Path>,
) -> Result<()> {
    let (sources, skipped) = collect_sources(src_dir)?;
    let files = metrics::analyze_project(&sources, &cfg.metrics)
        .map_err(|e| Failure::config(e.to_string()))?;

    let partial = files.iter().filter(|f| f.partial).count();
    let rows = rows_from_analysis(&files);

    config::ensure_out_dir(out_dir)?;
    let out_path = out_dir.join(OUTPUT_NAME);
    csvio::write_static_csv(&out_path, &rows)?;

    let mut args = BTreeMap::new();
    args.insert("src", src_dir.display().to_string());
    args.insert("out", out_dir.display().to_string());
    config::write_run_record(out_dir, "extract-static", cfg, config_file, &args)?;

    println!(
        "analyzed {} files ({} functions); {} skipped, {} parsed partially",
        sources.len(),
        rows.len(),
        skipped,
        partial
    );
    println!("wrote {}", out_path.display());
    Ok(())
}
