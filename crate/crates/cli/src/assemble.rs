//! `assemble`: join the per-stage feature tables into one labeled dataset.
//!
//! The native path inner-joins the static and process tables on the function
//! key and applies the label set. The import path converts an externally
//! published dataset CSV into the same format, driven by a column-mapping
//! file, so published data can flow through the same training commands.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;
use vulnjs_core::dataset::{feature_columns, join, Dataset, FeatureSelection, LabeledSample};
use vulnjs_core::{FunctionKey, SourceSpan};

use crate::config::{self, AppConfig};
use crate::csvio;
use crate::errors::{Failure, Result};

pub const OUTPUT_NAME: &str = "dataset.csv";

pub fn run_native(
    project: &str,
    statics_path: &Path,
    process_path: &Path,
    labels_path: Option<&Path>,
    out_dir: &Path,
    cfg: &AppConfig,
    config_file: Option<&Path>,
) -> Result<()> {
    let statics = csvio::read_static_csv(statics_path)?;
    let process = csvio::read_process_csv(process_path)?;
    let mut vulnerable: Vec<FunctionKey> = match labels_path {
        Some(p) => csvio::read_labels_csv(p)?.into_iter().map(|(k, _)| k).collect(),
        None => Vec::new(),
    };
    vulnerable.dedup();

    let (dataset, report) = join(project, &statics, &process, &vulnerable)
        .map_err(|e| Failure::data(e.to_string()))?;

    config::ensure_out_dir(out_dir)?;
    let out_path = out_dir.join(OUTPUT_NAME);
    csvio::write_dataset_csv(&out_path, &dataset)?;

    let mut args = BTreeMap::new();
    args.insert("project", project.to_string());
    args.insert("statics", statics_path.display().to_string());
    args.insert("process", process_path.display().to_string());
    if let Some(p) = labels_path {
        args.insert("labels", p.display().to_string());
    }
    args.insert("out", out_dir.display().to_string());
    config::write_run_record(out_dir, "assemble", cfg, config_file, &args)?;

    let (pos, neg) = dataset.class_counts();
    println!(
        "joined {} functions ({} vulnerable, {} clean); dropped {} static-only, {} process-only; {} labels unmatched",
        report.joined, pos, neg, report.static_only, report.process_only, report.unmatched_labels
    );
    println!("wrote {}", out_path.display());
    Ok(())
}

/// Column mapping for importing an externally published dataset. Every
/// feature column defaults to its own name; only deviations need listing.
#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ImportMapping {
    pub path_column: String,
    pub name_column: String,
    /// Optional; when absent, row order synthesizes unique line numbers.
    pub start_line_column: Option<String>,
    pub end_line_column: Option<String>,
    pub label_column: String,
    /// Optional per-row project column; the CLI `--project` value otherwise.
    pub project_column: Option<String>,
    pub features: BTreeMap<String, String>,
}

impl Default for ImportMapping {
    fn default() -> Self {
        ImportMapping {
            path_column: "path".into(),
            name_column: "name".into(),
            start_line_column: None,
            end_line_column: None,
            label_column: "label".into(),
            project_column: None,
            features: BTreeMap::new(),
        }
    }
}

fn load_mapping(path: Option<&Path>) -> Result<ImportMapping> {
    match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Failure::io_ctx(p.display(), e))?;
            toml::from_str(&text)
                .map_err(|e| Failure::config(format!("{}: {e}", p.display())))
        }
        None => Ok(ImportMapping::default()),
    }
}

fn parse_label(raw: &str) -> Option<u8> {
    match raw.trim() {
        "0" | "false" => Some(0),
        "1" | "true" => Some(1),
        other => {
            let value: f64 = other.parse().ok()?;
            Some(u8::from(value != 0.0))
        }
    }
}

pub fn run_import(
    project: &str,
    import_path: &Path,
    mapping_path: Option<&Path>,
    out_dir: &Path,
    cfg: &AppConfig,
    config_file: Option<&Path>,
) -> Result<()> {
    let mapping = load_mapping(mapping_path)?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(import_path)
        .map_err(|e| Failure::io_ctx(import_path.display(), e))?;
    let headers = reader
        .headers()
        .map_err(|e| Failure::data(format!("{}: {e}", import_path.display())))?
        .clone();
    let index_of: BTreeMap<&str, usize> =
        headers.iter().enumerate().map(|(i, h)| (h, i)).collect();

    let require = |column: &str| -> Result<usize> {
        index_of.get(column).copied().ok_or_else(|| {
            Failure::config(format!(
                "{}: column `{column}` not found in {}",
                mapping_path.map_or_else(|| "mapping".into(), |p| p.display().to_string()),
                import_path.display()
            ))
        })
    };

    let path_idx = require(&mapping.path_column)?;
    let name_idx = require(&mapping.name_column)?;
    let label_idx = require(&mapping.label_column)?;
    let start_idx = mapping.start_line_column.as_deref().map(require).transpose()?;
    let end_idx = mapping.end_line_column.as_deref().map(require).transpose()?;
    let project_idx = mapping.project_column.as_deref().map(require).transpose()?;

    // Resolve all 61 feature columns up front so one error names every gap.
    let columns = feature_columns(FeatureSelection::All);
    let mut feature_idx = Vec::with_capacity(columns.len());
    let mut missing = Vec::new();
    for feature in &columns {
        let source = mapping
            .features
            .get(*feature)
            .map(String::as_str)
            .unwrap_or(feature);
        match index_of.get(source) {
            Some(i) => feature_idx.push(*i),
            None => missing.push(format!("{feature} (column `{source}`)")),
        }
    }
    if !missing.is_empty() {
        return Err(Failure::config(format!(
            "{}: no source column for {}",
            import_path.display(),
            missing.join(", ")
        )));
    }

    let mut samples = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record =
            record.map_err(|e| Failure::data(format!("{}: {e}", import_path.display())))?;
        let row = i + 2;
        let cell = |idx: usize| -> Result<&str> {
            record.get(idx).ok_or_else(|| {
                Failure::data(format!(
                    "{} row {row}: too few columns",
                    import_path.display()
                ))
            })
        };

        let mut values = Vec::with_capacity(columns.len());
        for (feature, idx) in columns.iter().zip(&feature_idx) {
            let raw = cell(*idx)?;
            let value: f64 = raw.trim().parse().map_err(|_| {
                Failure::data(format!(
                    "{} row {row}: column {feature} is not a number: `{raw}`",
                    import_path.display()
                ))
            })?;
            values.push(value);
        }
        let statics = csvio::static_from_row(import_path, row, &values[..42])?;
        let process = csvio::process_from_row(&values[42..]);

        let label = parse_label(cell(label_idx)?).ok_or_else(|| {
            Failure::data(format!(
                "{} row {row}: unparseable label `{}`",
                import_path.display(),
                cell(label_idx).unwrap_or("")
            ))
        })?;

        let start = match start_idx {
            Some(idx) => cell(idx)?.trim().parse().map_err(|_| {
                Failure::data(format!(
                    "{} row {row}: bad start line `{}`",
                    import_path.display(),
                    cell(idx).unwrap_or("")
                ))
            })?,
            None => (i + 1) as u32,
        };
        let end = match end_idx {
            Some(idx) => cell(idx)?.trim().parse().map_err(|_| {
                Failure::data(format!(
                    "{} row {row}: bad end line `{}`",
                    import_path.display(),
                    cell(idx).unwrap_or("")
                ))
            })?,
            None => start,
        };

        samples.push(LabeledSample {
            project: match project_idx {
                Some(idx) => cell(idx)?.to_string(),
                None => project.to_string(),
            },
            key: FunctionKey::new(
                cell(path_idx)?,
                cell(name_idx)?,
                SourceSpan::new(start, 0, end, 0),
            ),
            statics,
            process,
            label,
        });
    }

    let dataset = Dataset::new(samples)
        .map_err(|e| Failure::data(format!("{}: {e}", import_path.display())))?;

    config::ensure_out_dir(out_dir)?;
    let out_path = out_dir.join(OUTPUT_NAME);
    csvio::write_dataset_csv(&out_path, &dataset)?;

    let mut args = BTreeMap::new();
    args.insert("project", project.to_string());
    args.insert("import", import_path.display().to_string());
    if let Some(p) = mapping_path {
        args.insert("mapping", p.display().to_string());
    }
    args.insert("out", out_dir.display().to_string());
    config::write_run_record(out_dir, "assemble", cfg, config_file, &args)?;

    let (pos, neg) = dataset.class_counts();
    println!(
        "imported {} samples ({pos} vulnerable, {neg} clean)",
        dataset.len()
    );
    println!("wrote {}", out_path.display());
    Ok(())
}
