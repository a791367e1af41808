//! `report` and `mcnemar`: human-readable tables and model comparison.

use std::collections::BTreeMap;
use std::path::Path;

use vulnjs_core::eval::{build_contingency, mcnemar, mcnemar_exact};

use crate::config::{self, AppConfig};
use crate::csvio;
use crate::errors::{Failure, Result};

pub const REPORT_TEXT_NAME: &str = "report.txt";
pub const REPORT_CSV_NAME: &str = "report.csv";
pub const MCNEMAR_NAME: &str = "mcnemar.csv";

/// Longest parameter string shown in the aligned table; the CSV keeps the
/// full value.
const PARAMS_DISPLAY_MAX: usize = 60;

fn shorten(s: &str, max: usize) -> String {
    if s.len() <= max {
        s.to_string()
    } else {
        format!("{}...", &s[..max - 3])
    }
}

/// Renders rows as a text table with every column padded to its widest cell.
fn aligned_table(header: &[String], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(String::len).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let render = |cells: &[String]| -> String {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        padded.join("  ").trim_end().to_string()
    };
    let rule: String = widths
        .iter()
        .map(|w| "-".repeat(*w))
        .collect::<Vec<_>>()
        .join("  ");
    let mut out = String::new();
    out.push_str(&render(header));
    out.push('\n');
    out.push_str(&rule);
    out.push('\n');
    for row in rows {
        out.push_str(&render(row));
        out.push('\n');
    }
    out
}

pub fn run_report(
    results_path: &Path,
    top: Option<usize>,
    out_dir: &Path,
    cfg: &AppConfig,
    config_file: Option<&Path>,
) -> Result<()> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(results_path)
        .map_err(|e| Failure::io_ctx(results_path.display(), e))?;
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| Failure::data(format!("{}: {e}", results_path.display())))?
        .iter()
        .map(String::from)
        .collect();
    if !header.iter().any(|h| h == "params") {
        return Err(Failure::data(format!(
            "{}: not a results table (no `params` column)",
            results_path.display()
        )));
    }
    let mut rows: Vec<Vec<String>> = Vec::new();
    for record in reader.records() {
        let record =
            record.map_err(|e| Failure::data(format!("{}: {e}", results_path.display())))?;
        rows.push(record.iter().map(String::from).collect());
    }
    if let Some(n) = top {
        rows.truncate(n);
    }

    config::ensure_out_dir(out_dir)?;

    // Machine copy first: same columns, rows as selected.
    let csv_path = out_dir.join(REPORT_CSV_NAME);
    let mut w = csv::WriterBuilder::new()
        .from_path(&csv_path)
        .map_err(|e| Failure::io_ctx(csv_path.display(), e))?;
    w.write_record(&header).map_err(|e| Failure::io_ctx(csv_path.display(), e))?;
    for row in &rows {
        w.write_record(row).map_err(|e| Failure::io_ctx(csv_path.display(), e))?;
    }
    w.flush().map_err(|e| Failure::io_ctx(csv_path.display(), e))?;

    // Text table with the params column shortened for readability.
    let params_idx = header.iter().position(|h| h == "params");
    let display_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .map(|(i, cell)| {
                    if Some(i) == params_idx {
                        shorten(cell, PARAMS_DISPLAY_MAX)
                    } else {
                        cell.clone()
                    }
                })
                .collect()
        })
        .collect();
    let table = aligned_table(&header, &display_rows);
    let text_path = out_dir.join(REPORT_TEXT_NAME);
    std::fs::write(&text_path, &table)
        .map_err(|e| Failure::io_ctx(text_path.display(), e))?;

    let mut args = BTreeMap::new();
    args.insert("results", results_path.display().to_string());
    if let Some(n) = top {
        args.insert("top", n.to_string());
    }
    args.insert("out", out_dir.display().to_string());
    config::write_run_record(out_dir, "report", cfg, config_file, &args)?;

    print!("{table}");
    println!("wrote {} and {}", text_path.display(), csv_path.display());
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn run_mcnemar(
    preds_a: &Path,
    preds_b: &Path,
    truth_path: &Path,
    alpha: f64,
    exact: bool,
    out_dir: Option<&Path>,
    cfg: &AppConfig,
    config_file: Option<&Path>,
) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Failure::usage(format!("alpha must be in (0, 1), got {alpha}")));
    }
    let a = csvio::read_bit_column(preds_a, "pred")?;
    let b = csvio::read_bit_column(preds_b, "pred")?;
    let truth = csvio::read_bit_column(truth_path, "label")?;
    let table = build_contingency(&truth, &a, &b)
        .map_err(|e| Failure::data(e.to_string()))?;
    let result = if exact {
        mcnemar_exact(&table, alpha)
    } else {
        mcnemar(&table, alpha)
    };

    println!("both correct      {}", table.cells[0][0]);
    println!("only b wrong      {}", table.cells[0][1]);
    println!("only a wrong      {}", table.cells[1][0]);
    println!("both wrong        {}", table.cells[1][1]);
    println!("statistic         {:.3}", result.statistic);
    println!("p-value           {}", result.p_value);
    println!(
        "null hypothesis   {} at alpha {}",
        result.decision_label(),
        result.alpha
    );

    if let Some(dir) = out_dir {
        config::ensure_out_dir(dir)?;
        let path = dir.join(MCNEMAR_NAME);
        let mut w = csv::WriterBuilder::new()
            .from_path(&path)
            .map_err(|e| Failure::io_ctx(path.display(), e))?;
        w.write_record([
            "both_correct",
            "only_b_wrong",
            "only_a_wrong",
            "both_wrong",
            "statistic",
            "p_value",
            "alpha",
            "decision",
        ])
        .map_err(|e| Failure::io_ctx(path.display(), e))?;
        w.write_record([
            table.cells[0][0].to_string(),
            table.cells[0][1].to_string(),
            table.cells[1][0].to_string(),
            table.cells[1][1].to_string(),
            result.statistic.to_string(),
            result.p_value.to_string(),
            result.alpha.to_string(),
            result.decision_label().to_string(),
        ])
        .map_err(|e| Failure::io_ctx(path.display(), e))?;
        w.flush().map_err(|e| Failure::io_ctx(path.display(), e))?;

        let mut args = BTreeMap::new();
        args.insert("a", preds_a.display().to_string());
        args.insert("b", preds_b.display().to_string());
        args.insert("truth", truth_path.display().to_string());
        args.insert("alpha", alpha.to_string());
        args.insert("exact", exact.to_string());
        args.insert("out", dir.display().to_string());
        config::write_run_record(dir, "mcnemar", cfg, config_file, &args)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
