//! CSV artifact formats passed between pipeline stages.
//!
//! Every stage writes plain CSV with a fixed header and reads its inputs back
//! strictly: a header that does not match byte for byte is rejected rather
//! than guessed at. Floats are written with Rust's shortest round-trip
//! formatting, so a value survives write/read cycles bit for bit and equal
//! runs produce identical bytes.

use std::path::Path;

use vulnjs_core::dataset::{csv_header, Dataset, LabeledSample};
use vulnjs_core::metrics::{StaticVector, STATIC_COLUMNS};
use vulnjs_core::process::{ProcessVector, PROCESS_COLUMNS};
use vulnjs_core::{FunctionKey, SourceSpan};

use crate::errors::{Failure, Result};

/// Columns identifying one function in every per-function table.
const KEY_COLUMNS: [&str; 4] = ["path", "name", "start_line", "end_line"];

fn csv_failure(path: &Path, err: csv::Error) -> Failure {
    if err.is_io_error() {
        Failure::io_ctx(path.display(), err)
    } else {
        Failure::data(format!("{}: {err}", path.display()))
    }
}

fn open_reader(path: &Path) -> Result<csv::Reader<std::fs::File>> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| csv_failure(path, e))
}

fn open_writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    csv::WriterBuilder::new()
        .from_path(path)
        .map_err(|e| csv_failure(path, e))
}

fn check_header(path: &Path, reader: &mut csv::Reader<std::fs::File>, expected: &[&str]) -> Result<()> {
    let got = reader.headers().map_err(|e| csv_failure(path, e))?;
    if got.len() != expected.len() || got.iter().zip(expected).any(|(g, e)| g != *e) {
        return Err(Failure::data(format!(
            "{}: header mismatch, expected `{}` got `{}`",
            path.display(),
            expected.join(","),
            got.iter().collect::<Vec<_>>().join(","),
        )));
    }
    Ok(())
}

fn parse_f64(path: &Path, row: usize, column: &str, raw: &str) -> Result<f64> {
    raw.parse().map_err(|_| {
        Failure::data(format!(
            "{} row {row}: column {column} is not a number: `{raw}`",
            path.display()
        ))
    })
}

fn parse_u32(path: &Path, row: usize, column: &str, raw: &str) -> Result<u32> {
    raw.parse().map_err(|_| {
        Failure::data(format!(
            "{} row {row}: column {column} is not an integer: `{raw}`",
            path.display()
        ))
    })
}

fn key_fields(key: &FunctionKey) -> [String; 4] {
    [
        key.file_path.clone(),
        key.qualified_name.clone(),
        key.start_line().to_string(),
        key.end_line().to_string(),
    ]
}

/// Keys read back from CSV carry line positions only; columns are not stored.
fn parse_key(path: &Path, row: usize, fields: &csv::StringRecord) -> Result<FunctionKey> {
    let start = parse_u32(path, row, "start_line", &fields[2])?;
    let end = parse_u32(path, row, "end_line", &fields[3])?;
    Ok(FunctionKey::new(
        &fields[0],
        &fields[1],
        SourceSpan::new(start, 0, end, 0),
    ))
}

/// Rebuilds a [`StaticVector`] from a row in column order, checking that the
/// alias columns (CYCL and PARAMS) agree with their canonical twins.
pub fn static_from_row(path: &Path, row: usize, values: &[f64]) -> Result<StaticVector> {
    debug_assert_eq!(values.len(), STATIC_COLUMNS.len());
    if values[7] != values[6] {
        return Err(Failure::data(format!(
            "{} row {row}: CYCL ({}) disagrees with McCC ({})",
            path.display(),
            values[7],
            values[6]
        )));
    }
    if values[24] != values[23] {
        return Err(Failure::data(format!(
            "{} row {row}: PARAMS ({}) disagrees with NUMPAR ({})",
            path.display(),
            values[24],
            values[23]
        )));
    }
    Ok(StaticVector {
        cc: values[0],
        ccl: values[1],
        cco: values[2],
        ci: values[3],
        clc: values[4],
        ldc: values[5],
        mccc: values[6],
        nii: values[8],
        nl: values[9],
        nle: values[10],
        noi: values[11],
        cd: values[12],
        tcd: values[13],
        cloc: values[14],
        tcloc: values[15],
        dloc: values[16],
        lloc: values[17],
        tlloc: values[18],
        loc: values[19],
        tloc: values[20],
        nos: values[21],
        tnos: values[22],
        numpar: values[23],
        hor_d: values[25],
        hor_t: values[26],
        hon_d: values[27],
        hon_t: values[28],
        hlen: values[29],
        hvoc: values[30],
        hdiff: values[31],
        hvol: values[32],
        heff: values[33],
        hbugs: values[34],
        htime: values[35],
        cycl_dens: values[36],
        warning_info: values[37],
        warning_minor: values[38],
        warning_major: values[39],
        warning_critical: values[40],
        warning_blocker: values[41],
    })
}

pub fn process_from_row(values: &[f64]) -> ProcessVector {
    debug_assert_eq!(values.len(), PROCESS_COLUMNS.len());
    ProcessVector {
        avgnoal: values[0],
        avgnodl: values[1],
        avgnoemt: values[2],
        avgnoml: values[3],
        avgtbc: values[4],
        cchurn: values[5],
        mnoal: values[6],
        mnodl: values[7],
        mnoemt: values[8],
        mnoml: values[9],
        noadd: values[10],
        nocc: values[11],
        nochg: values[12],
        nocontr: values[13],
        nodel: values[14],
        nomod: values[15],
        soadd: values[16],
        sodel: values[17],
        somod: values[18],
    }
}

fn push_f64s(record: &mut Vec<String>, values: &[f64]) {
    record.extend(values.iter().map(|v| v.to_string()));
}

pub fn write_static_csv(path: &Path, rows: &[(FunctionKey, StaticVector)]) -> Result<()> {
    let mut w = open_writer(path)?;
    let header: Vec<&str> = KEY_COLUMNS.iter().copied().chain(STATIC_COLUMNS).collect();
    w.write_record(&header).map_err(|e| csv_failure(path, e))?;
    for (key, vector) in rows {
        let mut record: Vec<String> = key_fields(key).into();
        push_f64s(&mut record, &vector.to_row());
        w.write_record(&record).map_err(|e| csv_failure(path, e))?;
    }
    w.flush().map_err(|e| Failure::io_ctx(path.display(), e))
}

pub fn read_static_csv(path: &Path) -> Result<Vec<(FunctionKey, StaticVector)>> {
    let mut r = open_reader(path)?;
    let header: Vec<&str> = KEY_COLUMNS.iter().copied().chain(STATIC_COLUMNS).collect();
    check_header(path, &mut r, &header)?;
    let mut rows = Vec::new();
    for (i, record) in r.records().enumerate() {
        let record = record.map_err(|e| csv_failure(path, e))?;
        let row = i + 2; // 1-based, after the header line
        let key = parse_key(path, row, &record)?;
        let mut values = [0.0; 42];
        for (slot, (column, raw)) in values
            .iter_mut()
            .zip(STATIC_COLUMNS.iter().zip(record.iter().skip(4)))
        {
            *slot = parse_f64(path, row, column, raw)?;
        }
        rows.push((key, static_from_row(path, row, &values)?));
    }
    Ok(rows)
}

pub fn write_process_csv(path: &Path, rows: &[(FunctionKey, ProcessVector)]) -> Result<()> {
    let mut w = open_writer(path)?;
    let header: Vec<&str> = KEY_COLUMNS.iter().copied().chain(PROCESS_COLUMNS).collect();
    w.write_record(&header).map_err(|e| csv_failure(path, e))?;
    for (key, vector) in rows {
        let mut record: Vec<String> = key_fields(key).into();
        push_f64s(&mut record, &vector.to_row());
        w.write_record(&record).map_err(|e| csv_failure(path, e))?;
    }
    w.flush().map_err(|e| Failure::io_ctx(path.display(), e))
}

pub fn read_process_csv(path: &Path) -> Result<Vec<(FunctionKey, ProcessVector)>> {
    let mut r = open_reader(path)?;
    let header: Vec<&str> = KEY_COLUMNS.iter().copied().chain(PROCESS_COLUMNS).collect();
    check_header(path, &mut r, &header)?;
    let mut rows = Vec::new();
    for (i, record) in r.records().enumerate() {
        let record = record.map_err(|e| csv_failure(path, e))?;
        let row = i + 2;
        let key = parse_key(path, row, &record)?;
        let mut values = [0.0; 19];
        for (slot, (column, raw)) in values
            .iter_mut()
            .zip(PROCESS_COLUMNS.iter().zip(record.iter().skip(4)))
        {
            *slot = parse_f64(path, row, column, raw)?;
        }
        rows.push((key, process_from_row(&values)));
    }
    Ok(rows)
}

pub fn write_labels_csv(path: &Path, rows: &[(FunctionKey, String)]) -> Result<()> {
    let mut w = open_writer(path)?;
    let header: Vec<&str> = KEY_COLUMNS.iter().copied().chain(["advisory"]).collect();
    w.write_record(&header).map_err(|e| csv_failure(path, e))?;
    for (key, advisory) in rows {
        let mut record: Vec<String> = key_fields(key).into();
        record.push(advisory.clone());
        w.write_record(&record).map_err(|e| csv_failure(path, e))?;
    }
    w.flush().map_err(|e| Failure::io_ctx(path.display(), e))
}

pub fn read_labels_csv(path: &Path) -> Result<Vec<(FunctionKey, String)>> {
    let mut r = open_reader(path)?;
    let header: Vec<&str> = KEY_COLUMNS.iter().copied().chain(["advisory"]).collect();
    check_header(path, &mut r, &header)?;
    let mut rows = Vec::new();
    for (i, record) in r.records().enumerate() {
        let record = record.map_err(|e| csv_failure(path, e))?;
        let key = parse_key(path, i + 2, &record)?;
        rows.push((key, record[4].to_string()));
    }
    Ok(rows)
}

pub fn write_dataset_csv(path: &Path, dataset: &Dataset) -> Result<()> {
    let mut w = open_writer(path)?;
    w.write_record(&csv_header()).map_err(|e| csv_failure(path, e))?;
    for sample in dataset.samples() {
        let mut record = vec![sample.project.clone()];
        record.extend(key_fields(&sample.key));
        push_f64s(&mut record, &sample.statics.to_row());
        push_f64s(&mut record, &sample.process.to_row());
        record.push(sample.label.to_string());
        w.write_record(&record).map_err(|e| csv_failure(path, e))?;
    }
    w.flush().map_err(|e| Failure::io_ctx(path.display(), e))
}

pub fn read_dataset_csv(path: &Path) -> Result<Dataset> {
    let mut r = open_reader(path)?;
    let header = csv_header();
    check_header(path, &mut r, &header)?;
    let mut samples = Vec::new();
    for (i, record) in r.records().enumerate() {
        let record = record.map_err(|e| csv_failure(path, e))?;
        let row = i + 2;
        let project = record[0].to_string();
        let start = parse_u32(path, row, "start_line", &record[3])?;
        let end = parse_u32(path, row, "end_line", &record[4])?;
        let key = FunctionKey::new(&record[1], &record[2], SourceSpan::new(start, 0, end, 0));

        let mut statics = [0.0; 42];
        let mut process = [0.0; 19];
        let mut cells = record.iter().skip(5);
        for (slot, column) in statics.iter_mut().zip(STATIC_COLUMNS) {
            *slot = parse_f64(path, row, column, cells.next().unwrap_or(""))?;
        }
        for (slot, column) in process.iter_mut().zip(PROCESS_COLUMNS) {
            *slot = parse_f64(path, row, column, cells.next().unwrap_or(""))?;
        }
        let label = match cells.next() {
            Some("0") => 0,
            Some("1") => 1,
            other => {
                return Err(Failure::data(format!(
                    "{} row {row}: label must be 0 or 1, got `{}`",
                    path.display(),
                    other.unwrap_or("")
                )))
            }
        };
        samples.push(LabeledSample {
            project,
            key,
            statics: static_from_row(path, row, &statics)?,
            process: process_from_row(&process),
            label,
        });
    }
    Dataset::new(samples).map_err(|e| Failure::data(format!("{}: {e}", path.display())))
}

/// Writes a single-column 0/1 CSV (used for predictions and truth vectors).
pub fn write_bit_column(path: &Path, header: &str, values: &[u8]) -> Result<()> {
    let mut w = open_writer(path)?;
    w.write_record([header]).map_err(|e| csv_failure(path, e))?;
    for v in values {
        w.write_record([v.to_string()]).map_err(|e| csv_failure(path, e))?;
    }
    w.flush().map_err(|e| Failure::io_ctx(path.display(), e))
}

pub fn read_bit_column(path: &Path, header: &str) -> Result<Vec<u8>> {
    let mut r = open_reader(path)?;
    check_header(path, &mut r, &[header])?;
    let mut values = Vec::new();
    for (i, record) in r.records().enumerate() {
        let record = record.map_err(|e| csv_failure(path, e))?;
        match &record[0] {
            "0" => values.push(0),
            "1" => values.push(1),
            other => {
                return Err(Failure::data(format!(
                    "{} row {}: expected 0 or 1, got `{other}`",
                    path.display(),
                    i + 2
                )))
            }
        }
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_key(name: &str, start: u32) -> FunctionKey {
        FunctionKey::new("src/a.js", name, SourceSpan::new(start, 0, start + 4, 0))
    }

    #[test]
    fn test_static_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("static.csv");
        let mut v = StaticVector::default();
        v.mccc = 3.0;
        v.hvol = 123.456789012345;
        v.cd = 1.0 / 3.0;
        let rows = vec![(sample_key("f", 1), v), (sample_key("g", 10), StaticVector::default())];
        write_static_csv(&path, &rows).unwrap();
        assert_eq!(read_static_csv(&path).unwrap(), rows);
    }

    #[test]
    fn test_process_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("process.csv");
        let mut v = ProcessVector::default();
        v.avgtbc = 2600.0 / 3.0;
        v.nochg = 4.0;
        let rows = vec![(sample_key("f", 1), v)];
        write_process_csv(&path, &rows).unwrap();
        assert_eq!(read_process_csv(&path).unwrap(), rows);
    }

    #[test]
    fn test_dataset_round_trip_and_label_check() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("dataset.csv");
        let mut statics = StaticVector::default();
        statics.loc = 7.0;
        let sample = LabeledSample {
            project: "demo".into(),
            key: sample_key("f", 1),
            statics,
            process: ProcessVector::default(),
            label: 1,
        };
        let dataset = Dataset::new(vec![sample]).unwrap();
        write_dataset_csv(&path, &dataset).unwrap();
        assert_eq!(read_dataset_csv(&path).unwrap(), dataset);

        let text = std::fs::read_to_string(&path).unwrap().replace(",1\n", ",2\n");
        std::fs::write(&path, text).unwrap();
        let err = read_dataset_csv(&path).unwrap_err();
        assert!(err.message.contains("label"), "{err}");
    }

    #[test]
    fn test_alias_disagreement_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("static.csv");
        write_static_csv(&path, &[(sample_key("f", 1), StaticVector::default())]).unwrap();
        // Corrupt the CYCL cell only: the header has 46 columns, CYCL is index 11.
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines: Vec<String> = text.lines().map(String::from).collect();
        let mut cells: Vec<String> = lines[1].split(',').map(String::from).collect();
        cells[11] = "9".into();
        lines[1] = cells.join(",");
        std::fs::write(&path, lines.join("\n")).unwrap();
        let err = read_static_csv(&path).unwrap_err();
        assert!(err.message.contains("CYCL"), "{err}");
    }

    #[test]
    fn test_header_mismatch_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bits.csv");
        write_bit_column(&path, "pred", &[1, 0, 1]).unwrap();
        assert_eq!(read_bit_column(&path, "pred").unwrap(), vec![1, 0, 1]);
        let err = read_bit_column(&path, "label").unwrap_err();
        assert!(err.message.contains("header mismatch"), "{err}");
    }
}
