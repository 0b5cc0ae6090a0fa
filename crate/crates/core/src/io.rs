//! Tabular ingestion and CSV output.
//!
//! Input is either comma-separated text with a header row or a JSON array of
//! records. Every cell of a mapped column must be exactly `0` or `1`; empty
//! cells, other values and ragged rows are rejected with the data row number
//! (1-based, header excluded) and column name. Nothing is dropped or coerced.

use std::io::{Read, Write};
use std::path::Path;

use serde_json::Value;

use crate::error::{Error, Result};
use crate::frame::AuditFrame;

pub const DEFAULT_PRED_COL: &str = "y_predicted";
pub const DEFAULT_CORR_COL: &str = "y_corrected";
pub const DEFAULT_GROUP_COL: &str = "group";
pub const DEFAULT_TRUE_COL: &str = "y_true";

/// Which input columns hold which vector, and how raw cells map to labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnMapping {
    /// Column name, or a 0-based index for header-bearing CSV.
    pub predicted: String,
    /// Absent for prediction-only input: corrected labels start as a copy.
    pub corrected: Option<String>,
    pub group: String,
    pub y_true: Option<String>,
    /// Raw cell value meaning the favorable outcome.
    pub favorable: u8,
    /// Raw cell value meaning privileged group membership.
    pub privileged: u8,
}

impl Default for ColumnMapping {
    fn default() -> Self {
        Self {
            predicted: DEFAULT_PRED_COL.into(),
            corrected: Some(DEFAULT_CORR_COL.into()),
            group: DEFAULT_GROUP_COL.into(),
            y_true: None,
            favorable: 1,
            privileged: 1,
        }
    }
}

impl ColumnMapping {
    fn columns(&self) -> Vec<&str> {
        let mut cols = vec![self.predicted.as_str()];
        cols.extend(self.corrected.as_deref());
        cols.push(self.group.as_str());
        cols.extend(self.y_true.as_deref());
        cols
    }

    fn validate(&self) -> Result<()> {
        if self.favorable > 1 || self.privileged > 1 {
            return Err(Error::Config(format!(
                "favorable ({}) and privileged ({}) values must be 0 or 1",
                self.favorable, self.privileged
            )));
        }
        let cols = self.columns();
        for (i, c) in cols.iter().enumerate() {
            if cols[..i].contains(c) {
                return Err(Error::DuplicateColumn(c.to_string()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    Csv,
    /// JSON array of objects.
    Records,
}

impl InputFormat {
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => InputFormat::Records,
            _ => InputFormat::Csv,
        }
    }
}

/// Raw 0/1 columns in mapping order, before label/group remapping.
struct RawColumns {
    columns: Vec<Vec<u8>>,
}

fn parse_cell(raw: &str, row: usize, column: &str) -> Result<u8> {
    match raw {
        "" => Err(Error::MissingCell {
            row,
            column: column.to_string(),
        }),
        "0" => Ok(0),
        "1" => Ok(1),
        other => Err(Error::NonBinaryCell {
            row,
            column: column.to_string(),
            value: other.to_string(),
        }),
    }
}

fn resolve_column(headers: &csv::StringRecord, name: &str) -> Result<usize> {
    if let Some(i) = headers.iter().position(|h| h == name) {
        return Ok(i);
    }
    match name.parse::<usize>() {
        Ok(i) if i < headers.len() => Ok(i),
        _ => Err(Error::UnknownColumn(name.to_string())),
    }
}

fn read_csv<R: Read>(reader: R, names: &[&str]) -> Result<RawColumns> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| Error::Malformed(format!("header row: {e}")))?
        .clone();
    let indices = names
        .iter()
        .map(|n| resolve_column(&headers, n))
        .collect::<Result<Vec<_>>>()?;

    let mut columns = vec![Vec::new(); names.len()];
    for (i, record) in rdr.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| match e.kind() {
            csv::ErrorKind::UnequalLengths { expected_len, len, .. } => Error::RaggedRow {
                row,
                expected: *expected_len as usize,
                found: *len as usize,
            },
            _ => Error::Malformed(format!("row {row}: {e}")),
        })?;
        for ((col, &idx), name) in columns.iter_mut().zip(&indices).zip(names) {
            col.push(parse_cell(&record[idx], row, name)?);
        }
    }
    Ok(RawColumns { columns })
}

fn read_records<R: Read>(reader: R, names: &[&str]) -> Result<RawColumns> {
    let value: Value = serde_json::from_reader(reader).map_err(|e| Error::Malformed(format!("records: {e}")))?;
    let Value::Array(rows) = value else {
        return Err(Error::Malformed("records input must be a JSON array".into()));
    };
    if let Some(Value::Object(first)) = rows.first() {
        if let Some(missing) = names.iter().find(|n| !first.contains_key(**n)) {
            return Err(Error::UnknownColumn(missing.to_string()));
        }
    }
    let mut columns = vec![Vec::new(); names.len()];
    for (i, item) in rows.iter().enumerate() {
        let row = i + 1;
        let Value::Object(obj) = item else {
            return Err(Error::Malformed(format!("row {row} is not an object")));
        };
        for (col, name) in columns.iter_mut().zip(names) {
            let v = match obj.get(*name) {
                None | Some(Value::Null) => "".to_string(),
                Some(Value::String(s)) => s.trim().to_string(),
                Some(Value::Number(n)) => n.to_string(),
                Some(other) => other.to_string(),
            };
            col.push(parse_cell(&v, row, name)?);
        }
    }
    Ok(RawColumns { columns })
}

fn into_frame(raw: RawColumns, mapping: &ColumnMapping) -> Result<AuditFrame> {
    let mut cols = raw.columns.into_iter();
    let remap = |v: Vec<u8>, one: u8| -> Vec<u8> {
        if one == 1 {
            v
        } else {
            v.into_iter().map(|x| 1 - x).collect()
        }
    };
    let predicted = remap(cols.next().unwrap(), mapping.favorable);
    let corrected = mapping
        .corrected
        .as_ref()
        .map(|_| remap(cols.next().unwrap(), mapping.favorable));
    let group = remap(cols.next().unwrap(), mapping.privileged);
    let y_true = mapping
        .y_true
        .as_ref()
        .map(|_| remap(cols.next().unwrap(), mapping.favorable));
    match corrected {
        Some(c) => AuditFrame::new(predicted, c, group, y_true),
        None => AuditFrame::from_predictions(predicted, group, y_true),
    }
}

pub fn ingest_reader<R: Read>(reader: R, format: InputFormat, mapping: &ColumnMapping) -> Result<AuditFrame> {
    mapping.validate()?;
    let names = mapping.columns();
    let raw = match format {
        InputFormat::Csv => read_csv(reader, &names)?,
        InputFormat::Records => read_records(reader, &names)?,
    };
    into_frame(raw, mapping)
}

/// Read a frame from a file; `.json` files are parsed as records, anything
/// else as CSV.
pub fn ingest(path: &Path, mapping: &ColumnMapping) -> Result<AuditFrame> {
    let file = std::fs::File::open(path).map_err(|source| Error::Read {
        path: path.to_path_buf(),
        source,
    })?;
    ingest_reader(std::io::BufReader::new(file), InputFormat::from_path(path), mapping)
}

/// Write the frame as CSV with the default column names. `y_true` is
/// included when present.
pub fn write_csv<W: Write>(frame: &AuditFrame, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let io_err = |e: csv::Error| Error::Malformed(format!("csv output: {e}"));
    let mut header = vec![DEFAULT_PRED_COL, DEFAULT_CORR_COL, DEFAULT_GROUP_COL];
    if frame.y_true().is_some() {
        header.push(DEFAULT_TRUE_COL);
    }
    w.write_record(&header).map_err(io_err)?;
    let digit = |v: u8| if v == 1 { "1" } else { "0" };
    for i in 0..frame.len() {
        let mut row = vec![
            digit(frame.y_predicted()[i]),
            digit(frame.y_corrected()[i]),
            digit(frame.group()[i]),
        ];
        if let Some(t) = frame.y_true() {
            row.push(digit(t[i]));
        }
        w.write_record(&row).map_err(io_err)?;
    }
    w.flush().map_err(|e| Error::Malformed(format!("csv output: {e}")))?;
    Ok(())
}
