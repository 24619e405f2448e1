//! Dataset CSV: header `name,i:<label>...,o:<label>...`, one DMU per row.

use std::collections::HashSet;
use std::io::Read;
use std::path::Path;

use compsbm::{Activity, ReferenceSet};
use thiserror::Error;

/// `row` counts file lines from 1 (the header); `col` counts from 1.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IngestError {
    #[error("cannot read {path}: {reason}")]
    Io { path: String, reason: String },
    #[error("row {row}, column {col}: {reason}")]
    ParseError { row: usize, col: usize, reason: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub input_labels: Vec<String>,
    pub output_labels: Vec<String>,
    pub set: ReferenceSet,
}

fn parse_err(row: usize, col: usize, reason: impl Into<String>) -> IngestError {
    IngestError::ParseError {
        row,
        col,
        reason: reason.into(),
    }
}

pub fn ingest(path: impl AsRef<Path>) -> Result<Dataset, IngestError> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| IngestError::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    parse_dataset(file)
}

pub fn parse_dataset(reader: impl Read) -> Result<Dataset, IngestError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = rdr.headers().map_err(|e| parse_err(1, 1, e.to_string()))?.clone();
    if header.get(0).map_or(true, |h| h != "name") {
        return Err(parse_err(1, 1, "first column must be `name`"));
    }
    // Column kinds, in file order: true = input.
    let mut kinds = Vec::new();
    let (mut input_labels, mut output_labels) = (Vec::new(), Vec::new());
    for (c, h) in header.iter().enumerate().skip(1) {
        if let Some(l) = h.strip_prefix("i:") {
            kinds.push(true);
            input_labels.push(l.to_string());
        } else if let Some(l) = h.strip_prefix("o:") {
            kinds.push(false);
            output_labels.push(l.to_string());
        } else {
            return Err(parse_err(1, c + 1, format!("column `{h}` has neither an `i:` nor an `o:` prefix")));
        }
    }
    if input_labels.is_empty() {
        return Err(parse_err(1, 0, "no inputs"));
    }
    if output_labels.is_empty() {
        return Err(parse_err(1, 0, "no outputs"));
    }

    let mut names = Vec::new();
    let mut seen = HashSet::new();
    let mut dmus = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let row = k + 2;
        let rec = rec.map_err(|e| parse_err(row, 0, e.to_string()))?;
        if rec.len() != header.len() {
            return Err(parse_err(row, 0, format!("expected {} fields, found {}", header.len(), rec.len())));
        }
        let name = rec[0].to_string();
        if name.is_empty() {
            return Err(parse_err(row, 1, "empty name"));
        }
        if !seen.insert(name.clone()) {
            return Err(parse_err(row, 1, format!("duplicate name `{name}`")));
        }
        let (mut x, mut y) = (Vec::new(), Vec::new());
        for (c, is_input) in kinds.iter().enumerate() {
            let col = c + 2;
            let cell = &rec[c + 1];
            let v: f64 = cell
                .parse()
                .map_err(|_| parse_err(row, col, format!("`{cell}` is not a number")))?;
            if !(v.is_finite() && v > 0.0) {
                return Err(parse_err(row, col, format!("`{}` must be positive, got {cell}", &header[c + 1])));
            }
            if *is_input {
                x.push(v);
            } else {
                y.push(v);
            }
        }
        let a = Activity::new(x, y).map_err(|e| parse_err(row, 0, e.to_string()))?;
        names.push(name);
        dmus.push(a);
    }
    if dmus.is_empty() {
        return Err(parse_err(2, 0, "no DMU rows"));
    }
    let set = ReferenceSet::new(names, dmus).map_err(|e| parse_err(0, 0, e.to_string()))?;
    Ok(Dataset {
        input_labels,
        output_labels,
        set,
    })
}

/// Writes a dataset back in the same format (inputs first, then outputs).
pub fn emit(data: &Dataset) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let header: Vec<String> = std::iter::once("name".to_string())
        .chain(data.input_labels.iter().map(|l| format!("i:{l}")))
        .chain(data.output_labels.iter().map(|l| format!("o:{l}")))
        .collect();
    w.write_record(&header).expect("in-memory write");
    for (name, a) in data.set.names().iter().zip(data.set.activities()) {
        let row: Vec<String> = std::iter::once(name.clone())
            .chain(a.inputs().iter().chain(a.outputs()).map(|v| v.to_string()))
            .collect();
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 output")
}
