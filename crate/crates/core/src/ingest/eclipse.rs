//! Adapter for the file-level tables of the public Eclipse defect dataset
//! (`files-2.0.csv`, `files-2.1.csv`, `files-3.0.csv`).
//!
//! Field mapping, located by header name so column order does not matter:
//!
//! | dataset column | record field   |
//! |----------------|----------------|
//! | `filename`     | `id`           |
//! | `TLOC`         | `loc`          |
//! | `pre`          | `pre_defects`  |
//! | `post`         | `post_defects` |
//!
//! The archive uses `;` as delimiter; `,` is accepted when the header line
//! contains no `;`. Every other column is ignored.

use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use super::{Dataset, IngestError, ProgramRecord};

const ID_COLUMN: &str = "filename";
const LOC_COLUMN: &str = "TLOC";
const PRE_COLUMN: &str = "pre";
const POST_COLUMN: &str = "post";

pub fn import_eclipse_dataset<R: Read>(
    reader: R,
    version_label: &str,
) -> Result<Dataset, IngestError> {
    let mut buf = BufReader::new(reader);
    let mut first = String::new();
    buf.read_line(&mut first)
        .map_err(|e| IngestError::FormatMismatch(format!("unreadable header: {e}")))?;
    if first.trim().is_empty() {
        return Err(IngestError::FormatMismatch("missing header line".into()));
    }
    let delimiter = if first.contains(';') { b';' } else { b',' };
    let chained = first.as_bytes().chain(buf);
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(chained);

    let headers = rdr
        .headers()
        .map_err(|e| IngestError::FormatMismatch(format!("header: {e}")))?
        .clone();
    let column = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| {
            IngestError::FormatMismatch(format!("header lacks required column `{name}`"))
        })
    };
    let id_col = column(ID_COLUMN)?;
    let loc_col = column(LOC_COLUMN)?;
    let pre_col = column(PRE_COLUMN)?;
    let post_col = column(POST_COLUMN)?;

    let mut records = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(|e| IngestError::FormatMismatch(e.to_string()))?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        if row.len() != headers.len() {
            return Err(IngestError::FormatMismatch(format!(
                "line {line}: expected {} fields, found {} (truncated row?)",
                headers.len(),
                row.len()
            )));
        }
        let cell = |col: usize, name: &str| -> Result<u64, IngestError> {
            parse_count(&row[col]).ok_or_else(|| {
                IngestError::FormatMismatch(format!(
                    "line {line}: column `{name}` value {:?} is not a non-negative integer",
                    &row[col]
                ))
            })
        };
        let loc = cell(loc_col, LOC_COLUMN)?;
        let pre = cell(pre_col, PRE_COLUMN)?;
        let post = cell(post_col, POST_COLUMN)?;
        let record = ProgramRecord::new(&row[id_col], loc, Some(pre), Some(post))
            .map_err(|e| IngestError::FormatMismatch(format!("line {line}: {e}")))?;
        records.push(record);
    }
    if records.is_empty() {
        return Err(IngestError::FormatMismatch("no data rows after header".into()));
    }
    Dataset::new("eclipse", version_label, records).map_err(|e| match e {
        IngestError::DuplicateId(id) => {
            IngestError::FormatMismatch(format!("duplicate `{ID_COLUMN}` value {id:?}"))
        }
        other => other,
    })
}

pub fn import_eclipse_file(path: &Path, version_label: &str) -> Result<Dataset, IngestError> {
    let file = File::open(path).map_err(|e| IngestError::Io(format!("{}: {e}", path.display())))?;
    import_eclipse_dataset(file, version_label)
}

// Counts sometimes appear as integral floats ("12.0") in exported tables.
fn parse_count(s: &str) -> Option<u64> {
    if let Ok(v) = s.parse::<u64>() {
        return Some(v);
    }
    let f: f64 = s.parse().ok()?;
    (f.is_finite() && f >= 0.0 && f.fract() == 0.0 && f < 9.0e15).then_some(f as u64)
}
