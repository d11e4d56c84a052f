//! Canonical record CSV: `id,loc,pre_defects,post_defects`.
//!
//! The two defect columns are optional in the header. When present, an empty
//! cell means "unknown" for that record.

use std::io::{Read, Write};

use super::{Dataset, IngestError, ProgramRecord};

pub const HEADER: [&str; 4] = ["id", "loc", "pre_defects", "post_defects"];

pub fn parse_canonical_csv<R: Read>(
    reader: R,
    name: &str,
    version_label: &str,
) -> Result<Dataset, IngestError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let mut rows = rdr.records();
    let header = match rows.next() {
        None => return Err(IngestError::MissingHeader("input is empty".into())),
        Some(Err(e)) => return Err(IngestError::MissingHeader(e.to_string())),
        Some(Ok(h)) => h,
    };
    let width = header.len();
    if !(2..=4).contains(&width) || header.iter().zip(HEADER).any(|(got, want)| got != want) {
        return Err(IngestError::MissingHeader(format!(
            "expected `{}` (last two columns optional), found `{}`",
            HEADER.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }

    let mut records = Vec::new();
    for row in rows {
        let row = row.map_err(|e| IngestError::BadRow {
            line: e.position().map(|p| p.line()).unwrap_or(0),
            reason: e.to_string(),
        })?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        let bad = |reason: String| IngestError::BadRow { line, reason };
        if row.len() != width {
            return Err(bad(format!("expected {width} fields, found {}", row.len())));
        }
        let id = &row[0];
        if id.is_empty() {
            return Err(bad("empty id".into()));
        }
        let loc: u64 = row[1]
            .parse()
            .map_err(|_| bad(format!("loc {:?} is not a non-negative integer", &row[1])))?;
        if loc == 0 {
            return Err(bad("loc must be >= 1".into()));
        }
        let defects = |col: usize| -> Result<Option<u64>, IngestError> {
            match row.get(col) {
                None | Some("") => Ok(None),
                Some(s) => s.parse().map(Some).map_err(|_| {
                    bad(format!(
                        "{} {s:?} is not a non-negative integer",
                        HEADER[col]
                    ))
                }),
            }
        };
        let pre = defects(2)?;
        let post = defects(3)?;
        records.push(ProgramRecord::new(id, loc, pre, post).map_err(|e| bad(e.to_string()))?);
    }
    Dataset::new(name, version_label, records)
}

/// Writes all four columns; unknown defect counts become empty cells.
pub fn write_canonical_csv<W: Write>(dataset: &Dataset, writer: W) -> Result<(), IngestError> {
    let io = |e: csv::Error| IngestError::Io(e.to_string());
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(HEADER).map_err(io)?;
    for r in dataset.records() {
        let opt = |v: Option<u64>| v.map(|d| d.to_string()).unwrap_or_default();
        w.write_record([
            r.id.clone(),
            r.loc.to_string(),
            opt(r.pre_defects),
            opt(r.post_defects),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| IngestError::Io(e.to_string()))
}
