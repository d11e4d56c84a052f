//! Program records and datasets, plus loaders for metric files.
//!
//! Two input routes exist: the canonical `id,loc,pre_defects,post_defects`
//! CSV (see [`canonical`]) and an adapter for the file-level tables of the
//! public Eclipse defect dataset (see [`eclipse`]).

pub mod canonical;
pub mod eclipse;

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use canonical::{parse_canonical_csv, write_canonical_csv};
pub use eclipse::import_eclipse_dataset;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IngestError {
    #[error("missing or malformed header: {0}")]
    MissingHeader(String),
    #[error("line {line}: {reason}")]
    BadRow { line: u64, reason: String },
    #[error("duplicate program id {0:?}")]
    DuplicateId(String),
    #[error("invalid record {id:?}: {reason}")]
    InvalidRecord { id: String, reason: String },
    #[error("format mismatch: {0}")]
    FormatMismatch(String),
    #[error("i/o error: {0}")]
    Io(String),
}

/// Which defect column an analysis looks at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DefectKind {
    /// Defects reported in the six months before release.
    Pre,
    /// Defects reported in the six months after release.
    Post,
}

impl DefectKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DefectKind::Pre => "pre",
            DefectKind::Post => "post",
        }
    }
}

impl fmt::Display for DefectKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for DefectKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pre" => Ok(DefectKind::Pre),
            "post" => Ok(DefectKind::Post),
            other => Err(format!("unknown defect kind {other:?} (expected pre or post)")),
        }
    }
}

/// One program: a source file with its size and optional defect counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProgramRecord {
    pub id: String,
    pub loc: u64,
    pub pre_defects: Option<u64>,
    pub post_defects: Option<u64>,
}

impl ProgramRecord {
    /// Builds a record, rejecting empty ids and `loc == 0`.
    pub fn new(
        id: impl Into<String>,
        loc: u64,
        pre_defects: Option<u64>,
        post_defects: Option<u64>,
    ) -> Result<Self, IngestError> {
        let id = id.into();
        if id.is_empty() {
            return Err(IngestError::InvalidRecord {
                id,
                reason: "id must not be empty".into(),
            });
        }
        if loc == 0 {
            return Err(IngestError::InvalidRecord {
                id,
                reason: "loc must be >= 1".into(),
            });
        }
        Ok(Self {
            id,
            loc,
            pre_defects,
            post_defects,
        })
    }

    /// Size-only record.
    pub fn sized(id: impl Into<String>, loc: u64) -> Result<Self, IngestError> {
        Self::new(id, loc, None, None)
    }

    pub fn defects(&self, kind: DefectKind) -> Option<u64> {
        match kind {
            DefectKind::Pre => self.pre_defects,
            DefectKind::Post => self.post_defects,
        }
    }
}

/// A named collection of program records with unique ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dataset {
    pub name: String,
    pub version_label: String,
    records: Vec<ProgramRecord>,
}

impl Dataset {
    pub fn new(
        name: impl Into<String>,
        version_label: impl Into<String>,
        records: Vec<ProgramRecord>,
    ) -> Result<Self, IngestError> {
        let mut seen = HashSet::with_capacity(records.len());
        for r in &records {
            if r.loc == 0 {
                return Err(IngestError::InvalidRecord {
                    id: r.id.clone(),
                    reason: "loc must be >= 1".into(),
                });
            }
            if !seen.insert(r.id.as_str()) {
                return Err(IngestError::DuplicateId(r.id.clone()));
            }
        }
        Ok(Self {
            name: name.into(),
            version_label: version_label.into(),
            records,
        })
    }

    pub fn records(&self) -> &[ProgramRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn sizes(&self) -> Vec<u64> {
        self.records.iter().map(|r| r.loc).collect()
    }

    pub fn total_loc(&self) -> u64 {
        self.records.iter().map(|r| r.loc).sum()
    }

    /// True when every record carries a count for `kind`.
    pub fn has_defects(&self, kind: DefectKind) -> bool {
        !self.records.is_empty() && self.records.iter().all(|r| r.defects(kind).is_some())
    }

    /// Record indices ordered by LOC descending, ties by id ascending.
    pub fn ranked_by_size(&self) -> Vec<&ProgramRecord> {
        let mut ranked: Vec<&ProgramRecord> = self.records.iter().collect();
        ranked.sort_by(|a, b| b.loc.cmp(&a.loc).then_with(|| a.id.cmp(&b.id)));
        ranked
    }
}
