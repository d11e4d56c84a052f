use std::fs;
use std::path::{Path, PathBuf};

use globset::{Glob, GlobSet, GlobSetBuilder};
use rayon::prelude::*;
use walkdir::WalkDir;

use super::{LanguageProfile, LocError, ProfileSet, SourceFile};
use crate::ingest::ProgramRecord;

#[derive(Debug, Clone, Default)]
pub struct ScanOptions {
    /// Globs matched against the root-relative path (`/`-separated). When
    /// empty, every file with a known extension is scanned.
    pub include: Vec<String>,
    pub exclude: Vec<String>,
    /// Restrict to one profile. With explicit `include` globs, matched files
    /// are lexed with this profile whatever their extension.
    pub language: Option<String>,
    /// Worker threads; `None` uses the global rayon pool.
    pub threads: Option<usize>,
}

/// A per-file problem collected during a scan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanIssue {
    pub path: String,
    pub error: LocError,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ScanOutcome {
    /// One record per counted file, sorted by id.
    pub records: Vec<ProgramRecord>,
    /// Matched files that hold no code at all (0 LOC), sorted.
    pub empty_files: Vec<String>,
    pub issues: Vec<ScanIssue>,
}

fn build_globs(patterns: &[String]) -> Result<Option<GlobSet>, LocError> {
    if patterns.is_empty() {
        return Ok(None);
    }
    let mut b = GlobSetBuilder::new();
    for p in patterns {
        let glob = Glob::new(p).map_err(|e| LocError::InvalidGlob {
            pattern: p.clone(),
            message: e.to_string(),
        })?;
        b.add(glob);
    }
    b.build().map(Some).map_err(|e| LocError::InvalidGlob {
        pattern: patterns.join(","),
        message: e.to_string(),
    })
}

fn relative_id(root: &Path, path: &Path) -> String {
    let rel = path.strip_prefix(root).unwrap_or(path);
    rel.components()
        .map(|c| c.as_os_str().to_string_lossy())
        .collect::<Vec<_>>()
        .join("/")
}

enum FileResult {
    Counted(ProgramRecord),
    Empty(String),
    Failed(ScanIssue),
}

fn count_one(id: String, path: &Path, profile: &LanguageProfile) -> FileResult {
    let bytes = match fs::read(path) {
        Ok(b) => b,
        Err(e) => {
            return FileResult::Failed(ScanIssue {
                error: LocError::Io {
                    path: id.clone(),
                    message: e.to_string(),
                },
                path: id,
            })
        }
    };
    match SourceFile::decode_with(path, bytes, profile) {
        Ok(src) => match src.loc() {
            0 => FileResult::Empty(id),
            loc => FileResult::Counted(ProgramRecord {
                id,
                loc,
                pre_defects: None,
                post_defects: None,
            }),
        },
        Err(error) => FileResult::Failed(ScanIssue { path: id, error }),
    }
}

/// Walks `root` and counts LOC for every matched source file.
///
/// Unreadable entries are collected into [`ScanOutcome::issues`]; only a bad
/// root, bad globs or an unknown `language` abort the scan. Output does not
/// depend on traversal order or the number of worker threads.
pub fn scan_tree(
    root: &Path,
    options: &ScanOptions,
    profiles: &ProfileSet,
) -> Result<ScanOutcome, LocError> {
    let meta = fs::metadata(root).map_err(|e| LocError::Io {
        path: root.display().to_string(),
        message: e.to_string(),
    })?;
    if !meta.is_dir() {
        return Err(LocError::Io {
            path: root.display().to_string(),
            message: "not a directory".into(),
        });
    }
    let include = build_globs(&options.include)?;
    let exclude = build_globs(&options.exclude)?;
    let forced = match &options.language {
        Some(name) => Some(
            profiles
                .by_name(name)
                .ok_or_else(|| LocError::UnknownLanguage(name.clone()))?,
        ),
        None => None,
    };

    let mut outcome = ScanOutcome::default();
    let mut jobs: Vec<(String, PathBuf, &LanguageProfile)> = Vec::new();
    for entry in WalkDir::new(root).follow_links(false) {
        let entry = match entry {
            Ok(e) => e,
            Err(e) => {
                let path = e
                    .path()
                    .map(|p| relative_id(root, p))
                    .unwrap_or_else(|| root.display().to_string());
                outcome.issues.push(ScanIssue {
                    error: LocError::Io {
                        path: path.clone(),
                        message: e.to_string(),
                    },
                    path,
                });
                continue;
            }
        };
        if !entry.file_type().is_file() {
            continue;
        }
        let path = entry.path();
        let id = relative_id(root, path);
        if exclude.as_ref().is_some_and(|g| g.is_match(&id)) {
            continue;
        }
        let profile = match (&include, forced) {
            (Some(g), _) if !g.is_match(&id) => continue,
            (Some(_), Some(p)) => Some(p),
            (Some(_), None) => profiles.for_path(path),
            (None, Some(p)) => {
                if !p.matches_extension(path) {
                    continue;
                }
                Some(p)
            }
            (None, None) => match profiles.for_path(path) {
                Some(p) => Some(p),
                None => continue,
            },
        };
        match profile {
            Some(p) => jobs.push((id, path.to_path_buf(), p)),
            None => outcome.issues.push(ScanIssue {
                error: LocError::UnknownLanguage(id.clone()),
                path: id,
            }),
        }
    }

    let work = || -> Vec<FileResult> {
        jobs.par_iter()
            .map(|(id, path, profile)| count_one(id.clone(), path, profile))
            .collect()
    };
    let results = match options.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| LocError::Io {
                path: root.display().to_string(),
                message: format!("thread pool: {e}"),
            })?
            .install(work),
        None => work(),
    };

    for r in results {
        match r {
            FileResult::Counted(rec) => outcome.records.push(rec),
            FileResult::Empty(id) => outcome.empty_files.push(id),
            FileResult::Failed(issue) => outcome.issues.push(issue),
        }
    }
    outcome.records.sort_by(|a, b| a.id.cmp(&b.id));
    outcome.empty_files.sort();
    outcome.issues.sort_by(|a, b| a.path.cmp(&b.path));
    Ok(outcome)
}
