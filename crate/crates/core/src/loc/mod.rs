//! Physical lines of code, excluding blank lines and comments.
//!
//! A line counts when it holds at least one non-whitespace character that is
//! outside every comment. Code followed by a trailing comment counts once.
//! Comment markers inside string literals are ordinary code, and a block
//! comment left open runs to the end of the file.
//!
//! Lines are split on LF. A CR immediately before the LF is dropped, and a
//! final fragment without a newline is still a line.

mod profile;
mod scan;

use std::path::{Path, PathBuf};

use thiserror::Error;

pub use profile::{LanguageProfile, ProfileSet, StringDelimiter};
pub use scan::{scan_tree, ScanIssue, ScanOptions, ScanOutcome};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LocError {
    #[error("no language profile for {0}")]
    UnknownLanguage(String),
    #[error("{path}: not valid UTF-8 text ({reason})")]
    Decode { path: String, reason: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("invalid language profile {0}")]
    InvalidProfile(String),
    #[error("invalid glob {pattern:?}: {message}")]
    InvalidGlob { pattern: String, message: String },
}

/// A decoded source file bound to the profile used to lex it.
#[derive(Debug, Clone)]
pub struct SourceFile<'p> {
    pub path: PathBuf,
    pub content: String,
    pub profile: &'p LanguageProfile,
}

impl<'p> SourceFile<'p> {
    /// Decodes `bytes` as UTF-8 (a leading BOM is dropped) and picks the
    /// profile from the file extension.
    pub fn decode(
        path: impl Into<PathBuf>,
        bytes: Vec<u8>,
        profiles: &'p ProfileSet,
    ) -> Result<Self, LocError> {
        let path = path.into();
        let profile = profiles
            .for_path(&path)
            .ok_or_else(|| LocError::UnknownLanguage(path.display().to_string()))?;
        Self::decode_with(path, bytes, profile)
    }

    pub fn decode_with(
        path: impl Into<PathBuf>,
        bytes: Vec<u8>,
        profile: &'p LanguageProfile,
    ) -> Result<Self, LocError> {
        let path = path.into();
        let mut content = String::from_utf8(bytes).map_err(|e| LocError::Decode {
            path: path.display().to_string(),
            reason: e.utf8_error().to_string(),
        })?;
        if content.starts_with('\u{feff}') {
            content.drain(..'\u{feff}'.len_utf8());
        }
        Ok(Self {
            path,
            content,
            profile,
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn loc(&self) -> u64 {
        count_loc(&self.content, self.profile)
    }
}

/// Iterates physical lines with the LF / CRLF rules above.
pub fn physical_lines(content: &str) -> impl Iterator<Item = &str> {
    let body = content.strip_suffix('\n').unwrap_or(content);
    let empty = content.is_empty();
    body.split('\n')
        .filter(move |_| !empty)
        .map(|l| l.strip_suffix('\r').unwrap_or(l))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum LexState {
    Code,
    Block { delim: usize, depth: u32 },
    Str { delim: usize },
}

#[derive(Clone, Copy)]
enum Opener {
    Line,
    Block(usize),
    Str(usize),
}

/// Counts lines of code in `content` using `profile`'s lexical rules.
pub fn count_loc(content: &str, profile: &LanguageProfile) -> u64 {
    let mut state = LexState::Code;
    let mut count = 0;
    for line in physical_lines(content) {
        let (has_code, next) = lex_line(line, state, profile);
        state = next;
        if has_code {
            count += 1;
        }
    }
    count
}

fn longest_opener(rest: &str, profile: &LanguageProfile) -> Option<(Opener, usize)> {
    let mut best: Option<(Opener, usize)> = None;
    let mut consider = |op: Opener, token: &str| {
        if rest.starts_with(token) && best.is_none_or(|(_, len)| token.len() > len) {
            best = Some((op, token.len()));
        }
    };
    for m in &profile.line_comment_markers {
        consider(Opener::Line, m);
    }
    for (i, (open, _)) in profile.block_comment_delimiters.iter().enumerate() {
        consider(Opener::Block(i), open);
    }
    for (i, s) in profile.string_delimiters.iter().enumerate() {
        consider(Opener::Str(i), &s.open);
    }
    best
}

fn lex_line(line: &str, mut state: LexState, profile: &LanguageProfile) -> (bool, LexState) {
    let mut has_code = false;
    let mut i = 0;
    while i < line.len() {
        let rest = &line[i..];
        let ch = rest.chars().next().expect("non-empty remainder");
        match state {
            LexState::Code => {
                if ch.is_whitespace() {
                    i += ch.len_utf8();
                    continue;
                }
                match longest_opener(rest, profile) {
                    Some((Opener::Line, _)) => break,
                    Some((Opener::Block(delim), len)) => {
                        state = LexState::Block { delim, depth: 1 };
                        i += len;
                    }
                    Some((Opener::Str(delim), len)) => {
                        has_code = true;
                        state = LexState::Str { delim };
                        i += len;
                    }
                    None => {
                        has_code = true;
                        i += ch.len_utf8();
                    }
                }
            }
            LexState::Block { delim, depth } => {
                let (open, close) = &profile.block_comment_delimiters[delim];
                if profile.nested_block_comments && rest.starts_with(open.as_str()) {
                    state = LexState::Block {
                        delim,
                        depth: depth + 1,
                    };
                    i += open.len();
                } else if rest.starts_with(close.as_str()) {
                    state = if depth > 1 {
                        LexState::Block {
                            delim,
                            depth: depth - 1,
                        }
                    } else {
                        LexState::Code
                    };
                    i += close.len();
                } else {
                    i += ch.len_utf8();
                }
            }
            LexState::Str { delim } => {
                let d = &profile.string_delimiters[delim];
                if !ch.is_whitespace() {
                    has_code = true;
                }
                if Some(ch) == d.escape {
                    i += ch.len_utf8();
                    if let Some(next) = line[i..].chars().next() {
                        i += next.len_utf8();
                    }
                } else if rest.starts_with(d.close.as_str()) {
                    state = LexState::Code;
                    i += d.close.len();
                } else {
                    i += ch.len_utf8();
                }
            }
        }
    }
    if let LexState::Str { delim } = state {
        if !profile.string_delimiters[delim].multiline {
            state = LexState::Code;
        }
    }
    (has_code, state)
}
