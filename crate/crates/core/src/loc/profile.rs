//! Lexical descriptions of source languages.
//!
//! A profile is plain data: comment markers, block delimiters and string
//! delimiters. Adding a language means adding a profile value, the counter
//! itself is language-agnostic.

use std::path::Path;

use super::LocError;

/// A string or character literal delimiter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StringDelimiter {
    pub open: String,
    pub close: String,
    /// Character that makes the following character literal.
    pub escape: Option<char>,
    /// Whether the literal may span lines. Single-line literals that are
    /// still open at a line end are closed there.
    pub multiline: bool,
}

impl StringDelimiter {
    pub fn quote(q: char, escape: Option<char>) -> Self {
        Self {
            open: q.to_string(),
            close: q.to_string(),
            escape,
            multiline: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LanguageProfile {
    pub name: String,
    /// File extensions without the dot, lower case.
    pub extensions: Vec<String>,
    pub line_comment_markers: Vec<String>,
    pub block_comment_delimiters: Vec<(String, String)>,
    pub string_delimiters: Vec<StringDelimiter>,
    pub nested_block_comments: bool,
}

impl LanguageProfile {
    /// Java: `//`, non-nesting `/* */`, `"…"`, `'…'` and `"""…"""` text blocks.
    pub fn java() -> Self {
        Self {
            name: "java".into(),
            extensions: vec!["java".into()],
            line_comment_markers: vec!["//".into()],
            block_comment_delimiters: vec![("/*".into(), "*/".into())],
            string_delimiters: vec![
                StringDelimiter {
                    open: "\"\"\"".into(),
                    close: "\"\"\"".into(),
                    escape: Some('\\'),
                    multiline: true,
                },
                StringDelimiter::quote('"', Some('\\')),
                StringDelimiter::quote('\'', Some('\\')),
            ],
            nested_block_comments: false,
        }
    }

    pub fn validate(&self) -> Result<(), LocError> {
        let invalid = |what: &str| Err(LocError::InvalidProfile(format!("{}: {what}", self.name)));
        if self.line_comment_markers.iter().any(String::is_empty) {
            return invalid("empty line comment marker");
        }
        if self
            .block_comment_delimiters
            .iter()
            .any(|(open, close)| open.is_empty() || close.is_empty())
        {
            return invalid("empty block comment delimiter");
        }
        if self
            .string_delimiters
            .iter()
            .any(|s| s.open.is_empty() || s.close.is_empty())
        {
            return invalid("empty string delimiter");
        }
        Ok(())
    }

    pub fn matches_extension(&self, path: &Path) -> bool {
        path.extension()
            .and_then(|e| e.to_str())
            .map(|e| self.extensions.iter().any(|x| x.eq_ignore_ascii_case(e)))
            .unwrap_or(false)
    }
}

/// The set of profiles a scan may use.
#[derive(Debug, Clone)]
pub struct ProfileSet {
    profiles: Vec<LanguageProfile>,
}

impl ProfileSet {
    pub fn builtin() -> Self {
        Self {
            profiles: vec![LanguageProfile::java()],
        }
    }

    pub fn new(profiles: Vec<LanguageProfile>) -> Result<Self, LocError> {
        for p in &profiles {
            p.validate()?;
        }
        Ok(Self { profiles })
    }

    pub fn by_name(&self, name: &str) -> Option<&LanguageProfile> {
        self.profiles.iter().find(|p| p.name.eq_ignore_ascii_case(name))
    }

    pub fn for_path(&self, path: &Path) -> Option<&LanguageProfile> {
        self.profiles.iter().find(|p| p.matches_extension(path))
    }
}

impl Default for ProfileSet {
    fn default() -> Self {
        Self::builtin()
    }
}
