//! Text analysis shared by indexing, embedding training and querying:
//! tokenize, drop stopwords, Porter-stem.

mod porter;

use std::borrow::Borrow;
use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use porter::stem;

/// The 33-word English stopword list shipped by Lucene/Solr.
pub const DEFAULT_STOPWORDS: [&str; 33] = [
    "a", "an", "and", "are", "as", "at", "be", "but", "by", "for", "if", "in", "into", "is", "it", "no", "not", "of",
    "on", "or", "such", "that", "the", "their", "then", "there", "these", "they", "this", "to", "was", "will", "with",
];

/// An analyzed (lowercased, stopword-free, stemmed) term.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Term(String);

impl Term {
    /// Wraps an already-analyzed string. No analysis is performed.
    pub fn new(s: impl Into<String>) -> Self {
        Term(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

impl Borrow<str> for Term {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Term {
    fn from(s: &str) -> Self {
        Term(s.to_owned())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnalysisConfig {
    pub stopwords: BTreeSet<String>,
    pub min_token_len: usize,
    pub max_token_len: usize,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            stopwords: DEFAULT_STOPWORDS.iter().map(|s| s.to_string()).collect(),
            min_token_len: 2,
            max_token_len: 40,
        }
    }
}

impl AnalysisConfig {
    pub fn validate(&self) -> Result<()> {
        if self.min_token_len < 1 || self.min_token_len > self.max_token_len {
            return Err(Error::InvalidConfig(format!(
                "token length bounds must satisfy 1 <= min ({}) <= max ({})",
                self.min_token_len, self.max_token_len
            )));
        }
        Ok(())
    }

    /// Replaces the stopword list with the contents of `path`: one word per
    /// line, blank lines and `#` comments ignored.
    pub fn with_stopword_file(mut self, path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        self.stopwords = parse_stopwords(&text);
        Ok(self)
    }

    fn in_bounds(&self, token: &str) -> bool {
        let n = token.chars().count();
        n >= self.min_token_len && n <= self.max_token_len
    }
}

pub fn parse_stopwords(text: &str) -> BTreeSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_lowercase)
        .collect()
}

/// Lowercases and splits on every non-alphanumeric character. Tokens without
/// an alphabetic character and tokens outside the default length bounds are
/// dropped.
pub fn tokenize(text: &str) -> Vec<String> {
    tokenize_with(text, &AnalysisConfig::default())
}

pub fn tokenize_with(text: &str, config: &AnalysisConfig) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .filter(|t| t.chars().any(char::is_alphabetic) && config.in_bounds(t))
        .collect()
}

pub fn remove_stopwords(tokens: Vec<String>, config: &AnalysisConfig) -> Vec<String> {
    tokens.into_iter().filter(|t| !config.stopwords.contains(t)).collect()
}

/// tokenize, then stopword removal, then stemming.
///
/// A stem that itself lands on a stopword or under the minimum length
/// ("thes" -> "the", "us" -> "u") is dropped so every returned term satisfies
/// the [`Term`] invariants. Re-analyzing the joined output is not guaranteed
/// to reproduce it.
pub fn analyze(text: &str, config: &AnalysisConfig) -> Vec<Term> {
    remove_stopwords(tokenize_with(text, config), config)
        .iter()
        .map(|t| stem(t))
        .filter(|s| {
            s.chars().count() >= config.min_token_len
                && s.chars().any(char::is_alphabetic)
                && !config.stopwords.contains(s)
        })
        .map(Term)
        .collect()
}
