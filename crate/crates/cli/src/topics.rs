use std::collections::HashSet;
use std::fs;
use std::path::Path;

use crate::failure::{data, CliResult};

/// Queries in file order. Lines are `topic-id<TAB>query`; blank lines and
/// `#` comments are skipped.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Topics {
    pub entries: Vec<(String, String)>,
}

impl Topics {
    pub fn parse(text: &str, origin: &Path) -> CliResult<Self> {
        let mut entries = Vec::new();
        let mut seen = HashSet::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((id, query)) = line.split_once('\t') else {
                return Err(data(format!(
                    "{}:{}: expected topic-id<TAB>query",
                    origin.display(),
                    i + 1
                )));
            };
            let id = id.trim();
            if id.is_empty() {
                return Err(data(format!("{}:{}: empty topic id", origin.display(), i + 1)));
            }
            if !seen.insert(id.to_owned()) {
                return Err(data(format!("{}:{}: duplicate topic id {id}", origin.display(), i + 1)));
            }
            entries.push((id.to_owned(), query.trim().to_owned()));
        }
        Ok(Topics { entries })
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| data(format!("cannot read topics {}: {e}", path.display())))?;
        Self::parse(&text, path)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
