use std::fs;
use std::path::{Path, PathBuf};

use qebert_core::{AnalysisConfig, Bm25Params, ExpansionConfig, TrainConfig};
use serde::{Deserialize, Serialize};

use crate::failure::{data, usage, CliResult};

/// Everything one experiment needs, loadable from a single TOML file.
/// Relative paths are resolved against the directory holding the file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AppConfig {
    pub corpus_path: Option<PathBuf>,
    pub index_path: Option<PathBuf>,
    /// Defaults to the index path with a `.graph.json` extension.
    pub graph_path: Option<PathBuf>,
    pub embeddings_path: Option<PathBuf>,
    pub qrels_path: Option<PathBuf>,
    pub topics_path: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
    pub stopwords_path: Option<PathBuf>,
    pub analysis: AnalysisConfig,
    pub bm25: Bm25Params,
    pub expansion: ExpansionConfig,
    pub train: TrainConfig,
}

impl AppConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| data(format!("cannot read config {}: {e}", path.display())))?;
        let mut config: AppConfig =
            toml::from_str(&text).map_err(|e| data(format!("invalid config {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        config.resolve_relative_to(base);
        Ok(config)
    }

    fn resolve_relative_to(&mut self, base: &Path) {
        for p in [
            &mut self.corpus_path,
            &mut self.index_path,
            &mut self.graph_path,
            &mut self.embeddings_path,
            &mut self.qrels_path,
            &mut self.topics_path,
            &mut self.output_dir,
            &mut self.stopwords_path,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
    }

    /// Applies the stopword file, if any, and checks every section.
    pub fn finish(mut self) -> CliResult<Self> {
        if let Some(path) = &self.stopwords_path {
            self.analysis = self.analysis.with_stopword_file(path)?;
        }
        self.analysis.validate().map_err(|e| usage(e.to_string()))?;
        self.expansion.validate().map_err(|e| usage(e.to_string()))?;
        self.train.validate().map_err(|e| usage(e.to_string()))?;
        if !(self.bm25.k1 >= 0.0 && (0.0..=1.0).contains(&self.bm25.b)) {
            return Err(usage(format!(
                "bm25 parameters out of range: k1={} b={}",
                self.bm25.k1, self.bm25.b
            )));
        }
        Ok(self)
    }

    pub fn graph_path(&self) -> CliResult<PathBuf> {
        match (&self.graph_path, &self.index_path) {
            (Some(g), _) => Ok(g.clone()),
            (None, Some(i)) => Ok(i.with_extension("graph.json")),
            (None, None) => Err(usage("no graph_path or index_path configured")),
        }
    }

    /// Key/value pairs echoed at the top of every report.
    pub fn provenance(&self) -> Vec<(String, String)> {
        let e = &self.expansion;
        let mut out = vec![
            ("bm25.k1", self.bm25.k1.to_string()),
            ("bm25.b", self.bm25.b.to_string()),
            ("expansion.initial_depth", e.initial_depth.to_string()),
            ("expansion.prf_k", e.prf_k.to_string()),
            ("expansion.expansion_m", e.expansion_m.to_string()),
            ("expansion.original_weight", e.original_weight.to_string()),
            ("expansion.expansion_weight", e.expansion_weight.to_string()),
            ("expansion.include_citations", e.include_citations.to_string()),
            ("expansion.use_rerank", e.use_rerank.to_string()),
            ("expansion.log_frequency", e.log_frequency.to_string()),
            ("analysis.min_token_len", self.analysis.min_token_len.to_string()),
            ("analysis.max_token_len", self.analysis.max_token_len.to_string()),
            ("analysis.stopwords", self.analysis.stopwords.len().to_string()),
            ("train.dimension", self.train.dimension.to_string()),
            ("train.seed", self.train.seed.to_string()),
        ];
        if let Some(p) = &self.embeddings_path {
            out.push(("embeddings", file_name(p)));
        }
        out.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
    }
}

/// Only the file name, so reports do not depend on where the data lives.
fn file_name(p: &Path) -> String {
    p.file_name()
        .map_or_else(|| p.display().to_string(), |n| n.to_string_lossy().into_owned())
}

pub fn require<'a>(path: &'a Option<PathBuf>, what: &str) -> CliResult<&'a Path> {
    path.as_deref().ok_or_else(|| {
        usage(format!(
            "no {what} configured (set it in the config file or pass a flag)"
        ))
    })
}
