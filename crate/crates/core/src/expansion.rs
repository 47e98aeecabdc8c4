//! Citation-aware pseudo-relevance-feedback query expansion.
//!
//! Four phases per query:
//!
//! 1. BM25 retrieval of the top `initial_depth` documents.
//! 2. Re-ranking of that list by embedding similarity between the query
//!    centroid and each document's idf-weighted centroid.
//! 3. Candidate terms are pooled from the top `prf_k` re-ranked documents and
//!    every in-corpus paper they cite. Each candidate `n` gets
//!    `sim(n) = max_q cos(q, n)` over the query terms and weight `f(n) * sim(n)`,
//!    `f` being its frequency in the pool; the best `expansion_m` are kept.
//! 4. Weighted BM25 retrieval with original terms at `original_weight` and
//!    expansion terms at `expansion_weight`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::corpus::{CitationGraph, DocumentStore};
use crate::embedding::{cosine, indexed_doc_embedding, EmbeddingTable};
use crate::error::{Error, Result};
use crate::index::{Hit, InvertedIndex, RankedList, WeightedQuery};
use crate::text::{analyze, AnalysisConfig, Term};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExpansionConfig {
    pub initial_depth: usize,
    pub prf_k: usize,
    pub expansion_m: usize,
    pub original_weight: f64,
    pub expansion_weight: f64,
    pub include_citations: bool,
    pub use_rerank: bool,
    /// Use `ln(1 + f)` instead of the raw pool frequency in candidate weights.
    pub log_frequency: bool,
}

impl Default for ExpansionConfig {
    fn default() -> Self {
        ExpansionConfig {
            initial_depth: 100,
            prf_k: 4,
            expansion_m: 10,
            original_weight: 1.0,
            expansion_weight: 0.7,
            include_citations: true,
            use_rerank: true,
            log_frequency: false,
        }
    }
}

impl ExpansionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.prf_k < 1 || self.prf_k > self.initial_depth {
            return Err(Error::InvalidConfig(format!(
                "prf_k must satisfy 1 <= prf_k ({}) <= initial_depth ({})",
                self.prf_k, self.initial_depth
            )));
        }
        for (name, w) in [
            ("original_weight", self.original_weight),
            ("expansion_weight", self.expansion_weight),
        ] {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::InvalidConfig(format!("{name} must be positive, got {w}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateTerm {
    pub term: Term,
    /// Summed count over every pooled document.
    pub frequency: u64,
    pub similarity: f64,
    pub weight: f64,
}

/// Documents mined for candidates, PRF documents first, then the papers they
/// cite, each listed once.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct CandidatePool {
    pub prf_doc_ids: Vec<String>,
    pub cited_doc_ids: Vec<String>,
    pub term_frequencies: BTreeMap<Term, u64>,
}

impl CandidatePool {
    pub fn source_doc_ids(&self) -> impl Iterator<Item = &str> {
        self.prf_doc_ids.iter().chain(&self.cited_doc_ids).map(String::as_str)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpandedQuery {
    pub original_terms: Vec<Term>,
    pub expansion_terms: Vec<CandidateTerm>,
    pub weighted: WeightedQuery,
}

/// Analyzes a query and drops repeated terms, keeping first occurrences.
pub fn analyze_query(query_text: &str, analysis: &AnalysisConfig) -> Result<Vec<Term>> {
    let mut seen = HashSet::new();
    let terms: Vec<Term> = analyze(query_text, analysis)
        .into_iter()
        .filter(|t| seen.insert(t.clone()))
        .collect();
    if terms.is_empty() {
        return Err(Error::EmptyAnalyzedQuery(query_text.to_owned()));
    }
    Ok(terms)
}

/// Phase 1: every analyzed query term at weight 1.
pub fn initial_retrieval(
    index: &InvertedIndex,
    query_text: &str,
    analysis: &AnalysisConfig,
    config: &ExpansionConfig,
) -> Result<RankedList> {
    let terms = analyze_query(query_text, analysis)?;
    Ok(index.search(&WeightedQuery::uniform(&terms, 1.0), config.initial_depth))
}

/// Phase 2. Returns a permutation of `initial`, ordered by cosine between the
/// query centroid and each document embedding. Documents without an embedding
/// go last with score `-inf`; ties fall back to the BM25 score, then doc id.
/// If no query term has a vector the input is returned unchanged.
pub fn rerank(initial: &RankedList, table: &EmbeddingTable, index: &InvertedIndex, query_terms: &[Term]) -> RankedList {
    let Some(centroid) = table.centroid(query_terms) else {
        return initial.clone();
    };
    let mut scored: Vec<(Option<f64>, &Hit)> = initial
        .entries
        .iter()
        .map(|hit| {
            let sim = index
                .ordinal(&hit.doc_id)
                .and_then(|o| indexed_doc_embedding(table, index, o))
                .map(|emb| cosine(&centroid, &emb).expect("table vectors share one dimension"));
            (sim, hit)
        })
        .collect();
    scored.sort_by(|(sa, a), (sb, b)| {
        let by_sim = match (sa, sb) {
            (Some(x), Some(y)) => y.total_cmp(x),
            (Some(_), None) => Ordering::Less,
            (None, Some(_)) => Ordering::Greater,
            (None, None) => Ordering::Equal,
        };
        by_sim
            .then_with(|| b.score.total_cmp(&a.score))
            .then_with(|| a.doc_id.cmp(&b.doc_id))
    });
    RankedList {
        entries: scored
            .into_iter()
            .map(|(sim, hit)| Hit {
                doc_id: hit.doc_id.clone(),
                score: sim.unwrap_or(f64::NEG_INFINITY),
            })
            .collect(),
        depth: initial.depth,
    }
}

/// Phase 3a: pool the top `prf_k` documents and, when enabled, the corpus
/// papers they cite.
pub fn build_candidate_pool(
    reranked: &RankedList,
    graph: &CitationGraph,
    store: &DocumentStore,
    analysis: &AnalysisConfig,
    config: &ExpansionConfig,
) -> CandidatePool {
    let prf: Vec<String> = reranked.doc_ids().take(config.prf_k).map(str::to_owned).collect();
    let mut seen: HashSet<&str> = prf.iter().map(String::as_str).collect();
    let mut cited = Vec::new();
    if config.include_citations {
        for id in &prf {
            for target in graph.out_references(id) {
                if seen.insert(target.as_str()) {
                    cited.push(target.clone());
                }
            }
        }
    }

    let mut term_frequencies = BTreeMap::new();
    for id in prf.iter().chain(&cited) {
        let Some(doc) = store.get(id) else {
            log::warn!("pooled document {id} missing from the store");
            continue;
        };
        for term in analyze(&doc.indexed_text(), analysis) {
            *term_frequencies.entry(term).or_insert(0) += 1;
        }
    }
    CandidatePool {
        prf_doc_ids: prf,
        cited_doc_ids: cited,
        term_frequencies,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FrequencyScaling {
    #[default]
    Raw,
    Log1p,
}

/// Phase 3b: score every pooled term that is not a query term and has a
/// vector. Terms with no positive similarity to any query term are dropped.
/// Sorted by weight descending, then term ascending.
pub fn score_candidates(
    pool: &CandidatePool,
    query_terms: &[Term],
    table: &EmbeddingTable,
    scaling: FrequencyScaling,
) -> Vec<CandidateTerm> {
    let query: HashSet<&str> = query_terms.iter().map(Term::as_str).collect();
    let known_query: Vec<&Term> = query_terms.iter().filter(|q| table.contains(q.as_str())).collect();
    let mut out: Vec<CandidateTerm> = pool
        .term_frequencies
        .iter()
        .filter(|(t, _)| !query.contains(t.as_str()) && table.contains(t.as_str()))
        .filter_map(|(term, &frequency)| {
            let similarity = known_query
                .iter()
                .filter_map(|q| table.term_similarity(q.as_str(), term.as_str()))
                .fold(f64::NEG_INFINITY, f64::max);
            if similarity.is_nan() || similarity <= 0.0 {
                return None;
            }
            let f = match scaling {
                FrequencyScaling::Raw => frequency as f64,
                FrequencyScaling::Log1p => (frequency as f64).ln_1p(),
            };
            Some(CandidateTerm {
                term: term.clone(),
                frequency,
                similarity,
                weight: f * similarity,
            })
        })
        .collect();
    out.sort_by(|a, b| b.weight.total_cmp(&a.weight).then_with(|| a.term.cmp(&b.term)));
    out
}

/// Phase 3c: the first `expansion_m` scored candidates.
pub fn select_expansion_terms(mut scored: Vec<CandidateTerm>, config: &ExpansionConfig) -> Vec<CandidateTerm> {
    scored.truncate(config.expansion_m);
    scored
}

pub fn build_expanded_query(
    original_terms: &[Term],
    selected: Vec<CandidateTerm>,
    config: &ExpansionConfig,
) -> ExpandedQuery {
    let mut weighted: Vec<(Term, f64)> = Vec::with_capacity(original_terms.len() + selected.len());
    for t in original_terms {
        if !weighted.iter().any(|(u, _)| u == t) {
            weighted.push((t.clone(), config.original_weight));
        }
    }
    let expansion_terms: Vec<CandidateTerm> = selected
        .into_iter()
        .filter(|c| !weighted.iter().any(|(u, _)| *u == c.term))
        .collect();
    for c in &expansion_terms {
        weighted.push((c.term.clone(), config.expansion_weight));
    }
    ExpandedQuery {
        original_terms: weighted
            .iter()
            .take(weighted.len() - expansion_terms.len())
            .map(|(t, _)| t.clone())
            .collect(),
        expansion_terms,
        weighted: WeightedQuery::new(weighted).expect("distinct terms with validated positive weights"),
    }
}

/// Everything the expansion phases decided for one query.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Expansion {
    pub query: String,
    pub initial: RankedList,
    pub reranked: RankedList,
    pub pool: CandidatePool,
    pub expanded: ExpandedQuery,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditTerm {
    pub term: String,
    pub f: u64,
    pub sim: f64,
    pub weight: f64,
}

/// JSON audit record of one expansion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionAudit {
    pub query: String,
    pub original_terms: Vec<String>,
    pub expansion_terms: Vec<AuditTerm>,
    pub prf_docs: Vec<String>,
    pub cited_docs: Vec<String>,
}

impl Expansion {
    pub fn audit(&self) -> ExpansionAudit {
        ExpansionAudit {
            query: self.query.clone(),
            original_terms: self.expanded.original_terms.iter().map(|t| t.to_string()).collect(),
            expansion_terms: self
                .expanded
                .expansion_terms
                .iter()
                .map(|c| AuditTerm {
                    term: c.term.to_string(),
                    f: c.frequency,
                    sim: c.similarity,
                    weight: c.weight,
                })
                .collect(),
            prf_docs: self.pool.prf_doc_ids.clone(),
            cited_docs: self.pool.cited_doc_ids.clone(),
        }
    }
}

/// Immutable inputs shared by every query. Cheap to copy; safe to use from
/// many threads at once.
#[derive(Debug, Clone, Copy)]
pub struct Pipeline<'a> {
    pub index: &'a InvertedIndex,
    pub table: &'a EmbeddingTable,
    pub graph: &'a CitationGraph,
    pub store: &'a DocumentStore,
    pub analysis: &'a AnalysisConfig,
    pub config: &'a ExpansionConfig,
}

impl Pipeline<'_> {
    /// Phases 1-3: everything up to, not including, the final retrieval.
    pub fn expand(&self, query_text: &str) -> Result<Expansion> {
        let original = analyze_query(query_text, self.analysis)?;
        let initial = self
            .index
            .search(&WeightedQuery::uniform(&original, 1.0), self.config.initial_depth);
        let reranked = if self.config.use_rerank {
            rerank(&initial, self.table, self.index, &original)
        } else {
            initial.clone()
        };
        let pool = build_candidate_pool(&reranked, self.graph, self.store, self.analysis, self.config);
        let scaling = if self.config.log_frequency {
            FrequencyScaling::Log1p
        } else {
            FrequencyScaling::Raw
        };
        let scored = score_candidates(&pool, &original, self.table, scaling);
        let selected = select_expansion_terms(scored, self.config);
        let expanded = build_expanded_query(&original, selected, self.config);
        Ok(Expansion {
            query: query_text.to_owned(),
            initial,
            reranked,
            pool,
            expanded,
        })
    }

    pub fn expand_and_search(&self, query_text: &str) -> Result<(Expansion, RankedList)> {
        let expansion = self.expand(query_text)?;
        let ranking = self
            .index
            .search(&expansion.expanded.weighted, self.config.initial_depth);
        Ok((expansion, ranking))
    }
}

pub fn expand_and_search(
    index: &InvertedIndex,
    table: &EmbeddingTable,
    graph: &CitationGraph,
    store: &DocumentStore,
    analysis: &AnalysisConfig,
    query_text: &str,
    config: &ExpansionConfig,
) -> Result<(Expansion, RankedList)> {
    Pipeline {
        index,
        table,
        graph,
        store,
        analysis,
        config,
    }
    .expand_and_search(query_text)
}
