//! BM25 inverted index over the analyzed `title abstract body` field.

mod codec;

use std::cmp::Ordering;
use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::DocumentStore;
use crate::error::{Error, Result};
use crate::text::{analyze, AnalysisConfig, Term};

pub use codec::{FORMAT_VERSION, MAGIC};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Bm25Params {
    pub k1: f64,
    pub b: f64,
}

impl Default for Bm25Params {
    fn default() -> Self {
        Bm25Params { k1: 1.2, b: 0.75 }
    }
}

/// `ln(1 + (N - df + 0.5) / (df + 0.5))`, non-negative for every `df <= N`.
pub fn bm25_idf(doc_count: usize, df: usize) -> f64 {
    let n = doc_count as f64;
    let df = df as f64;
    (1.0 + (n - df + 0.5) / (df + 0.5)).ln()
}

/// Saturated, length-normalized term frequency component of BM25.
pub fn bm25_tf(tf: u32, doc_len: u32, avg_doc_len: f64, params: Bm25Params) -> f64 {
    let tf = f64::from(tf);
    let norm = if avg_doc_len > 0.0 {
        1.0 - params.b + params.b * f64::from(doc_len) / avg_doc_len
    } else {
        1.0
    };
    tf * (params.k1 + 1.0) / (tf + params.k1 * norm)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Posting {
    pub ordinal: u32,
    pub tf: u32,
}

#[derive(Debug, Clone, Copy)]
pub struct PostingList<'a> {
    pub term: &'a Term,
    pub entries: &'a [Posting],
}

#[derive(Debug, Clone, Copy)]
pub struct IndexStats<'a> {
    pub doc_count: usize,
    pub avg_doc_len: f64,
    pub doc_len: &'a [u32],
    pub vocabulary_size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvertedIndex {
    params: Bm25Params,
    /// Ordinal -> document id, ascending.
    doc_ids: Vec<String>,
    doc_len: Vec<u32>,
    total_len: u64,
    /// Term id -> term, ascending.
    lexicon: Vec<Term>,
    term_ids: HashMap<Term, u32>,
    postings: Vec<Vec<Posting>>,
    /// Ordinal -> (term id, tf), ascending by term id.
    forward: Vec<Vec<(u32, u32)>>,
}

pub fn build_index(store: &DocumentStore, config: &AnalysisConfig) -> InvertedIndex {
    build_index_with(store, config, Bm25Params::default())
}

pub fn build_index_with(store: &DocumentStore, config: &AnalysisConfig, params: Bm25Params) -> InvertedIndex {
    let mut doc_ids = Vec::with_capacity(store.count());
    let mut doc_len = Vec::with_capacity(store.count());
    let mut per_doc: Vec<HashMap<Term, u32>> = Vec::with_capacity(store.count());

    for doc in store.iter() {
        let terms = analyze(&doc.indexed_text(), config);
        doc_len.push(terms.len() as u32);
        let mut counts: HashMap<Term, u32> = HashMap::new();
        for t in terms {
            *counts.entry(t).or_insert(0) += 1;
        }
        per_doc.push(counts);
        doc_ids.push(doc.id.clone());
    }

    let mut lexicon: Vec<Term> = per_doc.iter().flat_map(|m| m.keys().cloned()).collect();
    lexicon.sort_unstable();
    lexicon.dedup();
    let term_ids: HashMap<Term, u32> = lexicon.iter().enumerate().map(|(i, t)| (t.clone(), i as u32)).collect();

    let mut postings = vec![Vec::new(); lexicon.len()];
    for (ordinal, counts) in per_doc.iter().enumerate() {
        for (term, &tf) in counts {
            postings[term_ids[term] as usize].push(Posting {
                ordinal: ordinal as u32,
                tf,
            });
        }
    }

    InvertedIndex::assemble(params, doc_ids, doc_len, lexicon, postings)
}

impl InvertedIndex {
    fn assemble(
        params: Bm25Params,
        doc_ids: Vec<String>,
        doc_len: Vec<u32>,
        lexicon: Vec<Term>,
        postings: Vec<Vec<Posting>>,
    ) -> Self {
        let term_ids = lexicon.iter().enumerate().map(|(i, t)| (t.clone(), i as u32)).collect();
        let mut forward = vec![Vec::new(); doc_ids.len()];
        for (tid, list) in postings.iter().enumerate() {
            for p in list {
                forward[p.ordinal as usize].push((tid as u32, p.tf));
            }
        }
        let total_len = doc_len.iter().map(|&l| u64::from(l)).sum();
        InvertedIndex {
            params,
            doc_ids,
            doc_len,
            total_len,
            lexicon,
            term_ids,
            postings,
            forward,
        }
    }

    pub fn params(&self) -> Bm25Params {
        self.params
    }

    pub fn doc_count(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn avg_doc_len(&self) -> f64 {
        if self.doc_ids.is_empty() {
            0.0
        } else {
            self.total_len as f64 / self.doc_ids.len() as f64
        }
    }

    pub fn stats(&self) -> IndexStats<'_> {
        IndexStats {
            doc_count: self.doc_count(),
            avg_doc_len: self.avg_doc_len(),
            doc_len: &self.doc_len,
            vocabulary_size: self.lexicon.len(),
        }
    }

    pub fn vocabulary(&self) -> &[Term] {
        &self.lexicon
    }

    pub fn doc_id(&self, ordinal: u32) -> Option<&str> {
        self.doc_ids.get(ordinal as usize).map(String::as_str)
    }

    pub fn ordinal(&self, doc_id: &str) -> Option<u32> {
        self.doc_ids
            .binary_search_by(|probe| probe.as_str().cmp(doc_id))
            .ok()
            .map(|i| i as u32)
    }

    pub fn postings(&self, term: &str) -> Option<PostingList<'_>> {
        let tid = *self.term_ids.get(term)? as usize;
        Some(PostingList {
            term: &self.lexicon[tid],
            entries: &self.postings[tid],
        })
    }

    pub fn df(&self, term: &str) -> usize {
        self.postings(term).map_or(0, |p| p.entries.len())
    }

    pub fn idf(&self, term: &str) -> f64 {
        bm25_idf(self.doc_count(), self.df(term))
    }

    /// Analyzed terms of a document with their frequencies.
    pub fn doc_terms(&self, ordinal: u32) -> impl Iterator<Item = (&Term, u32)> {
        self.forward
            .get(ordinal as usize)
            .into_iter()
            .flatten()
            .map(|&(tid, tf)| (&self.lexicon[tid as usize], tf))
    }

    pub fn bm25_term_score(&self, term: &str, ordinal: u32) -> f64 {
        let Some(list) = self.postings(term) else {
            return 0.0;
        };
        match list.entries.binary_search_by_key(&ordinal, |p| p.ordinal) {
            Ok(i) => {
                let p = list.entries[i];
                let idf = bm25_idf(self.doc_count(), list.entries.len());
                idf * bm25_tf(p.tf, self.doc_len[ordinal as usize], self.avg_doc_len(), self.params)
            }
            Err(_) => 0.0,
        }
    }

    /// Weighted BM25: each document scores `sum(weight * bm25(term, doc))`.
    /// Documents scoring zero are not returned.
    pub fn search(&self, query: &WeightedQuery, depth: usize) -> RankedList {
        let mut scores = vec![0.0f64; self.doc_count()];
        let mut touched = vec![false; self.doc_count()];
        let avgdl = self.avg_doc_len();
        for (term, weight) in query.iter() {
            let Some(list) = self.postings(term.as_str()) else {
                continue;
            };
            let idf = bm25_idf(self.doc_count(), list.entries.len());
            for p in list.entries {
                let o = p.ordinal as usize;
                scores[o] += weight * (idf * bm25_tf(p.tf, self.doc_len[o], avgdl, self.params));
                touched[o] = true;
            }
        }
        let mut hits: Vec<(u32, f64)> = scores
            .into_iter()
            .enumerate()
            .filter(|&(o, s)| touched[o] && s > 0.0)
            .map(|(o, s)| (o as u32, s))
            .collect();
        // Ordinals follow ascending doc id, so ordinal order is the id tie-break.
        hits.sort_unstable_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        hits.truncate(depth);
        RankedList {
            entries: hits
                .into_iter()
                .map(|(o, score)| Hit {
                    doc_id: self.doc_ids[o as usize].clone(),
                    score,
                })
                .collect(),
            depth,
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        codec::save(self, path)
    }

    pub fn load(path: &Path) -> Result<Self> {
        codec::load(path)
    }
}

pub fn save_index(index: &InvertedIndex, path: &Path) -> Result<()> {
    index.save(path)
}

pub fn load_index(path: &Path) -> Result<InvertedIndex> {
    InvertedIndex::load(path)
}

/// Query terms with strictly positive weights, no term repeated.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct WeightedQuery {
    terms: Vec<(Term, f64)>,
}

impl WeightedQuery {
    pub fn new(terms: Vec<(Term, f64)>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for (t, w) in &terms {
            if !(w.is_finite() && *w > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "weight for {t} must be positive, got {w}"
                )));
            }
            if !seen.insert(t.as_str()) {
                return Err(Error::InvalidConfig(format!("duplicate query term {t}")));
            }
        }
        Ok(WeightedQuery { terms })
    }

    /// Every distinct term at `weight`, keeping first-occurrence order.
    pub fn uniform<'a>(terms: impl IntoIterator<Item = &'a Term>, weight: f64) -> Self {
        let mut out: Vec<(Term, f64)> = Vec::new();
        for t in terms {
            if !out.iter().any(|(u, _)| u == t) {
                out.push((t.clone(), weight));
            }
        }
        WeightedQuery { terms: out }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Term, f64)> {
        self.terms.iter().map(|(t, w)| (t, *w))
    }

    pub fn weight(&self, term: &str) -> Option<f64> {
        self.terms.iter().find(|(t, _)| t.as_str() == term).map(|(_, w)| *w)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Hit {
    pub doc_id: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct RankedList {
    pub entries: Vec<Hit>,
    pub depth: usize,
}

impl RankedList {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn doc_ids(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|h| h.doc_id.as_str())
    }

    /// Checks descending score, ascending id among equal scores, and the depth bound.
    pub fn is_canonical(&self) -> bool {
        self.entries.len() <= self.depth
            && self
                .entries
                .windows(2)
                .all(|w| match w[0].score.total_cmp(&w[1].score) {
                    Ordering::Greater => true,
                    Ordering::Equal => w[0].doc_id < w[1].doc_id,
                    Ordering::Less => false,
                })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Document;
    use approx::assert_relative_eq;

    fn store(texts: &[(&str, &str)]) -> DocumentStore {
        DocumentStore::from_documents(texts.iter().map(|(id, text)| Document {
            id: id.to_string(),
            title: text.to_string(),
            abstract_text: String::new(),
            body: None,
            venue: String::new(),
            year: None,
            references: vec![],
        }))
        .unwrap()
    }

    fn q(terms: &[&str]) -> WeightedQuery {
        WeightedQuery::uniform(terms.iter().map(|t| Term::from(*t)).collect::<Vec<_>>().iter(), 1.0)
    }

    #[test]
    fn empty_store() {
        let idx = build_index(&DocumentStore::default(), &AnalysisConfig::default());
        assert_eq!(idx.doc_count(), 0);
        assert!(idx.search(&q(&["anything"]), 10).is_empty());
    }

    #[test]
    fn single_doc_postings() {
        let idx = build_index(&store(&[("d1", "neural parsing")]), &AnalysisConfig::default());
        assert_eq!(idx.df("neural"), 1);
        assert_eq!(idx.df("pars"), 1);
        assert_eq!(idx.vocabulary().len(), 2);
        assert_eq!(idx.stats().doc_len, &[2]);
    }

    #[test]
    fn closed_form_value() {
        // N=4, df=2, tf=2, dl=avgdl.
        let s = store(&[
            ("a", "foo foo bar"),
            ("b", "foo baz qux"),
            ("c", "bar baz qux"),
            ("d", "qux bar baz"),
        ]);
        let idx = build_index(&s, &AnalysisConfig::default());
        assert_relative_eq!(idx.avg_doc_len(), 3.0);
        let score = idx.bm25_term_score("foo", idx.ordinal("a").unwrap());
        assert_relative_eq!(score, 2f64.ln() * 4.4 / 3.2, epsilon = 1e-12);
        // ln(2) * 1.375, checked independently.
        assert_relative_eq!(score, 0.953077, epsilon = 1e-6);
    }

    #[test]
    fn absent_term_scores_zero() {
        let idx = build_index(&store(&[("a", "foo"), ("b", "bar")]), &AnalysisConfig::default());
        assert_eq!(idx.bm25_term_score("foo", idx.ordinal("b").unwrap()), 0.0);
        assert_eq!(idx.bm25_term_score("missing", 0), 0.0);
    }

    #[test]
    fn tf_monotone() {
        let p = Bm25Params::default();
        assert!(bm25_tf(2, 10, 10.0, p) > bm25_tf(1, 10, 10.0, p));
        assert!(bm25_tf(2, 20, 10.0, p) < bm25_tf(2, 10, 10.0, p));
    }

    #[test]
    fn idf_non_negative() {
        for n in 1..50 {
            for df in 1..=n {
                assert!(bm25_idf(n, df) >= 0.0);
            }
        }
    }

    #[test]
    fn no_matching_terms_is_empty() {
        let idx = build_index(&store(&[("a", "foo")]), &AnalysisConfig::default());
        assert!(idx.search(&q(&["zzz"]), 10).is_empty());
    }

    #[test]
    fn ties_break_by_id_and_depth_truncates() {
        let idx = build_index(
            &store(&[("c", "foo"), ("a", "foo"), ("b", "foo")]),
            &AnalysisConfig::default(),
        );
        let r = idx.search(&q(&["foo"]), 2);
        assert_eq!(r.doc_ids().collect::<Vec<_>>(), ["a", "b"]);
        assert!(r.is_canonical());
    }

    #[test]
    fn weights_scale_contributions() {
        let idx = build_index(&store(&[("a", "foo"), ("b", "bar")]), &AnalysisConfig::default());
        let wq = WeightedQuery::new(vec![(Term::from("foo"), 0.5), (Term::from("bar"), 1.0)]).unwrap();
        let r = idx.search(&wq, 10);
        assert_eq!(r.doc_ids().collect::<Vec<_>>(), ["b", "a"]);
        assert_relative_eq!(r.entries[1].score, 0.5 * r.entries[0].score, epsilon = 1e-12);
    }

    #[test]
    fn weighted_query_validation() {
        assert!(WeightedQuery::new(vec![(Term::from("a"), 0.0)]).is_err());
        assert!(WeightedQuery::new(vec![(Term::from("a"), 1.0), (Term::from("a"), 0.7)]).is_err());
        let u = WeightedQuery::uniform([Term::from("a"), Term::from("b"), Term::from("a")].iter(), 1.0);
        assert_eq!(u.len(), 2);
    }

    #[test]
    fn forward_index_matches_postings() {
        let idx = build_index(
            &store(&[("a", "foo foo bar"), ("b", "bar")]),
            &AnalysisConfig::default(),
        );
        let terms: Vec<(String, u32)> = idx.doc_terms(0).map(|(t, tf)| (t.to_string(), tf)).collect();
        assert_eq!(terms, [("bar".to_string(), 1), ("foo".to_string(), 2)]);
    }
}
