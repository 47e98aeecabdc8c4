//! Linear-scan BM25: re-derives every statistic from the raw analyzed text of
//! each document on every call.

use qebert_core::{analyze, AnalysisConfig, DocumentStore};

pub struct BruteForceBm25 {
    docs: Vec<(String, Vec<String>)>,
    k1: f64,
    b: f64,
}

impl BruteForceBm25 {
    pub fn new(store: &DocumentStore, analysis: &AnalysisConfig) -> Self {
        let docs = store
            .iter()
            .map(|d| {
                let text = format!("{} {} {}", d.title, d.abstract_text, d.body.as_deref().unwrap_or(""));
                let terms = analyze(&text, analysis).into_iter().map(|t| t.into_string()).collect();
                (d.id.clone(), terms)
            })
            .collect();
        BruteForceBm25 { docs, k1: 1.2, b: 0.75 }
    }

    /// `(doc id, score)` for every document with a positive score, sorted by
    /// score descending then id ascending, cut to `depth`.
    pub fn search(&self, query: &[(String, f64)], depth: usize) -> Vec<(String, f64)> {
        let n = self.docs.len() as f64;
        let total: usize = self.docs.iter().map(|(_, t)| t.len()).sum();
        let avgdl = if self.docs.is_empty() { 0.0 } else { total as f64 / n };

        let mut scores = vec![0.0f64; self.docs.len()];
        let mut matched = vec![false; self.docs.len()];
        for (term, weight) in query {
            let df = self.docs.iter().filter(|(_, ts)| ts.contains(term)).count();
            if df == 0 {
                continue;
            }
            let df = df as f64;
            let idf = (1.0 + (n - df + 0.5) / (df + 0.5)).ln();
            for (i, (_, ts)) in self.docs.iter().enumerate() {
                let tf = ts.iter().filter(|t| *t == term).count();
                if tf == 0 {
                    continue;
                }
                let tf = tf as f64;
                let dl = ts.len() as f64;
                let norm = 1.0 - self.b + self.b * dl / avgdl;
                scores[i] += weight * (idf * (tf * (self.k1 + 1.0) / (tf + self.k1 * norm)));
                matched[i] = true;
            }
        }
        let mut out: Vec<(String, f64)> = self
            .docs
            .iter()
            .zip(scores)
            .zip(matched)
            .filter(|(_, m)| *m)
            .map(|(((id, _), s), _)| (id.clone(), s))
            .filter(|(_, s)| *s > 0.0)
            .collect();
        out.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(&b.0)));
        out.truncate(depth);
        out
    }
}
