//! Seeded random corpora, queries and embedding tables.

use qebert_core::{analyze, AnalysisConfig, Document, DocumentStore, EmbeddingTable, Term};
use rand::seq::SliceRandom;
use rand::Rng;

const ONSETS: &[&str] = &[
    "b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "t", "v", "z", "br", "st", "pl",
];
const NUCLEI: &[&str] = &["a", "e", "i", "o", "u", "ai", "ou"];
const CODAS: &[&str] = &[
    "", "n", "r", "m", "x", "nd", "ck", "ing", "ed", "er", "ation", "ness", "s",
];

/// `size` distinct pronounceable words. Suffixes are mixed in so the stemmer
/// has real work to do; some words may share a stem.
pub fn vocabulary(rng: &mut impl Rng, size: usize) -> Vec<String> {
    let mut out: Vec<String> = Vec::with_capacity(size);
    let mut seen = std::collections::HashSet::new();
    while out.len() < size {
        let syllables = rng.gen_range(1..=3);
        let mut w = String::new();
        for _ in 0..syllables {
            w.push_str(ONSETS.choose(rng).unwrap());
            w.push_str(NUCLEI.choose(rng).unwrap());
        }
        w.push_str(CODAS.choose(rng).unwrap());
        if w.len() >= 2 && seen.insert(w.clone()) {
            out.push(w);
        }
    }
    out
}

/// Skewed pick so some words are frequent and most are rare.
fn pick<'a>(rng: &mut impl Rng, vocab: &'a [String]) -> &'a str {
    let x: f64 = rng.gen::<f64>().powf(2.5);
    &vocab[((x * vocab.len() as f64) as usize).min(vocab.len() - 1)]
}

const NOISE: &[&str] = &["the", "of", "and", "2019", "a", "with", "3.5"];

fn words(rng: &mut impl Rng, vocab: &[String], n: usize) -> String {
    let mut s = Vec::with_capacity(n);
    for _ in 0..n {
        if rng.gen_bool(0.1) {
            s.push(*NOISE.choose(rng).unwrap());
        } else {
            s.push(pick(rng, vocab));
        }
    }
    s.join(" ")
}

pub struct CorpusSpec {
    pub docs: usize,
    pub vocab: usize,
    pub max_len: usize,
}

/// Random store with ids `D0000..`, random titles/abstracts/bodies, stopwords
/// and numbers sprinkled in, and references that include in-corpus papers,
/// dangling ids, self-citations and duplicates.
pub fn random_store(rng: &mut impl Rng, spec: &CorpusSpec) -> (DocumentStore, Vec<String>) {
    let vocab = vocabulary(rng, spec.vocab);
    let mut docs = Vec::with_capacity(spec.docs);
    for i in 0..spec.docs {
        let title_len = rng.gen_range(1..6);
        let title = words(rng, &vocab, title_len);
        let abs_len = rng.gen_range(0..spec.max_len.max(1));
        let abstract_text = words(rng, &vocab, abs_len);
        let body = if rng.gen_bool(0.3) {
            let n = rng.gen_range(0..spec.max_len.max(1));
            Some(words(rng, &vocab, n))
        } else {
            None
        };
        let n_refs = rng.gen_range(0..6);
        let references = (0..n_refs)
            .map(|_| match rng.gen_range(0..10) {
                0 => format!("X{}", rng.gen_range(0..50)),
                1 => format!("D{i:04}"),
                _ => format!("D{:04}", rng.gen_range(0..spec.docs)),
            })
            .collect();
        docs.push(Document {
            id: format!("D{i:04}"),
            title,
            abstract_text,
            body,
            venue: format!("V{}", rng.gen_range(0..7)),
            year: Some(1990 + rng.gen_range(0..30)),
            references,
        });
    }
    (DocumentStore::from_documents(docs).expect("unique ids"), vocab)
}

/// A query of 1..=4 vocabulary words, occasionally with a stopword.
pub fn random_query(rng: &mut impl Rng, vocab: &[String]) -> String {
    let n = rng.gen_range(1..=4);
    let mut words: Vec<&str> = (0..n).map(|_| vocab.choose(rng).unwrap().as_str()).collect();
    if rng.gen_bool(0.2) {
        words.push("the");
    }
    words.join(" ")
}

/// Random vectors for a random subset (about `coverage`) of the analyzed vocabulary.
pub fn random_table(rng: &mut impl Rng, vocab: &[String], dimension: usize, coverage: f64) -> EmbeddingTable {
    let analysis = AnalysisConfig::default();
    let mut terms: Vec<Term> = vocab.iter().flat_map(|w| analyze(w, &analysis)).collect();
    terms.sort();
    terms.dedup();
    let mut table = EmbeddingTable::new(dimension);
    for t in terms {
        if rng.gen_bool(coverage) {
            let v: Vec<f64> = (0..dimension).map(|_| rng.gen_range(-1.0..1.0)).collect();
            table.insert(t, &v).unwrap();
        }
    }
    table
}
