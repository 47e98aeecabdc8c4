//! Scholarly search with citation-aware query expansion.
//!
//! The crate covers the whole retrieval path: JSON Lines corpus ingestion and
//! the citation graph ([`corpus`]), deterministic text analysis ([`text`]), a
//! BM25 inverted index ([`index`]), term embeddings ([`embedding`]), the
//! four-phase expansion pipeline ([`expansion`]) and TREC-style evaluation
//! ([`eval`]).

pub mod corpus;
pub mod embedding;
pub mod error;
pub mod eval;
pub mod expansion;
pub mod fsutil;
pub mod index;
pub mod text;

pub use corpus::{build_citation_graph, graph_stats, parse_corpus, CitationGraph, Document, DocumentStore, GraphStats};
pub use embedding::{cosine, doc_embedding, train_embeddings, EmbeddingTable, TrainConfig};
pub use error::{Error, Result};
pub use eval::{evaluate_runs, load_qrels, MetricReport, Qrels, RunFile};
pub use expansion::{expand_and_search, CandidateTerm, ExpandedQuery, ExpansionConfig, Pipeline};
pub use index::{build_index, Bm25Params, InvertedIndex, RankedList, WeightedQuery};
pub use text::{analyze, AnalysisConfig, Term};
