//! Seeded workloads shared by the benchmarks.

use qebert_core::{
    build_citation_graph, build_index, AnalysisConfig, CitationGraph, DocumentStore, EmbeddingTable, InvertedIndex,
};
use qebert_testkit::synth::{random_query, random_store, random_table, CorpusSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub struct Workload {
    pub analysis: AnalysisConfig,
    pub store: DocumentStore,
    pub index: InvertedIndex,
    pub graph: CitationGraph,
    pub table: EmbeddingTable,
    pub queries: Vec<String>,
}

impl Workload {
    pub fn new(docs: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let analysis = AnalysisConfig::default();
        let (store, vocab) = random_store(
            &mut rng,
            &CorpusSpec {
                docs,
                vocab: 2_000,
                max_len: 150,
            },
        );
        let table = random_table(&mut rng, &vocab, 64, 0.9);
        let queries = (0..64).map(|_| random_query(&mut rng, &vocab)).collect();
        Workload {
            index: build_index(&store, &analysis),
            graph: build_citation_graph(&store),
            analysis,
            store,
            table,
            queries,
        }
    }
}
