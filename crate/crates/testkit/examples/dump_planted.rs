//! Writes the planted scenario files into a directory.
fn main() {
    let dir = std::path::PathBuf::from(std::env::args().nth(1).expect("usage: dump_planted <dir>"));
    let s = qebert_testkit::planted::PlantedScenario::build();
    std::fs::create_dir_all(&dir).unwrap();
    std::fs::write(dir.join("corpus.jsonl"), s.corpus_jsonl()).unwrap();
    std::fs::write(dir.join("qrels.txt"), s.qrels_text()).unwrap();
    std::fs::write(dir.join("topics.tsv"), s.topics_tsv()).unwrap();
    std::fs::write(dir.join("planted.vec"), s.embeddings_text()).unwrap();
}
