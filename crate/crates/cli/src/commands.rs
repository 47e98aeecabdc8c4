use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use qebert_core::corpus::parse_corpus_with_report;
use qebert_core::eval::{load_qrels, load_run};
use qebert_core::expansion::initial_retrieval;
use qebert_core::fsutil::atomic_write;
use qebert_core::index::build_index_with;
use qebert_core::{
    build_citation_graph, evaluate_runs, graph_stats, train_embeddings, CitationGraph, DocumentStore, EmbeddingTable,
    ExpansionConfig, InvertedIndex, Pipeline, RankedList, RunFile,
};

use crate::config::{require, AppConfig};
use crate::failure::{data, internal, CliResult};
use crate::topics::Topics;
use crate::Mode;

pub const BASELINE_TAG: &str = "bm25";
pub const NO_CITATIONS_TAG: &str = "qe-nocite";
pub const FULL_TAG: &str = "qebert";

/// Prints a line; a closed pipe (`| head`) ends the command quietly.
macro_rules! say {
    ($out:expr, $($arg:tt)*) => {
        match writeln!($out, $($arg)*) {
            Ok(()) => {}
            Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => return Ok(()),
            Err(e) => return Err(internal(format!("cannot write output: {e}"))),
        }
    };
}

fn load_store(config: &AppConfig) -> CliResult<DocumentStore> {
    let path = require(&config.corpus_path, "corpus_path")?;
    let (store, report) = parse_corpus_with_report(path)?;
    if !report.invalid_lines.is_empty() {
        log::warn!(
            "{}: skipped {} invalid line(s)",
            path.display(),
            report.invalid_lines.len()
        );
    }
    Ok(store)
}

/// Index, graph, corpus and embeddings, as needed by the expansion commands.
struct Loaded {
    index: InvertedIndex,
    graph: CitationGraph,
    store: DocumentStore,
    table: EmbeddingTable,
}

impl Loaded {
    fn read(config: &AppConfig) -> CliResult<Self> {
        let index = InvertedIndex::load(require(&config.index_path, "index_path")?)?;
        let graph = CitationGraph::load(&config.graph_path()?)?;
        let store = load_store(config)?;
        let table = EmbeddingTable::import(require(&config.embeddings_path, "embeddings_path")?)?;
        if store.count() != index.doc_count() {
            log::warn!(
                "corpus has {} documents but the index was built over {}; rebuild the index",
                store.count(),
                index.doc_count()
            );
        }
        Ok(Loaded {
            index,
            graph,
            store,
            table,
        })
    }

    fn pipeline<'a>(&'a self, config: &'a AppConfig, expansion: &'a ExpansionConfig) -> Pipeline<'a> {
        Pipeline {
            index: &self.index,
            table: &self.table,
            graph: &self.graph,
            store: &self.store,
            analysis: &config.analysis,
            config: expansion,
        }
    }
}

pub fn cmd_index(config: &AppConfig, out: &mut dyn Write) -> CliResult<()> {
    let path = require(&config.corpus_path, "corpus_path")?;
    let index_path = require(&config.index_path, "index_path")?;
    let graph_path = config.graph_path()?;
    let (store, report) = parse_corpus_with_report(path)?;
    let graph = build_citation_graph(&store);
    let index = build_index_with(&store, &config.analysis, config.bm25);
    index.save(index_path)?;
    graph.save(&graph_path)?;

    let g = graph_stats(&graph, &store);
    let s = index.stats();
    say!(out, "documents\t{}", s.doc_count);
    say!(out, "vocabulary\t{}", s.vocabulary_size);
    say!(out, "avg_doc_len\t{:.4}", s.avg_doc_len);
    say!(out, "citation_nodes\t{}", g.node_count);
    say!(out, "citation_edges\t{}", g.edge_count);
    say!(out, "dangling_references\t{}", g.dangling_count);
    say!(out, "self_citations_dropped\t{}", graph.self_loops_dropped());
    say!(out, "duplicate_references_dropped\t{}", report.duplicate_references);
    say!(out, "venues\t{}", g.venue_count);
    say!(out, "invalid_lines\t{}", report.invalid_lines.len());
    Ok(())
}

pub fn cmd_train(config: &AppConfig, out: &mut dyn Write) -> CliResult<()> {
    let target = require(&config.embeddings_path, "embeddings_path")?;
    let store = load_store(config)?;
    let table = train_embeddings(&store, &config.analysis, &config.train)?;
    table.export(target)?;
    say!(out, "vocabulary\t{}", table.vocab_size());
    say!(out, "dimension\t{}", table.dimension());
    Ok(())
}

fn print_ranking(out: &mut dyn Write, ranking: &RankedList, store: Option<&DocumentStore>) -> CliResult<()> {
    for (i, hit) in ranking.entries.iter().enumerate() {
        let title = store.and_then(|s| s.get(&hit.doc_id)).map_or("", |d| d.title.as_str());
        say!(out, "{}\t{}\t{:.6}\t{}", i + 1, hit.doc_id, hit.score, title);
    }
    Ok(())
}

pub fn cmd_search(config: &AppConfig, query: &str, mode: Mode, out: &mut dyn Write) -> CliResult<()> {
    match mode {
        Mode::Baseline => {
            let index = InvertedIndex::load(require(&config.index_path, "index_path")?)?;
            let ranking = initial_retrieval(&index, query, &config.analysis, &config.expansion)?;
            // Titles are a convenience; a baseline search works from the index alone.
            let store = config.corpus_path.as_ref().and_then(|_| load_store(config).ok());
            print_ranking(out, &ranking, store.as_ref())
        }
        Mode::Qe => {
            let loaded = Loaded::read(config)?;
            let (_, ranking) = loaded.pipeline(config, &config.expansion).expand_and_search(query)?;
            print_ranking(out, &ranking, Some(&loaded.store))
        }
    }
}

pub fn cmd_expand(config: &AppConfig, query: &str, out: &mut dyn Write) -> CliResult<()> {
    let loaded = Loaded::read(config)?;
    let expansion = loaded.pipeline(config, &config.expansion).expand(query)?;
    let json = serde_json::to_string_pretty(&expansion.audit()).map_err(|e| internal(e.to_string()))?;
    say!(out, "{json}");
    Ok(())
}

fn run_path(dir: &Path, tag: &str) -> PathBuf {
    dir.join(format!("{tag}.run"))
}

/// Writes `bm25.run`, `qe-nocite.run`, `qebert.run`, `qebert.audit.jsonl`,
/// `report.csv` and `report.txt` under the output directory.
pub fn cmd_eval(config: &AppConfig, extra_runs: &[PathBuf], out: &mut dyn Write) -> CliResult<()> {
    let qrels = load_qrels(require(&config.qrels_path, "qrels_path")?)?;
    let topics = Topics::load(require(&config.topics_path, "topics_path")?)?;
    let dir = require(&config.output_dir, "output_dir")?;
    fs::create_dir_all(dir).map_err(|e| data(format!("cannot create {}: {e}", dir.display())))?;
    let loaded = Loaded::read(config)?;

    let no_cite = ExpansionConfig {
        include_citations: false,
        ..config.expansion.clone()
    };
    let full = loaded.pipeline(config, &config.expansion);
    let partial = loaded.pipeline(config, &no_cite);

    let mut baseline_run = RunFile::new(BASELINE_TAG);
    let mut partial_run = RunFile::new(NO_CITATIONS_TAG);
    let mut full_run = RunFile::new(FULL_TAG);
    let mut audits = String::new();
    for (topic, query) in &topics.entries {
        let baseline = match initial_retrieval(&loaded.index, query, &config.analysis, &config.expansion) {
            Ok(r) => r,
            Err(e) => {
                log::warn!("topic {topic}: {e}; it will score 0");
                continue;
            }
        };
        baseline_run.insert_ranking(topic, &baseline);
        let (_, ranked) = partial.expand_and_search(query)?;
        partial_run.insert_ranking(topic, &ranked);
        let (expansion, ranked) = full.expand_and_search(query)?;
        full_run.insert_ranking(topic, &ranked);
        let mut audit = serde_json::to_value(expansion.audit()).map_err(|e| internal(e.to_string()))?;
        audit["topic"] = serde_json::Value::String(topic.clone());
        audits.push_str(&audit.to_string());
        audits.push('\n');
    }

    let mut runs = vec![baseline_run, partial_run, full_run];
    for run in &runs {
        run.write(&run_path(dir, &run.run_tag))?;
    }
    for path in extra_runs {
        runs.push(load_run(path)?);
    }
    let write_text = |name: &str, text: &str| -> CliResult<()> {
        let path = dir.join(name);
        atomic_write(&path, |w| {
            w.write_all(text.as_bytes()).map_err(|e| qebert_core::Error::Io {
                path: path.clone(),
                source: e,
            })
        })?;
        Ok(())
    };
    write_text("qebert.audit.jsonl", &audits)?;

    let mut header = config.provenance();
    header.push(("topics".into(), topics.len().to_string()));
    let report = evaluate_runs(&runs, &qrels).with_header(header);
    let table = report.to_table();
    write_text("report.csv", &report.to_csv())?;
    write_text("report.txt", &table)?;
    say!(out, "{}", table.trim_end());
    Ok(())
}
