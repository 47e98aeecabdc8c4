//! Corpus ingestion: JSON Lines papers into a [`DocumentStore`] and the
//! directed paper-cites-paper [`CitationGraph`].

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fsutil::{atomic_write, io_err};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub title: String,
    #[serde(rename = "abstract")]
    pub abstract_text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub body: Option<String>,
    #[serde(default)]
    pub venue: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub year: Option<i64>,
    pub references: Vec<String>,
}

impl Document {
    /// The single indexed field: title, abstract and body joined by spaces.
    pub fn indexed_text(&self) -> String {
        let mut s = String::with_capacity(
            self.title.len() + self.abstract_text.len() + self.body.as_ref().map_or(0, String::len) + 2,
        );
        s.push_str(&self.title);
        s.push(' ');
        s.push_str(&self.abstract_text);
        s.push(' ');
        if let Some(body) = &self.body {
            s.push_str(body);
        }
        s
    }
}

/// Id-keyed, immutable after construction. Iteration is in ascending id order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct DocumentStore {
    documents: BTreeMap<String, Document>,
}

impl DocumentStore {
    /// Builds a store from in-memory documents, applying the same id and
    /// reference rules as [`parse_corpus`].
    pub fn from_documents(docs: impl IntoIterator<Item = Document>) -> Result<Self> {
        let mut store = DocumentStore::default();
        for mut doc in docs {
            if doc.id.is_empty() {
                return Err(Error::InvalidConfig("document with empty id".into()));
            }
            dedup_references(&mut doc.references);
            if store.documents.contains_key(&doc.id) {
                return Err(Error::InvalidConfig(format!("duplicate document id {:?}", doc.id)));
            }
            store.documents.insert(doc.id.clone(), doc);
        }
        Ok(store)
    }

    pub fn count(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Document> {
        self.documents.get(id)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.documents.contains_key(id)
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &Document> {
        self.documents.values()
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.documents.keys().map(String::as_str)
    }
}

/// What ingestion skipped or rewrote.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IngestReport {
    /// `(line number, reason)` for every skipped line.
    pub invalid_lines: Vec<(usize, String)>,
    /// Reference entries as they appeared in the file, before deduplication.
    pub raw_references: usize,
    pub duplicate_references: usize,
}

#[derive(Deserialize)]
struct RawDocument {
    id: String,
    title: String,
    #[serde(rename = "abstract")]
    abstract_text: String,
    references: Vec<String>,
    #[serde(default)]
    body: Option<String>,
    #[serde(default)]
    venue: Option<String>,
    #[serde(default)]
    year: Option<i64>,
}

/// Reads a JSON Lines corpus. Lines that fail the schema are skipped with a
/// warning naming the line number.
pub fn parse_corpus(path: &Path) -> Result<DocumentStore> {
    parse_corpus_with_report(path).map(|(store, _)| store)
}

pub fn parse_corpus_with_report(path: &Path) -> Result<(DocumentStore, IngestReport)> {
    let file = File::open(path).map_err(io_err(path))?;
    read_corpus(file, path)
}

pub fn read_corpus<R: Read>(reader: R, origin: &Path) -> Result<(DocumentStore, IngestReport)> {
    let mut store = DocumentStore::default();
    let mut report = IngestReport::default();
    let reader = BufReader::new(reader);

    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(io_err(origin))?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawDocument = match serde_json::from_str(&line) {
            Ok(raw) => raw,
            Err(e) => {
                skip(&mut report, origin, line_no, e.to_string());
                continue;
            }
        };
        if raw.id.is_empty() {
            skip(&mut report, origin, line_no, "empty id".into());
            continue;
        }
        if store.documents.contains_key(&raw.id) {
            skip(&mut report, origin, line_no, format!("duplicate id {:?}", raw.id));
            continue;
        }
        let mut references = raw.references;
        report.raw_references += references.len();
        let dropped = dedup_references(&mut references);
        if dropped > 0 {
            log::info!(
                "{}:{line_no}: dropped {dropped} duplicate reference(s) of {}",
                origin.display(),
                raw.id
            );
        }
        report.duplicate_references += dropped;
        let doc = Document {
            id: raw.id,
            title: raw.title,
            abstract_text: raw.abstract_text,
            body: raw.body,
            venue: raw.venue.unwrap_or_default(),
            year: raw.year,
            references,
        };
        store.documents.insert(doc.id.clone(), doc);
    }
    if report.duplicate_references > 0 {
        log::info!("dropped {} duplicate references in total", report.duplicate_references);
    }
    Ok((store, report))
}

fn skip(report: &mut IngestReport, origin: &Path, line: usize, reason: String) {
    log::warn!("{}:{line}: skipping line: {reason}", origin.display());
    report.invalid_lines.push((line, reason));
}

/// Keeps the first occurrence of each reference. Returns how many were dropped.
fn dedup_references(refs: &mut Vec<String>) -> usize {
    let before = refs.len();
    let mut seen = HashSet::with_capacity(before);
    refs.retain(|r| seen.insert(r.clone()));
    before - refs.len()
}

/// Citation edges between corpus papers. Edges to papers outside the corpus
/// and self-citations are counted but not stored.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CitationGraph {
    nodes: BTreeSet<String>,
    out_edges: BTreeMap<String, Vec<String>>,
    in_edges: BTreeMap<String, Vec<String>>,
    dangling_count: usize,
    self_loops_dropped: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct GraphStats {
    pub node_count: usize,
    pub edge_count: usize,
    pub dangling_count: usize,
    pub venue_count: usize,
}

pub fn build_citation_graph(store: &DocumentStore) -> CitationGraph {
    let mut graph = CitationGraph {
        nodes: store.ids().map(str::to_owned).collect(),
        ..Default::default()
    };
    for doc in store.iter() {
        let mut cited = Vec::new();
        for target in &doc.references {
            if *target == doc.id {
                graph.self_loops_dropped += 1;
            } else if store.contains(target) {
                cited.push(target.clone());
                graph.in_edges.entry(target.clone()).or_default().push(doc.id.clone());
            } else {
                graph.dangling_count += 1;
            }
        }
        if !cited.is_empty() {
            graph.out_edges.insert(doc.id.clone(), cited);
        }
    }
    graph
}

impl CitationGraph {
    /// Papers cited by `id`, in reference-list order. Unknown ids yield `[]`.
    pub fn out_references(&self, id: &str) -> &[String] {
        self.out_edges.get(id).map_or(&[], Vec::as_slice)
    }

    /// Papers citing `id`, in ascending id order.
    pub fn in_references(&self, id: &str) -> &[String] {
        self.in_edges.get(id).map_or(&[], Vec::as_slice)
    }

    pub fn nodes(&self) -> impl Iterator<Item = &str> {
        self.nodes.iter().map(String::as_str)
    }

    pub fn edge_count(&self) -> usize {
        self.out_edges.values().map(Vec::len).sum()
    }

    pub fn dangling_count(&self) -> usize {
        self.dangling_count
    }

    pub fn self_loops_dropped(&self) -> usize {
        self.self_loops_dropped
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        atomic_write(path, |w| {
            serde_json::to_writer(&mut *w, self).map_err(|e| Error::io(path, e.into()))?;
            w.write_all(b"\n").map_err(io_err(path))
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(io_err(path))?;
        serde_json::from_reader(BufReader::new(file)).map_err(|e| Error::parse(path, e.line(), e.to_string()))
    }
}

/// Venues are counted as distinct non-empty venue strings.
pub fn graph_stats(graph: &CitationGraph, store: &DocumentStore) -> GraphStats {
    let venues: BTreeSet<&str> = store
        .iter()
        .map(|d| d.venue.as_str())
        .filter(|v| !v.is_empty())
        .collect();
    GraphStats {
        node_count: graph.nodes.len(),
        edge_count: graph.edge_count(),
        dangling_count: graph.dangling_count,
        venue_count: venues.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(id: &str, refs: &[&str]) -> Document {
        Document {
            id: id.into(),
            title: format!("title {id}"),
            abstract_text: String::new(),
            body: None,
            venue: String::new(),
            year: None,
            references: refs.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn read(text: &str) -> (DocumentStore, IngestReport) {
        read_corpus(text.as_bytes(), Path::new("mem.jsonl")).unwrap()
    }

    #[test]
    fn empty_file_gives_empty_store() {
        let (store, report) = read("");
        assert_eq!(store.count(), 0);
        assert!(report.invalid_lines.is_empty());
    }

    #[test]
    fn single_line() {
        let (store, _) = read(r#"{"id":"A","title":"t","abstract":"a","references":[],"extra":1}"#);
        assert_eq!(store.count(), 1);
        assert_eq!(store.get("A").unwrap().title, "t");
    }

    #[test]
    fn invalid_lines_are_skipped_with_line_numbers() {
        let text = concat!(
            r#"{"id":"A","title":"t","abstract":"a","references":[]}"#,
            "\n",
            "not json\n",
            r#"{"id":"B","title":"t","references":[]}"#,
            "\n",
            r#"{"id":"","title":"t","abstract":"a","references":[]}"#,
            "\n",
            r#"{"id":"A","title":"again","abstract":"a","references":[]}"#,
            "\n",
            r#"{"id":"C","title":"t","abstract":"a","references":["A"],"year":"x"}"#,
            "\n",
        );
        let (store, report) = read(text);
        assert_eq!(store.count(), 1);
        let lines: Vec<usize> = report.invalid_lines.iter().map(|(l, _)| *l).collect();
        assert_eq!(lines, [2, 3, 4, 5, 6]);
        assert_eq!(store.get("A").unwrap().title, "t");
    }

    #[test]
    fn duplicate_references_dropped_first_kept() {
        let (store, report) = read(r#"{"id":"A","title":"t","abstract":"a","references":["C","B","C","B"]}"#);
        assert_eq!(store.get("A").unwrap().references, ["C", "B"]);
        assert_eq!(report.duplicate_references, 2);
        assert_eq!(report.raw_references, 4);
    }

    #[test]
    fn missing_file_is_io_error() {
        let err = parse_corpus(Path::new("/nonexistent/corpus.jsonl")).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }

    #[test]
    fn direct_edges() {
        let store = DocumentStore::from_documents([doc("A", &["B", "C"]), doc("B", &[]), doc("C", &[])]).unwrap();
        let g = build_citation_graph(&store);
        assert_eq!(g.out_references("A"), ["B", "C"]);
        assert_eq!(g.in_references("B"), ["A"]);
        assert!(g.out_references("B").is_empty());
        assert!(g.out_references("nope").is_empty());
    }

    #[test]
    fn self_loop_and_dangling_dropped() {
        let store = DocumentStore::from_documents([doc("A", &["A", "X"])]).unwrap();
        let g = build_citation_graph(&store);
        assert!(g.out_references("A").is_empty());
        assert_eq!(g.dangling_count(), 1);
        assert_eq!(g.self_loops_dropped(), 1);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn stats() {
        let empty = DocumentStore::default();
        assert_eq!(
            graph_stats(&build_citation_graph(&empty), &empty),
            GraphStats::default()
        );

        let mut a = doc("A", &["B"]);
        a.venue = "ACL".into();
        let mut b = doc("B", &["C"]);
        b.venue = "ACL".into();
        let mut c = doc("C", &[]);
        c.venue = "EMNLP".into();
        let store = DocumentStore::from_documents([a, b, c]).unwrap();
        let s = graph_stats(&build_citation_graph(&store), &store);
        assert_eq!(
            s,
            GraphStats {
                node_count: 3,
                edge_count: 2,
                dangling_count: 0,
                venue_count: 2
            }
        );
    }

    #[test]
    fn graph_json_roundtrip() {
        let store = DocumentStore::from_documents([doc("A", &["B", "Z"]), doc("B", &["A"])]).unwrap();
        let g = build_citation_graph(&store);
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("g.json");
        g.save(&p).unwrap();
        assert_eq!(CitationGraph::load(&p).unwrap(), g);
    }

    #[test]
    fn indexed_text_joins_fields() {
        let mut d = doc("A", &[]);
        d.abstract_text = "abs".into();
        d.body = Some("body".into());
        assert_eq!(d.indexed_text(), "title A abs body");
    }
}
