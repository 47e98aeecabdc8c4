//! TREC-style evaluation: graded qrels, run files, P@k and nDCG@k.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fsutil::{atomic_write, io_err};
use crate::index::RankedList;

pub const MAX_GRADE: u8 = 4;

/// Topic ids compare numerically when both parse as integers, otherwise as
/// strings, so "2" sorts before "10".
pub fn compare_topics(a: &str, b: &str) -> Ordering {
    match (a.parse::<u64>(), b.parse::<u64>()) {
        (Ok(x), Ok(y)) => x.cmp(&y).then_with(|| a.cmp(b)),
        (Ok(_), Err(_)) => Ordering::Less,
        (Err(_), Ok(_)) => Ordering::Greater,
        _ => a.cmp(b),
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Qrels {
    judgments: HashMap<String, HashMap<String, u8>>,
}

impl Qrels {
    pub fn insert(&mut self, topic: &str, doc: &str, grade: u8) -> Result<()> {
        if grade > MAX_GRADE {
            return Err(Error::InvalidConfig(format!("grade {grade} outside 0..={MAX_GRADE}")));
        }
        let docs = self.judgments.entry(topic.to_owned()).or_default();
        if docs.contains_key(doc) {
            return Err(Error::InvalidConfig(format!("duplicate judgment for ({topic}, {doc})")));
        }
        docs.insert(doc.to_owned(), grade);
        Ok(())
    }

    /// Unjudged documents are grade 0.
    pub fn grade(&self, topic: &str, doc: &str) -> u8 {
        self.judgments.get(topic).and_then(|d| d.get(doc)).copied().unwrap_or(0)
    }

    pub fn topics(&self) -> Vec<&str> {
        let mut t: Vec<&str> = self.judgments.keys().map(String::as_str).collect();
        t.sort_by(|a, b| compare_topics(a, b));
        t
    }

    pub fn judged(&self, topic: &str) -> impl Iterator<Item = (&str, u8)> {
        self.judgments
            .get(topic)
            .into_iter()
            .flatten()
            .map(|(d, g)| (d.as_str(), *g))
    }

    pub fn relevant_count(&self, topic: &str) -> usize {
        self.judged(topic).filter(|&(_, g)| g >= 1).count()
    }

    pub fn len(&self) -> usize {
        self.judgments.values().map(HashMap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Parses `topic 0 doc grade` lines. Blank lines are ignored.
pub fn parse_qrels<R: BufRead>(reader: R, origin: &Path) -> Result<Qrels> {
    let mut qrels = Qrels::default();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(io_err(origin))?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        let [topic, _iter, doc, grade] = fields[..] else {
            return Err(Error::parse(
                origin,
                line_no,
                format!("expected 4 fields, found {}", fields.len()),
            ));
        };
        let grade: u8 = match grade.parse::<i64>() {
            Ok(g) if (0..=i64::from(MAX_GRADE)).contains(&g) => g as u8,
            Ok(g) => {
                return Err(Error::parse(
                    origin,
                    line_no,
                    format!("grade {g} outside 0..={MAX_GRADE}"),
                ))
            }
            Err(_) => return Err(Error::parse(origin, line_no, format!("bad grade {grade:?}"))),
        };
        qrels
            .insert(topic, doc, grade)
            .map_err(|e| Error::parse(origin, line_no, e.to_string()))?;
    }
    Ok(qrels)
}

pub fn load_qrels(path: &Path) -> Result<Qrels> {
    let file = File::open(path).map_err(io_err(path))?;
    parse_qrels(BufReader::new(file), path)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunEntry {
    pub doc_id: String,
    pub rank: usize,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct RunFile {
    pub run_tag: String,
    pub topics: BTreeMap<String, Vec<RunEntry>>,
}

impl RunFile {
    pub fn new(run_tag: impl Into<String>) -> Self {
        RunFile {
            run_tag: run_tag.into(),
            topics: BTreeMap::new(),
        }
    }

    /// Records a ranking for `topic`, assigning ranks from 1.
    pub fn insert_ranking(&mut self, topic: &str, ranking: &RankedList) {
        let entries = ranking
            .entries
            .iter()
            .enumerate()
            .map(|(i, h)| RunEntry {
                doc_id: h.doc_id.clone(),
                rank: i + 1,
                score: h.score,
            })
            .collect();
        self.topics.insert(topic.to_owned(), entries);
    }

    pub fn ranking(&self, topic: &str) -> Option<&[RunEntry]> {
        self.topics.get(topic).map(Vec::as_slice)
    }

    fn sorted_topics(&self) -> Vec<&str> {
        let mut t: Vec<&str> = self.topics.keys().map(String::as_str).collect();
        t.sort_by(|a, b| compare_topics(a, b));
        t
    }

    /// `topic Q0 doc rank score tag`, topics in [`compare_topics`] order.
    pub fn write_to(&self, w: &mut dyn Write) -> std::io::Result<()> {
        for topic in self.sorted_topics() {
            for e in &self.topics[topic] {
                writeln!(w, "{topic} Q0 {} {} {} {}", e.doc_id, e.rank, e.score, self.run_tag)?;
            }
        }
        Ok(())
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        atomic_write(path, |w| self.write_to(w).map_err(io_err(path)))
    }
}

pub fn write_run(results: &[(String, RankedList)], run_tag: &str, path: &Path) -> Result<()> {
    let mut run = RunFile::new(run_tag);
    for (topic, ranking) in results {
        run.insert_ranking(topic, ranking);
    }
    run.write(path)
}

/// Parses a run file. Ranks must run 1, 2, ... per topic and scores must not
/// increase with rank. The tag of the first line names the run.
pub fn parse_run<R: BufRead>(reader: R, origin: &Path) -> Result<RunFile> {
    let mut run = RunFile::default();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(io_err(origin))?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        let [topic, _q0, doc, rank, score, tag] = fields[..] else {
            return Err(Error::parse(
                origin,
                line_no,
                format!("expected 6 fields, found {}", fields.len()),
            ));
        };
        let rank: usize = rank
            .parse()
            .map_err(|_| Error::parse(origin, line_no, format!("bad rank {rank:?}")))?;
        let score: f64 = score
            .parse()
            .map_err(|_| Error::parse(origin, line_no, format!("bad score {score:?}")))?;
        if run.run_tag.is_empty() {
            run.run_tag = tag.to_owned();
        }
        let entries = run.topics.entry(topic.to_owned()).or_default();
        if rank != entries.len() + 1 {
            return Err(Error::parse(
                origin,
                line_no,
                format!("rank {rank} for topic {topic}, expected {}", entries.len() + 1),
            ));
        }
        if entries.last().is_some_and(|prev| score > prev.score) {
            return Err(Error::parse(origin, line_no, "score increases with rank"));
        }
        entries.push(RunEntry {
            doc_id: doc.to_owned(),
            rank,
            score,
        });
    }
    Ok(run)
}

pub fn load_run(path: &Path) -> Result<RunFile> {
    let file = File::open(path).map_err(io_err(path))?;
    parse_run(BufReader::new(file), path)
}

/// Fraction of the top `k` that is judged grade >= 1. Missing ranks count as
/// non-relevant.
pub fn precision_at_k(ranking: &[RunEntry], qrels: &Qrels, topic: &str, k: usize) -> f64 {
    assert!(k >= 1, "k must be >= 1");
    let hits = ranking
        .iter()
        .take(k)
        .filter(|e| qrels.grade(topic, &e.doc_id) >= 1)
        .count();
    hits as f64 / k as f64
}

fn dcg(grades: impl Iterator<Item = u8>) -> f64 {
    grades
        .enumerate()
        .map(|(i, g)| (2f64.powi(i32::from(g)) - 1.0) / ((i + 2) as f64).log2())
        .sum()
}

/// Exponential-gain nDCG; 0 when the topic has no positive judgment.
pub fn ndcg_at_k(ranking: &[RunEntry], qrels: &Qrels, topic: &str, k: usize) -> f64 {
    assert!(k >= 1, "k must be >= 1");
    let mut ideal: Vec<u8> = qrels.judged(topic).map(|(_, g)| g).filter(|&g| g > 0).collect();
    ideal.sort_unstable_by(|a, b| b.cmp(a));
    let idcg = dcg(ideal.into_iter().take(k));
    if idcg == 0.0 {
        return 0.0;
    }
    let actual = dcg(ranking.iter().take(k).map(|e| qrels.grade(topic, &e.doc_id)));
    actual / idcg
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Metric {
    PrecisionAt(usize),
    NdcgAt(usize),
}

impl Metric {
    /// The reported suite: P@5, P@10, P@20, nDCG@10.
    pub const SUITE: [Metric; 4] = [
        Metric::PrecisionAt(5),
        Metric::PrecisionAt(10),
        Metric::PrecisionAt(20),
        Metric::NdcgAt(10),
    ];

    pub fn evaluate(self, ranking: &[RunEntry], qrels: &Qrels, topic: &str) -> f64 {
        match self {
            Metric::PrecisionAt(k) => precision_at_k(ranking, qrels, topic, k),
            Metric::NdcgAt(k) => ndcg_at_k(ranking, qrels, topic, k),
        }
    }

    pub fn name(self) -> String {
        match self {
            Metric::PrecisionAt(k) => format!("P@{k}"),
            Metric::NdcgAt(k) => format!("nDCG@{k}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricScores {
    pub metric: Metric,
    /// One value per report topic, in report topic order.
    pub per_topic: Vec<f64>,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub run_tag: String,
    pub metrics: Vec<MetricScores>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricReport {
    pub topics: Vec<String>,
    pub runs: Vec<RunReport>,
    /// `key=value` provenance lines echoed as report header comments.
    pub header: Vec<(String, String)>,
}

/// Evaluates every run on every qrels topic. Topics a run did not answer
/// score 0 on every metric.
pub fn evaluate_runs(runs: &[RunFile], qrels: &Qrels) -> MetricReport {
    let topics: Vec<String> = qrels.topics().into_iter().map(str::to_owned).collect();
    let reports = runs
        .iter()
        .map(|run| {
            let missing: Vec<&str> = topics
                .iter()
                .map(String::as_str)
                .filter(|t| run.ranking(t).is_none())
                .collect();
            if !missing.is_empty() {
                log::warn!(
                    "run {}: {} qrels topic(s) missing, scored 0: {}",
                    run.run_tag,
                    missing.len(),
                    missing.join(",")
                );
            }
            let metrics = Metric::SUITE
                .iter()
                .map(|&metric| {
                    let per_topic: Vec<f64> = topics
                        .iter()
                        .map(|t| run.ranking(t).map_or(0.0, |r| metric.evaluate(r, qrels, t)))
                        .collect();
                    let mean = if per_topic.is_empty() {
                        0.0
                    } else {
                        per_topic.iter().sum::<f64>() / per_topic.len() as f64
                    };
                    MetricScores {
                        metric,
                        per_topic,
                        mean,
                    }
                })
                .collect();
            RunReport {
                run_tag: run.run_tag.clone(),
                metrics,
            }
        })
        .collect();
    MetricReport {
        topics,
        runs: reports,
        header: Vec::new(),
    }
}

impl MetricReport {
    pub fn with_header(mut self, header: Vec<(String, String)>) -> Self {
        self.header = header;
        self
    }

    pub fn mean(&self, run_tag: &str, metric: Metric) -> Option<f64> {
        self.runs
            .iter()
            .find(|r| r.run_tag == run_tag)?
            .metrics
            .iter()
            .find(|m| m.metric == metric)
            .map(|m| m.mean)
    }

    /// `run_tag,metric,topic,value`; one row per topic plus an `ALL` mean row
    /// per (run, metric). Header entries are emitted as leading `#` lines.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.header {
            let _ = writeln!(out, "# {k}={v}");
        }
        out.push_str("run_tag,metric,topic,value\n");
        for run in &self.runs {
            for m in &run.metrics {
                for (topic, v) in self.topics.iter().zip(&m.per_topic) {
                    let _ = writeln!(out, "{},{},{},{:.6}", run.run_tag, m.metric.name(), topic, v);
                }
                let _ = writeln!(out, "{},{},ALL,{:.6}", run.run_tag, m.metric.name(), m.mean);
            }
        }
        out
    }

    /// Mean of every metric per run, one row per run.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.header {
            let _ = writeln!(out, "# {k}={v}");
        }
        let tag_width = self
            .runs
            .iter()
            .map(|r| r.run_tag.len())
            .max()
            .unwrap_or(0)
            .max("run".len());
        let _ = write!(out, "{:<tag_width$}", "run");
        for m in Metric::SUITE {
            let _ = write!(out, "  {:>8}", m.name());
        }
        out.push('\n');
        for run in &self.runs {
            let _ = write!(out, "{:<tag_width$}", run.run_tag);
            for m in &run.metrics {
                let _ = write!(out, "  {:>8.4}", m.mean);
            }
            out.push('\n');
        }
        let _ = writeln!(out, "({} topics)", self.topics.len());
        out
    }
}
