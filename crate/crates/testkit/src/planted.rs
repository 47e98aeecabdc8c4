//! A corpus built so that expansion through citations must help.
//!
//! Per topic:
//! - four "feedback" papers contain both query words and cite the targets;
//! - three "target" papers are the most relevant but use only the topic's
//!   expansion vocabulary, never a query word;
//! - six distractors each contain one query word plus off-topic words.
//!
//! Planted vectors put every query word and expansion word of a topic on the
//! topic's own axis and all off-topic words on a shared axis pointing away
//! from every topic. BM25 alone can never retrieve a target; expansion can
//! only find the target vocabulary in the cited papers.

use std::fmt::Write as _;

use qebert_core::{analyze, AnalysisConfig, Document, DocumentStore, EmbeddingTable, Term};

pub struct PlantedTopic {
    pub id: &'static str,
    pub query: &'static str,
    pub expansion_words: [&'static str; 4],
    pub feedback_ids: Vec<String>,
    pub target_ids: Vec<String>,
    pub distractor_ids: Vec<String>,
}

pub struct PlantedScenario {
    pub store: DocumentStore,
    pub topics: Vec<PlantedTopic>,
    pub table: EmbeddingTable,
}

const TOPICS: [(&str, &str, [&str; 4]); 3] = [
    (
        "1",
        "neural parsing",
        ["treebank", "dependency", "grammar", "annotation"],
    ),
    (
        "2",
        "machine translation",
        ["bilingual", "alignment", "phrase", "decoder"],
    ),
    (
        "3",
        "sentiment classification",
        ["polarity", "opinion", "review", "lexicon"],
    ),
];

const OFF_TOPIC: [&str; 6] = ["weather", "football", "recipe", "garden", "travel", "painting"];
const FILLER: &str = "approach method results";
const DIMENSION: usize = TOPICS.len() + 2;

fn doc(id: String, title: String, abstract_text: String, references: Vec<String>) -> Document {
    Document {
        id,
        title,
        abstract_text,
        body: None,
        venue: "PLANTED".into(),
        year: Some(2020),
        references,
    }
}

fn stems(text: &str) -> Vec<Term> {
    analyze(text, &AnalysisConfig::default())
}

impl PlantedScenario {
    pub fn build() -> Self {
        let mut docs = Vec::new();
        let mut topics = Vec::new();
        let mut table = EmbeddingTable::new(DIMENSION);

        for (axis, &(id, query, expansion)) in TOPICS.iter().enumerate() {
            let words: Vec<&str> = query.split(' ').collect();
            let target_ids: Vec<String> = (1..=3).map(|i| format!("T{id}-{i}")).collect();
            let feedback_ids: Vec<String> = (1..=4).map(|i| format!("F{id}-{i}")).collect();
            let distractor_ids: Vec<String> = (1..=6).map(|i| format!("X{id}-{i}")).collect();

            for (i, tid) in target_ids.iter().enumerate() {
                let mut text: Vec<&str> = expansion.to_vec();
                text.rotate_left(i);
                text.push(expansion[i]);
                docs.push(doc(tid.clone(), text[..2].join(" "), text[2..].join(" "), vec![]));
            }
            for (i, fid) in feedback_ids.iter().enumerate() {
                // Each feedback paper cites two of the three targets.
                let refs = vec![target_ids[i % 3].clone(), target_ids[(i + 1) % 3].clone()];
                docs.push(doc(fid.clone(), query.to_string(), format!("{FILLER} {query}"), refs));
            }
            for (i, xid) in distractor_ids.iter().enumerate() {
                let word = words[i % words.len()];
                let off = format!(
                    "{} {}",
                    OFF_TOPIC[i % OFF_TOPIC.len()],
                    OFF_TOPIC[(i + 2) % OFF_TOPIC.len()]
                );
                docs.push(doc(xid.clone(), format!("{word} {off}"), off.clone(), vec![]));
            }

            for (j, w) in words.iter().chain(expansion.iter()).enumerate() {
                let mut v = vec![0.0; DIMENSION];
                v[axis] = 1.0;
                v[DIMENSION - 1] = 0.01 * (j + 1) as f64;
                for t in stems(w) {
                    if !table.contains(t.as_str()) {
                        table.insert(t, &v).unwrap();
                    }
                }
            }

            topics.push(PlantedTopic {
                id,
                query,
                expansion_words: expansion,
                feedback_ids,
                target_ids,
                distractor_ids,
            });
        }

        let mut away = vec![-1.0; DIMENSION];
        away[DIMENSION - 1] = 0.0;
        for (i, w) in OFF_TOPIC.iter().enumerate() {
            let mut v = away.clone();
            v[DIMENSION - 2] = i as f64 * 0.1;
            for t in stems(w) {
                table.insert(t, &v).unwrap();
            }
        }

        PlantedScenario {
            store: DocumentStore::from_documents(docs).expect("unique planted ids"),
            topics,
            table,
        }
    }

    /// Targets grade 4, feedback papers grade 2, distractors judged 0.
    pub fn qrels_text(&self) -> String {
        let mut out = String::new();
        for t in &self.topics {
            for d in &t.target_ids {
                let _ = writeln!(out, "{} 0 {d} 4", t.id);
            }
            for d in &t.feedback_ids {
                let _ = writeln!(out, "{} 0 {d} 2", t.id);
            }
            for d in &t.distractor_ids {
                let _ = writeln!(out, "{} 0 {d} 0", t.id);
            }
        }
        out
    }

    pub fn topics_tsv(&self) -> String {
        self.topics.iter().map(|t| format!("{}\t{}\n", t.id, t.query)).collect()
    }

    /// One JSON object per line, in id order.
    pub fn corpus_jsonl(&self) -> String {
        let mut out = String::new();
        for d in self.store.iter() {
            let refs: Vec<String> = d.references.iter().map(|r| format!("\"{r}\"")).collect();
            let _ = writeln!(
                out,
                "{{\"id\":\"{}\",\"title\":\"{}\",\"abstract\":\"{}\",\"venue\":\"{}\",\"year\":{},\"references\":[{}]}}",
                d.id,
                d.title,
                d.abstract_text,
                d.venue,
                d.year.unwrap_or(0),
                refs.join(",")
            );
        }
        out
    }

    pub fn embeddings_text(&self) -> String {
        let mut buf = Vec::new();
        self.table.write_to(&mut buf).expect("in-memory write");
        String::from_utf8(buf).expect("utf-8")
    }
}
