//! Acceptance criteria, one PASS/FAIL/SKIP line each. Exits nonzero if any
//! criterion fails.
//!
//! Criterion 9 needs the ACL anthology data: set `QEBERT_ACL_DIR` to a
//! directory holding `corpus.jsonl` and `qrels.v1.txt`.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::Cursor;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use qebert_core::corpus::parse_corpus_with_report;
use qebert_core::eval::{parse_qrels, parse_run, precision_at_k, Metric};
use qebert_core::expansion::{initial_retrieval, rerank, Expansion};
use qebert_core::{
    analyze, build_citation_graph, build_index, load_qrels, AnalysisConfig, EmbeddingTable, ExpansionConfig, Pipeline,
    RunFile, Term, WeightedQuery,
};
use qebert_testkit::metric_fixtures::{MetricFixture, METRIC_FIXTURES};
use qebert_testkit::oracle::BruteForceBm25;
use qebert_testkit::planted::PlantedScenario;
use qebert_testkit::porter_pairs;
use qebert_testkit::synth::{random_query, random_store, random_table, CorpusSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

enum Verdict {
    Pass(String),
    Fail(String),
    Skip(String),
}

use Verdict::{Fail, Pass, Skip};

fn verdict(ok: bool, detail: String) -> Verdict {
    if ok {
        Pass(detail)
    } else {
        Fail(detail)
    }
}

/// One audited expansion plus the config that produced it.
struct Audited {
    expansion: Expansion,
    config: ExpansionConfig,
}

#[derive(Default)]
struct Audits {
    items: Vec<Audited>,
    /// Report headers seen during the end-to-end runs.
    headers: Vec<String>,
}

impl Audits {
    fn record(&mut self, expansion: Expansion, config: &ExpansionConfig) {
        self.items.push(Audited {
            expansion,
            config: config.clone(),
        });
    }
}

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

fn weighted_query(
    rng: &mut impl Rng,
    text: &str,
    analysis: &AnalysisConfig,
) -> Option<(WeightedQuery, Vec<(String, f64)>)> {
    let mut seen = BTreeSet::new();
    let terms: Vec<Term> = analyze(text, analysis)
        .into_iter()
        .filter(|t| seen.insert(t.clone()))
        .collect();
    if terms.is_empty() {
        return None;
    }
    let pairs: Vec<(Term, f64)> = terms
        .into_iter()
        .map(|t| {
            let w = if rng.gen_bool(0.5) {
                1.0
            } else {
                rng.gen_range(0.1..2.0)
            };
            (t, w)
        })
        .collect();
    let plain = pairs.iter().map(|(t, w)| (t.to_string(), *w)).collect();
    Some((WeightedQuery::new(pairs).ok()?, plain))
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let analysis = AnalysisConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut queries, mut worst, mut bad) = (0usize, 0.0f64, Vec::new());
    for corpus in 0..20 {
        let docs = rng.gen_range(1..=200);
        let vocab = rng.gen_range(10..=500);
        let (store, words) = random_store(
            &mut rng,
            &CorpusSpec {
                docs,
                vocab,
                max_len: 80,
            },
        );
        let index = build_index(&store, &analysis);
        let oracle = BruteForceBm25::new(&store, &analysis);
        let mut q = 0;
        while q < 50 {
            let text = random_query(&mut rng, &words);
            let Some((query, plain)) = weighted_query(&mut rng, &text, &analysis) else {
                continue;
            };
            q += 1;
            let got = index.search(&query, 200);
            let want = oracle.search(&plain, 200);
            let same_order = got.doc_ids().eq(want.iter().map(|(d, _)| d.as_str()));
            for (h, (_, s)) in got.entries.iter().zip(&want) {
                worst = worst.max((h.score - s).abs());
            }
            if !same_order {
                bad.push(format!("corpus {corpus} query {text:?}"));
            }
        }
        queries += q;
    }
    let elapsed = start.elapsed();
    verdict(
        bad.is_empty() && worst < 1e-9 && elapsed < Duration::from_secs(30),
        format!(
            "BM25 oracle equivalence: {queries} queries / 20 corpora, order mismatches {}, max |score delta| {worst:.1e} (< 1e-9), {} (< 30s)",
            bad.len(),
            secs(elapsed)
        ),
    )
}

fn criterion_2() -> Verdict {
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    for f in &METRIC_FIXTURES {
        let qrels = parse_qrels(Cursor::new(f.qrels_text()), Path::new("fixture.qrels")).unwrap();
        let run = parse_run(Cursor::new(f.run_text("r")), Path::new("fixture.run")).unwrap();
        let ranking = run.ranking(MetricFixture::TOPIC).unwrap_or(&[]);
        for (m, want) in Metric::SUITE.iter().zip(f.expected) {
            let delta = (m.evaluate(ranking, &qrels, MetricFixture::TOPIC) - want).abs();
            worst = worst.max(delta);
            if delta >= 1e-6 {
                failures.push(format!("{} {}", f.name, m.name()));
            }
        }
    }
    verdict(
        failures.is_empty(),
        format!(
            "metric oracle equivalence: {} scenarios x 4 metrics, max |delta| {worst:.1e} (< 1e-6){}",
            METRIC_FIXTURES.len(),
            if failures.is_empty() {
                String::new()
            } else {
                format!(", failed: {failures:?}")
            }
        ),
    )
}

fn criterion_3() -> Verdict {
    let pairs: Vec<_> = porter_pairs().collect();
    let wrong: Vec<String> = pairs
        .iter()
        .filter(|(w, s)| qebert_core::text::stem(w) != *s)
        .map(|(w, s)| format!("{w}->{} (want {s})", qebert_core::text::stem(w)))
        .collect();
    verdict(
        pairs.len() == 10_000 && wrong.is_empty(),
        format!(
            "Porter conformance: {}/{} exact matches{}",
            pairs.len() - wrong.len(),
            pairs.len(),
            wrong.first().map(|w| format!(", first miss {w}")).unwrap_or_default()
        ),
    )
}

fn criterion_4(audits: &mut Audits, scratch: &Path) -> Verdict {
    let analysis = AnalysisConfig::default();
    let config = ExpansionConfig {
        expansion_m: 0,
        use_rerank: false,
        ..Default::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut differing = Vec::new();
    for corpus in 0..5 {
        let (store, words) = random_store(
            &mut rng,
            &CorpusSpec {
                docs: 200,
                vocab: 300,
                max_len: 60,
            },
        );
        let table = random_table(&mut rng, &words, 16, 0.8);
        let index = build_index(&store, &analysis);
        let graph = build_citation_graph(&store);
        let pipeline = Pipeline {
            index: &index,
            table: &table,
            graph: &graph,
            store: &store,
            analysis: &analysis,
            config: &config,
        };
        let (mut baseline, mut full) = (RunFile::new("run"), RunFile::new("run"));
        for topic in 1..=25 {
            let text = random_query(&mut rng, &words);
            let Ok(initial) = initial_retrieval(&index, &text, &analysis, &config) else {
                continue;
            };
            baseline.insert_ranking(&topic.to_string(), &initial);
            let (expansion, ranked) = pipeline.expand_and_search(&text).unwrap();
            full.insert_ranking(&topic.to_string(), &ranked);
            audits.record(expansion, &config);
        }
        let (a, b) = (
            scratch.join(format!("c4-{corpus}-base.run")),
            scratch.join(format!("c4-{corpus}-full.run")),
        );
        baseline.write(&a).unwrap();
        full.write(&b).unwrap();
        if fs::read(&a).unwrap() != fs::read(&b).unwrap() {
            differing.push(corpus);
        }
    }
    verdict(
        differing.is_empty(),
        format!("pipeline identity degradation: 5 corpora, run files byte-identical (differing: {differing:?})"),
    )
}

fn criterion_5(audits: &mut Audits) -> Verdict {
    let analysis = AnalysisConfig::default();
    let config = ExpansionConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut trials, mut violations) = (0, 0);
    while trials < 1000 {
        let docs = rng.gen_range(1..=200);
        let vocab = rng.gen_range(10..=200);
        let (store, words) = random_store(
            &mut rng,
            &CorpusSpec {
                docs,
                vocab,
                max_len: 40,
            },
        );
        let dimension = rng.gen_range(2..=16);
        let coverage = rng.gen_range(0.0..=1.0);
        let table = random_table(&mut rng, &words, dimension, coverage);
        let index = build_index(&store, &analysis);
        let text = random_query(&mut rng, &words);
        let Ok(initial) = initial_retrieval(&index, &text, &analysis, &config) else {
            continue;
        };
        trials += 1;
        let terms = analyze(&text, &analysis);
        let reranked = rerank(&initial, &table, &index, &terms);
        let mut a: Vec<&str> = initial.doc_ids().collect();
        let mut b: Vec<&str> = reranked.doc_ids().collect();
        a.sort_unstable();
        b.sort_unstable();
        if a != b || reranked.entries.len() > 100 {
            violations += 1;
        }
        if trials % 10 == 0 {
            let graph = build_citation_graph(&store);
            let pipeline = Pipeline {
                index: &index,
                table: &table,
                graph: &graph,
                store: &store,
                analysis: &analysis,
                config: &config,
            };
            audits.record(pipeline.expand(&text).unwrap(), &config);
        }
    }
    verdict(
        violations == 0,
        format!("rerank permutation invariant: {trials} trials, {violations} violations"),
    )
}

fn criterion_7(audits: &mut Audits, scratch: &Path) -> Verdict {
    let start = Instant::now();
    let s = PlantedScenario::build();
    let analysis = AnalysisConfig::default();
    let vec_path = scratch.join("planted.vec");
    fs::write(&vec_path, s.embeddings_text()).unwrap();
    let table = EmbeddingTable::import(&vec_path).unwrap();
    let index = build_index(&s.store, &analysis);
    let graph = build_citation_graph(&s.store);
    let qrels = parse_qrels(Cursor::new(s.qrels_text()), Path::new("planted.qrels")).unwrap();
    let on = ExpansionConfig::default();
    let off = ExpansionConfig {
        include_citations: false,
        ..Default::default()
    };
    let with = Pipeline {
        index: &index,
        table: &table,
        graph: &graph,
        store: &s.store,
        analysis: &analysis,
        config: &on,
    };
    let without = Pipeline { config: &off, ..with };

    let (mut base, mut full) = (RunFile::new("bm25"), RunFile::new("qebert"));
    let mut pool_mismatch = Vec::new();
    for t in &s.topics {
        base.insert_ranking(t.id, &initial_retrieval(&index, t.query, &analysis, &on).unwrap());
        let (exp, ranked) = with.expand_and_search(t.query).unwrap();
        full.insert_ranking(t.id, &ranked);
        let nocite = without.expand(t.query).unwrap();

        let mut diff = exp.pool.term_frequencies.clone();
        for (term, f) in &nocite.pool.term_frequencies {
            match diff.get_mut(term) {
                Some(e) if *e >= *f => *e -= f,
                _ => pool_mismatch.push(t.id),
            }
        }
        diff.retain(|_, f| *f > 0);
        let mut cited: BTreeMap<Term, u64> = BTreeMap::new();
        for id in &exp.pool.cited_doc_ids {
            for term in analyze(&s.store.get(id).unwrap().indexed_text(), &analysis) {
                *cited.entry(term).or_default() += 1;
            }
        }
        if diff != cited || cited.is_empty() {
            pool_mismatch.push(t.id);
        }
        audits.record(exp, &on);
        audits.record(nocite, &off);
    }
    let p5 = |run: &RunFile| {
        s.topics
            .iter()
            .map(|t| precision_at_k(run.ranking(t.id).unwrap_or(&[]), &qrels, t.id, 5))
            .sum::<f64>()
            / s.topics.len() as f64
    };
    let (b, q) = (p5(&base), p5(&full));
    let elapsed = start.elapsed();
    verdict(
        q > b && pool_mismatch.is_empty() && elapsed < Duration::from_secs(10),
        format!(
            "planted end-to-end: P@5 full {q:.4} > BM25 {b:.4}, citation pool difference exact ({} mismatched topics), {} (< 10s)",
            pool_mismatch.len(),
            secs(elapsed)
        ),
    )
}

fn run_cli(config: &Path, args: &[&str]) -> Result<String, String> {
    let o = Command::new(env!("CARGO_BIN_EXE_qebert"))
        .arg("--config")
        .arg(config)
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if o.status.success() {
        Ok(String::from_utf8_lossy(&o.stdout).into_owned())
    } else {
        Err(format!(
            "{args:?}: {:?} {}",
            o.status.code(),
            String::from_utf8_lossy(&o.stderr)
        ))
    }
}

type DirBytes = BTreeMap<String, Vec<u8>>;

fn dir_bytes(dir: &Path) -> DirBytes {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect()
}

fn criterion_8(audits: &mut Audits, scratch: &Path) -> Verdict {
    let s = PlantedScenario::build();
    let dir = scratch.join("c8");
    fs::create_dir_all(&dir).unwrap();
    fs::write(dir.join("corpus.jsonl"), s.corpus_jsonl()).unwrap();
    fs::write(dir.join("qrels.txt"), s.qrels_text()).unwrap();
    fs::write(dir.join("topics.tsv"), s.topics_tsv()).unwrap();
    fs::write(dir.join("planted.vec"), s.embeddings_text()).unwrap();
    let config = dir.join("qe.toml");
    fs::write(
        &config,
        "corpus_path = \"corpus.jsonl\"\nindex_path = \"planted.idx\"\nembeddings_path = \"planted.vec\"\n\
         qrels_path = \"qrels.txt\"\ntopics_path = \"topics.tsv\"\n\n[train]\nseed = 42\n",
    )
    .unwrap();
    let outcome = (|| -> Result<(DirBytes, DirBytes), String> {
        run_cli(&config, &["index"])?;
        let (a, b) = (dir.join("first"), dir.join("second"));
        run_cli(&config, &["eval", "--out", a.to_str().unwrap()])?;
        run_cli(&config, &["eval", "--out", b.to_str().unwrap()])?;
        Ok((dir_bytes(&a), dir_bytes(&b)))
    })();
    match outcome {
        Err(e) => Fail(format!("end-to-end determinism: eval failed: {e}")),
        Ok((first, second)) => {
            if let Some(csv) = first.get("report.csv") {
                audits.headers.push(String::from_utf8_lossy(csv).into_owned());
            }
            let files: Vec<&String> = first.keys().collect();
            let runs = files.iter().filter(|f| f.ends_with(".run")).count();
            verdict(
                first == second && runs == 3 && first.contains_key("report.csv"),
                format!(
                    "end-to-end determinism: two eval executions, {} files ({runs} runs + reports) byte-identical: {}",
                    files.len(),
                    first == second
                ),
            )
        }
    }
}

fn criterion_6(audits: &Audits) -> Verdict {
    let mut problems = Vec::new();
    let mut terms = 0;
    for a in &audits.items {
        let q = &a.expansion.expanded;
        for t in &q.original_terms {
            if q.weighted.weight(t.as_str()) != Some(1.0) {
                problems.push(format!("{:?}: original {t} not at 1.0", a.expansion.query));
            }
        }
        for c in &q.expansion_terms {
            if q.weighted.weight(c.term.as_str()) != Some(0.7) {
                problems.push(format!("{:?}: expansion {} not at 0.7", a.expansion.query, c.term));
            }
        }
        for t in a.expansion.audit().expansion_terms {
            terms += 1;
            let f = if a.config.log_frequency {
                (t.f as f64).ln_1p()
            } else {
                t.f as f64
            };
            if t.weight != f * t.sim || t.sim.is_nan() || t.sim <= 0.0 {
                problems.push(format!(
                    "{:?}: {} weight {} != f {} x sim {}",
                    a.expansion.query, t.term, t.weight, t.f, t.sim
                ));
            }
        }
        if a.config.prf_k != 4 || (a.config.expansion_m != 10 && a.config.expansion_m != 0) {
            problems.push("non-default k/m in audited run".into());
        }
    }
    let echoed = !audits.headers.is_empty()
        && audits
            .headers
            .iter()
            .all(|h| h.contains("# expansion.prf_k=4\n") && h.contains("# expansion.expansion_m=10\n"));
    if !echoed {
        problems.push("report header does not echo prf_k=4 / expansion_m=10".into());
    }
    verdict(
        problems.is_empty() && terms > 0,
        format!(
            "audit consistency: {} expansions, {terms} expansion terms, weight = f x sim exact, weights 1.0/0.7, k=4 m=10 echoed: {}{}",
            audits.items.len(),
            echoed,
            problems.first().map(|p| format!(", first problem: {p}")).unwrap_or_default()
        ),
    )
}

fn criterion_9() -> Verdict {
    let Some(dir) = std::env::var_os("QEBERT_ACL_DIR").map(PathBuf::from) else {
        return Skip("ACL anthology checks: QEBERT_ACL_DIR not set".into());
    };
    let start = Instant::now();
    let analysis = AnalysisConfig::default();
    let (store, _) = match parse_corpus_with_report(&dir.join("corpus.jsonl")) {
        Ok(r) => r,
        Err(e) => return Fail(format!("ACL anthology checks: {e}")),
    };
    let graph = build_citation_graph(&store);
    let index = build_index(&store, &analysis);
    let build = start.elapsed();
    let qrels = match load_qrels(&dir.join("qrels.v1.txt")) {
        Ok(q) => q,
        Err(e) => return Fail(format!("ACL anthology checks: {e}")),
    };
    let topics = qrels.topics();
    let mean = topics.iter().map(|t| qrels.relevant_count(t) as f64).sum::<f64>() / topics.len().max(1) as f64;
    verdict(
        store.count() == 23_058
            && graph.edge_count() == 124_857
            && topics.len() == 82
            && (mean - 23.67).abs() <= 0.01
            && build < Duration::from_secs(300),
        format!(
            "ACL anthology: papers {} (23058), edges {} (124857), topics {} (82), mean relevant {mean:.2} (23.67 +/- 0.01), ingest+index {} (< 300s), {} docs indexed",
            store.count(),
            graph.edge_count(),
            topics.len(),
            secs(build),
            index.doc_count()
        ),
    )
}

fn main() {
    let scratch = tempfile::tempdir().expect("scratch directory");
    let mut audits = Audits::default();
    let mut results: Vec<(u32, Verdict)> = vec![
        (1, criterion_1()),
        (2, criterion_2()),
        (3, criterion_3()),
        (4, criterion_4(&mut audits, scratch.path())),
        (5, criterion_5(&mut audits)),
        (7, criterion_7(&mut audits, scratch.path())),
        (8, criterion_8(&mut audits, scratch.path())),
    ];
    results.push((6, criterion_6(&audits)));
    results.push((9, criterion_9()));
    results.sort_by_key(|(n, _)| *n);

    let mut failed = 0;
    for (n, v) in &results {
        let (tag, detail) = match v {
            Pass(d) => ("PASS", d),
            Fail(d) => {
                failed += 1;
                ("FAIL", d)
            }
            Skip(d) => ("SKIP", d),
        };
        println!("{tag} [{n}] {detail}");
    }
    println!("{} criteria, {failed} failed", results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
