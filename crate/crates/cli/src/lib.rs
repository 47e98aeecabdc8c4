//! The `qebert` command line: index, train, search, expand and eval.

pub mod commands;
pub mod config;
pub mod failure;
pub mod topics;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use config::AppConfig;
pub use failure::{CliResult, ExitKind, Failure};
pub use topics::Topics;

#[derive(Debug, Parser)]
#[command(
    name = "qebert",
    version,
    about = "Scholarly search with citation-aware query expansion"
)]
pub struct Cli {
    /// TOML experiment configuration.
    #[arg(short, long, global = true)]
    pub config: Option<PathBuf>,

    #[command(flatten)]
    pub paths: PathFlags,

    #[command(subcommand)]
    pub command: Command,
}

/// Overrides for the paths in the config file.
#[derive(Debug, Default, Args)]
pub struct PathFlags {
    #[arg(long, global = true)]
    pub corpus: Option<PathBuf>,
    #[arg(long, global = true)]
    pub index: Option<PathBuf>,
    #[arg(long, global = true)]
    pub graph: Option<PathBuf>,
    #[arg(long, global = true)]
    pub embeddings: Option<PathBuf>,
    #[arg(long, global = true)]
    pub qrels: Option<PathBuf>,
    #[arg(long, global = true)]
    pub topics: Option<PathBuf>,
    #[arg(long, global = true)]
    pub stopwords: Option<PathBuf>,
}

#[derive(Debug, Default, Clone, Args)]
pub struct ExpansionFlags {
    /// Number of feedback documents.
    #[arg(long)]
    pub prf_k: Option<usize>,
    /// Number of expansion terms.
    #[arg(long)]
    pub expansion_m: Option<usize>,
    /// Keep the BM25 order when picking feedback documents.
    #[arg(long)]
    pub no_rerank: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Baseline,
    Qe,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the inverted index and citation graph from the corpus.
    Index,
    /// Train term embeddings on the corpus and write them in text format.
    Train {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        dimension: Option<usize>,
        #[arg(long)]
        epochs: Option<usize>,
    },
    /// Run one query.
    Search {
        query: String,
        #[arg(long, value_enum, default_value = "qe")]
        mode: Mode,
        #[command(flatten)]
        expansion: ExpansionFlags,
    },
    /// Print the expansion audit for one query as JSON.
    Expand {
        query: String,
        #[arg(long)]
        no_citations: bool,
        #[command(flatten)]
        expansion: ExpansionFlags,
    },
    /// Run the three built-in systems over the topics and report metrics.
    Eval {
        /// Extra run files to score alongside the built-in runs.
        #[arg(long, num_args = 1..)]
        runs: Vec<PathBuf>,
        /// Directory for run files and reports.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        expansion: ExpansionFlags,
    },
}

impl Cli {
    /// Config file (or defaults) with command-line overrides applied.
    pub fn app_config(&self) -> CliResult<AppConfig> {
        let mut c = match &self.config {
            Some(path) => AppConfig::load(path)?,
            None => AppConfig::default(),
        };
        let p = &self.paths;
        let set = |slot: &mut Option<PathBuf>, flag: &Option<PathBuf>| {
            if flag.is_some() {
                slot.clone_from(flag);
            }
        };
        set(&mut c.corpus_path, &p.corpus);
        set(&mut c.index_path, &p.index);
        set(&mut c.graph_path, &p.graph);
        set(&mut c.embeddings_path, &p.embeddings);
        set(&mut c.qrels_path, &p.qrels);
        set(&mut c.topics_path, &p.topics);
        set(&mut c.stopwords_path, &p.stopwords);

        let flags = match &self.command {
            Command::Search { expansion, .. } | Command::Expand { expansion, .. } | Command::Eval { expansion, .. } => {
                Some(expansion)
            }
            _ => None,
        };
        if let Some(f) = flags {
            if let Some(k) = f.prf_k {
                c.expansion.prf_k = k;
            }
            if let Some(m) = f.expansion_m {
                c.expansion.expansion_m = m;
            }
            if f.no_rerank {
                c.expansion.use_rerank = false;
            }
        }
        match &self.command {
            Command::Train {
                seed,
                dimension,
                epochs,
            } => {
                if let Some(s) = seed {
                    c.train.seed = *s;
                }
                if let Some(d) = dimension {
                    c.train.dimension = *d;
                }
                if let Some(e) = epochs {
                    c.train.epochs = *e;
                }
            }
            Command::Expand { no_citations: true, .. } => c.expansion.include_citations = false,
            Command::Eval { out: Some(dir), .. } => c.output_dir = Some(dir.clone()),
            _ => {}
        }
        c.finish()
    }
}

/// Runs the parsed command, writing user-facing output to `out`.
pub fn run(cli: &Cli, out: &mut dyn std::io::Write) -> CliResult<()> {
    let config = cli.app_config()?;
    match &cli.command {
        Command::Index => commands::cmd_index(&config, out),
        Command::Train { .. } => commands::cmd_train(&config, out),
        Command::Search { query, mode, .. } => commands::cmd_search(&config, query, *mode, out),
        Command::Expand { query, .. } => commands::cmd_expand(&config, query, out),
        Command::Eval { runs, .. } => commands::cmd_eval(&config, runs, out),
    }
}
