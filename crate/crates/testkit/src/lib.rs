//! Test support: random corpora, a planted expansion scenario, and oracles
//! that share no code with the index or the metrics they check.

pub mod metric_fixtures;
pub mod oracle;
pub mod planted;
pub mod synth;

/// `word<TAB>stem` pairs produced by an independent implementation of the
/// original Porter algorithm over 10,000 frequent English words.
pub const PORTER_FIXTURE: &str = include_str!("../fixtures/porter_10k.tsv");

pub fn porter_pairs() -> impl Iterator<Item = (&'static str, &'static str)> {
    PORTER_FIXTURE
        .lines()
        .filter(|l| !l.starts_with('#') && !l.is_empty())
        .map(|l| l.split_once('\t').expect("word<TAB>stem"))
}
