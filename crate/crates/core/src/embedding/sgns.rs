//! Reference trainer: skip-gram with negative sampling over analyzed term
//! sequences, one sequence per document.
//!
//! Single-threaded and seeded, so a given store, analysis config and
//! [`TrainConfig`] always produce a bit-identical table.

use std::collections::HashMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::EmbeddingTable;
use crate::corpus::DocumentStore;
use crate::error::{Error, Result};
use crate::text::{analyze, AnalysisConfig, Term};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub dimension: usize,
    /// Maximum distance to a context term; the effective window per position
    /// is drawn uniformly from `1..=window`.
    pub window: usize,
    pub negative_samples: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub min_count: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            dimension: 256,
            window: 5,
            negative_samples: 5,
            epochs: 5,
            learning_rate: 0.025,
            min_count: 5,
            seed: 42,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidConfig(format!("{what} must be >= 1")));
        if self.dimension < 1 {
            return bad("dimension");
        }
        if self.window < 1 {
            return bad("window");
        }
        if self.epochs < 1 {
            return bad("epochs");
        }
        if self.min_count < 1 {
            return bad("min_count");
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::InvalidConfig("learning_rate must be positive".into()));
        }
        Ok(())
    }
}

/// Exponent applied to unigram counts for the negative-sampling distribution.
const UNIGRAM_POWER: f64 = 0.75;
const MIN_LR_FRACTION: f64 = 1e-4;

pub fn train_embeddings(
    store: &DocumentStore,
    analysis: &AnalysisConfig,
    config: &TrainConfig,
) -> Result<EmbeddingTable> {
    config.validate()?;
    let docs: Vec<Vec<Term>> = store.iter().map(|d| analyze(&d.indexed_text(), analysis)).collect();

    let mut counts: HashMap<&Term, u64> = HashMap::new();
    for t in docs.iter().flatten() {
        *counts.entry(t).or_insert(0) += 1;
    }
    let mut vocab: Vec<(&Term, u64)> = counts
        .into_iter()
        .filter(|&(_, c)| c >= config.min_count as u64)
        .collect();
    if vocab.is_empty() {
        return Err(Error::NoTrainableVocabulary {
            min_count: config.min_count,
        });
    }
    vocab.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    let ids: HashMap<&Term, usize> = vocab.iter().enumerate().map(|(i, (t, _))| (*t, i)).collect();

    let sentences: Vec<Vec<usize>> = docs
        .iter()
        .map(|d| d.iter().filter_map(|t| ids.get(t).copied()).collect::<Vec<_>>())
        .filter(|s: &Vec<usize>| !s.is_empty())
        .collect();

    let sampler = UnigramSampler::new(vocab.iter().map(|&(_, c)| c));
    let dim = config.dimension;
    let v = vocab.len();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut input: Vec<f64> = (0..v * dim).map(|_| (rng.gen::<f64>() - 0.5) / dim as f64).collect();
    let mut output = vec![0.0f64; v * dim];
    let mut grad = vec![0.0f64; dim];

    let tokens_per_epoch: usize = sentences.iter().map(Vec::len).sum();
    let total = (tokens_per_epoch * config.epochs) as f64;
    let mut processed = 0usize;

    for _epoch in 0..config.epochs {
        for sentence in &sentences {
            for (pos, &center) in sentence.iter().enumerate() {
                let lr = config.learning_rate * (1.0 - processed as f64 / (total + 1.0)).max(MIN_LR_FRACTION);
                processed += 1;
                let reach = rng.gen_range(1..=config.window);
                let lo = pos.saturating_sub(reach);
                let hi = (pos + reach).min(sentence.len() - 1);
                for (cpos, &context) in sentence.iter().enumerate().take(hi + 1).skip(lo) {
                    if cpos == pos {
                        continue;
                    }
                    grad.iter_mut().for_each(|g| *g = 0.0);
                    let center_vec = &mut input[center * dim..(center + 1) * dim];
                    update(
                        center_vec,
                        &mut output[context * dim..(context + 1) * dim],
                        &mut grad,
                        1.0,
                        lr,
                    );
                    for _ in 0..config.negative_samples {
                        let neg = sampler.sample(&mut rng);
                        if neg == context {
                            continue;
                        }
                        update(center_vec, &mut output[neg * dim..(neg + 1) * dim], &mut grad, 0.0, lr);
                    }
                    for (w, g) in center_vec.iter_mut().zip(&grad) {
                        *w += g;
                    }
                }
            }
        }
    }

    let mut table = EmbeddingTable::new(dim);
    for (i, (term, _)) in vocab.iter().enumerate() {
        table.insert((*term).clone(), &input[i * dim..(i + 1) * dim])?;
    }
    Ok(table)
}

/// One logistic-loss step for a (center, target) pair. The center gradient is
/// accumulated into `grad` and applied by the caller after all targets.
fn update(center: &[f64], target: &mut [f64], grad: &mut [f64], label: f64, lr: f64) {
    let dot: f64 = center.iter().zip(target.iter()).map(|(a, b)| a * b).sum();
    let g = (label - sigmoid(dot)) * lr;
    for ((gr, t), c) in grad.iter_mut().zip(target.iter_mut()).zip(center) {
        *gr += g * *t;
        *t += g * c;
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

struct UnigramSampler {
    cumulative: Vec<f64>,
}

impl UnigramSampler {
    fn new(counts: impl Iterator<Item = u64>) -> Self {
        let mut acc = 0.0;
        let cumulative = counts
            .map(|c| {
                acc += (c as f64).powf(UNIGRAM_POWER);
                acc
            })
            .collect();
        UnigramSampler { cumulative }
    }

    fn sample(&self, rng: &mut impl Rng) -> usize {
        let total = *self.cumulative.last().expect("non-empty vocabulary");
        let x = rng.gen::<f64>() * total;
        self.cumulative
            .partition_point(|&c| c <= x)
            .min(self.cumulative.len() - 1)
    }
}
