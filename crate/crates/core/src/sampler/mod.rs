//! Collapsed Gibbs training for LDA.
//!
//! Two engines share one [`TopicModel`]: [`NaiveSampler`] evaluates every
//! topic's weight per token, [`SparseSampler`] keeps the SparseLDA bucket
//! caches. Both consume exactly one uniform per token.

mod alpha;
mod checkpoint;
mod model;
mod naive;
pub mod rng;
mod sparse;
mod synth;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use alpha::{fixed_point_step, optimize_alpha};
pub use checkpoint::Checkpoint;
pub use model::{Hyperparameters, Topic, TopicModel, DEFAULT_ITERATIONS, DEFAULT_OPT_INTERVAL};
pub use naive::{gibbs_weight_naive, NaiveSampler, TermOrder};
pub use sparse::{Bucket, BucketHits, BucketMasses, SparseObserver, SparseSampler, StateAudit};
pub use synth::{generate_corpus, synthetic_word, Synthetic, SyntheticConfig};

use crate::corpus::Corpus;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Naive,
    #[default]
    Sparse,
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Naive => "naive",
            Engine::Sparse => "sparse",
        })
    }
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive" => Ok(Engine::Naive),
            "sparse" => Ok(Engine::Sparse),
            other => Err(Error::InvalidParameter(format!("unknown engine {other:?}"))),
        }
    }
}

/// Per-document topic confidences with the argmax prediction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocTopicRow {
    pub doc_id: String,
    pub confidences: Vec<f64>,
    pub prediction: usize,
}

impl DocTopicRow {
    /// Normalises `weights` and picks the first maximum.
    pub fn from_weights(doc_id: impl Into<String>, weights: &[f64]) -> Self {
        let sum: f64 = weights.iter().sum();
        let confidences: Vec<f64> = weights.iter().map(|w| w / sum).collect();
        let prediction = argmax(&confidences);
        DocTopicRow {
            doc_id: doc_id.into(),
            confidences,
            prediction,
        }
    }
}

/// Index of the first maximal element.
pub fn argmax(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate() {
        if x > xs[best] {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone)]
pub struct Trained {
    /// Final state of chain 0.
    pub model: TopicModel,
    pub rows: Vec<DocTopicRow>,
    /// Bucket hit counts over all sweeps of chain 0 (sparse engine only).
    pub hits: Option<BucketHits>,
}

/// Runs one chain to completion: seeded init, `iterations` sweeps, α updates
/// every `opt_interval` sweeps.
pub fn run_chain(corpus: &Corpus, hyper: &Hyperparameters, engine: Engine, chain: u64) -> Result<(TopicModel, Option<BucketHits>)> {
    let mut rng = rng::chain_rng(hyper.seed, chain);
    let mut model = TopicModel::init(corpus, hyper.clone(), &mut rng)?;
    let optimize_due = |sweep: usize| hyper.opt_interval > 0 && sweep % hyper.opt_interval == 0;
    match engine {
        Engine::Naive => {
            let mut sampler = NaiveSampler::new(TermOrder::Flat);
            for sweep in 1..=hyper.iterations {
                sampler.sweep(&mut model, corpus, &mut rng);
                if optimize_due(sweep) {
                    let alpha = optimize_alpha(&model);
                    model.set_alpha(alpha);
                }
            }
            Ok((model, None))
        }
        Engine::Sparse => {
            let mut sampler = SparseSampler::new(&model);
            for sweep in 1..=hyper.iterations {
                sampler.sweep(&mut model, corpus, &mut rng);
                if optimize_due(sweep) {
                    let alpha = optimize_alpha(&model);
                    model.set_alpha(alpha);
                    sampler.resync_alpha(&model);
                }
            }
            Ok((model, Some(sampler.hits())))
        }
    }
}

/// Trains `hyper.chains` independent chains and emits one confidence row per
/// document from the chain-averaged θ̂ estimates.
pub fn train(corpus: &Corpus, hyper: &Hyperparameters, engine: Engine) -> Result<Trained> {
    hyper.validate()?;
    let chains: Vec<(TopicModel, Option<BucketHits>)> = (0..hyper.chains as u64)
        .into_par_iter()
        .map(|c| run_chain(corpus, hyper, engine, c))
        .collect::<Result<_>>()?;

    let k = hyper.k();
    let rows = corpus
        .docs()
        .iter()
        .enumerate()
        .map(|(d, doc)| {
            let mut mean = vec![0.0; k];
            for (m, _) in &chains {
                for (acc, th) in mean.iter_mut().zip(m.estimate_theta(d)) {
                    *acc += th;
                }
            }
            for x in &mut mean {
                *x /= chains.len() as f64;
            }
            DocTopicRow::from_weights(doc.id.clone(), &mean)
        })
        .collect();
    let (model, hits) = chains.into_iter().next().expect("at least one chain");
    Ok(Trained { model, rows, hits })
}
