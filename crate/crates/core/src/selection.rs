//! Choosing the number of topics by average coherence.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::corpus::Corpus;
use crate::diagnostics::{average_model_coherence, DEFAULT_EPSILON, DEFAULT_TOP_WORDS};
use crate::error::{Error, Result};
use crate::sampler::{train, Engine, Hyperparameters, DEFAULT_ITERATIONS, DEFAULT_OPT_INTERVAL};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    /// Fixed β; `None` means 50 / V.
    pub beta: Option<f64>,
    pub iterations: usize,
    pub opt_interval: usize,
    pub chains: usize,
    pub engine: Engine,
    /// Run for k uses seed `base_seed + k`.
    pub base_seed: u64,
    pub top_words: usize,
    pub epsilon: f64,
    /// Concurrent training jobs; 0 uses the rayon default.
    pub workers: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            beta: None,
            iterations: DEFAULT_ITERATIONS,
            opt_interval: DEFAULT_OPT_INTERVAL,
            chains: 1,
            engine: Engine::Sparse,
            base_seed: 0,
            top_words: DEFAULT_TOP_WORDS,
            epsilon: DEFAULT_EPSILON,
            workers: 0,
        }
    }
}

impl SweepConfig {
    /// Hyperparameters for one run: symmetric α = 50/k.
    pub fn hyper_for(&self, k: usize, vocab_size: usize) -> Hyperparameters {
        let mut h = Hyperparameters::rule_of_fifty(k, vocab_size)
            .with_iterations(self.iterations)
            .with_opt_interval(self.opt_interval)
            .with_chains(self.chains)
            .with_seed(self.seed_for(k));
        if let Some(beta) = self.beta {
            h.beta = beta;
        }
        h
    }

    pub fn seed_for(&self, k: usize) -> u64 {
        self.base_seed.wrapping_add(k as u64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub k: usize,
    /// `Err` holds the failure message of this k's run.
    pub average_coherence: std::result::Result<f64, String>,
    pub wall_time: Duration,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    /// (k, coherence) for every run that succeeded.
    pub fn scores(&self) -> Vec<(usize, f64)> {
        self.rows
            .iter()
            .filter_map(|r| r.average_coherence.as_ref().ok().map(|&c| (r.k, c)))
            .collect()
    }

    pub fn best_k(&self) -> Result<usize> {
        select_k(&self.scores())
    }
}

/// Trains one model per k in `k_min..=k_max` and records its average
/// coherence. A failing k is recorded and the sweep carries on.
pub fn coherence_sweep(corpus: &Corpus, k_min: usize, k_max: usize, cfg: &SweepConfig) -> Result<SweepResult> {
    if k_min == 0 || k_min > k_max {
        return Err(Error::InvalidParameter(format!("need 1 <= k_min <= k_max, got {k_min}..{k_max}")));
    }
    let run = |k: usize| {
        let hyper = cfg.hyper_for(k, corpus.vocab_size());
        let started = Instant::now();
        let coherence = train(corpus, &hyper, cfg.engine)
            .and_then(|t| average_model_coherence(&t.model, corpus, cfg.top_words, cfg.epsilon))
            .map_err(|e| {
                log::warn!("k = {k} failed: {e}");
                e.to_string()
            });
        SweepRow {
            k,
            average_coherence: coherence,
            wall_time: started.elapsed(),
            seed: hyper.seed,
        }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    // collect() keeps k order regardless of completion order
    let rows = pool.install(|| (k_min..=k_max).into_par_iter().map(run).collect());
    Ok(SweepResult { rows })
}

/// k with the highest coherence; ties go to the smallest k.
pub fn select_k(rows: &[(usize, f64)]) -> Result<usize> {
    rows.iter()
        .copied()
        .filter(|(_, c)| !c.is_nan())
        .reduce(|best, row| {
            if row.1 > best.1 || (row.1 == best.1 && row.0 < best.0) {
                row
            } else {
                best
            }
        })
        .map(|(k, _)| k)
        .ok_or(Error::EmptyInput("sweep"))
}
