//! Query-likelihood retrieval with an LDA-smoothed document model.
//!
//! A document's word distribution is the λ-mixture of its Dirichlet-smoothed
//! maximum-likelihood model and the topic model's Σ_z φ̂_{w|z} θ̂_{z|d}.
//! Scores are log-likelihoods of the query under that mixture.

use std::cmp::Ordering;
use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Pipeline, WordId};
use crate::error::{Error, Result};
use crate::sampler::TopicModel;

pub const DEFAULT_MU: f64 = 1000.0;
pub const DEFAULT_LAMBDA: f64 = 0.7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RetrievalConfig {
    /// Dirichlet prior mass.
    pub mu: f64,
    /// Weight of the smoothed document model against the LDA model.
    pub lambda: f64,
}

impl Default for RetrievalConfig {
    fn default() -> Self {
        RetrievalConfig {
            mu: DEFAULT_MU,
            lambda: DEFAULT_LAMBDA,
        }
    }
}

impl RetrievalConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.mu.is_finite() && self.mu >= 0.0) {
            return Err(Error::InvalidParameter(format!("mu must be finite and >= 0, got {}", self.mu)));
        }
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(Error::InvalidParameter(format!("lambda must lie in [0, 1], got {}", self.lambda)));
        }
        Ok(())
    }
}

/// Maximum-likelihood word statistics of the collection and of each
/// document.
#[derive(Debug, Clone)]
pub struct CollectionModel {
    coll_prob: Vec<f64>,
    doc_counts: Vec<HashMap<WordId, u32>>,
    doc_len: Vec<usize>,
}

impl CollectionModel {
    pub fn new(corpus: &Corpus) -> Self {
        let mut coll = vec![0u64; corpus.vocab_size()];
        let mut doc_counts = Vec::with_capacity(corpus.num_docs());
        for doc in corpus.docs() {
            let mut counts = HashMap::new();
            for &w in &doc.tokens {
                coll[w as usize] += 1;
                *counts.entry(w).or_insert(0) += 1;
            }
            doc_counts.push(counts);
        }
        let total = corpus.total_tokens() as f64;
        CollectionModel {
            coll_prob: coll.into_iter().map(|c| c as f64 / total).collect(),
            doc_counts,
            doc_len: corpus.docs().iter().map(|d| d.len()).collect(),
        }
    }

    pub fn collection_prob(&self, w: WordId) -> f64 {
        self.coll_prob.get(w as usize).copied().unwrap_or(0.0)
    }

    pub fn doc_prob(&self, w: WordId, d: usize) -> f64 {
        let n = self.doc_counts[d].get(&w).copied().unwrap_or(0);
        n as f64 / self.doc_len[d] as f64
    }

    pub fn doc_len(&self, d: usize) -> usize {
        self.doc_len[d]
    }

    pub fn num_docs(&self) -> usize {
        self.doc_len.len()
    }

    /// Dirichlet-smoothed document model:
    /// N/(N+μ)·P_ML(w|D) + μ/(N+μ)·P_ML(w|coll).
    pub fn smoothed_doc_prob(&self, w: WordId, d: usize, cfg: &RetrievalConfig) -> f64 {
        let n = self.doc_len[d] as f64;
        let weight = n / (n + cfg.mu);
        weight * self.doc_prob(w, d) + (1.0 - weight) * self.collection_prob(w)
    }
}

/// Σ_z φ̂_{w|z} θ̂_{z|d} straight from the model counts.
pub fn lda_word_prob(model: &TopicModel, w: WordId, d: usize) -> f64 {
    let theta = model.estimate_theta(d);
    let denom_beta = model.beta();
    (0..model.k())
        .map(|t| (denom_beta + model.n_wt(w, t) as f64) / (model.beta_v() + model.n_t(t) as f64) * theta[t])
        .sum()
}

/// Scores queries against every document of a fitted model. θ̂ and φ̂ are
/// computed once up front.
#[derive(Debug, Clone)]
pub struct Scorer {
    collection: CollectionModel,
    theta: Vec<Vec<f64>>,
    phi: Vec<Vec<f64>>,
    config: RetrievalConfig,
}

impl Scorer {
    pub fn new(model: &TopicModel, corpus: &Corpus, config: RetrievalConfig) -> Result<Self> {
        config.validate()?;
        Ok(Scorer {
            collection: CollectionModel::new(corpus),
            theta: (0..model.num_docs()).map(|d| model.estimate_theta(d)).collect(),
            phi: model.phi_matrix(),
            config,
        })
    }

    pub fn collection(&self) -> &CollectionModel {
        &self.collection
    }

    pub fn config(&self) -> &RetrievalConfig {
        &self.config
    }

    pub fn smoothed_doc_prob(&self, w: WordId, d: usize) -> f64 {
        self.collection.smoothed_doc_prob(w, d, &self.config)
    }

    pub fn lda_word_prob(&self, w: WordId, d: usize) -> f64 {
        self.phi
            .iter()
            .zip(&self.theta[d])
            .map(|(phi_t, th)| phi_t[w as usize] * th)
            .sum()
    }

    /// λ·smoothed + (1−λ)·LDA.
    pub fn combined_word_prob(&self, w: WordId, d: usize) -> f64 {
        let l = self.config.lambda;
        l * self.smoothed_doc_prob(w, d) + (1.0 - l) * self.lda_word_prob(w, d)
    }

    /// Log-likelihood of a bag of query terms. `None` marks a term outside
    /// the vocabulary; it, like any term of zero probability, sends the
    /// score to negative infinity.
    pub fn query_score(&self, query: &[Option<WordId>], d: usize) -> f64 {
        let mut score = 0.0;
        for term in query {
            let p = match term {
                Some(w) => self.combined_word_prob(*w, d),
                None => 0.0,
            };
            if p <= 0.0 {
                return f64::NEG_INFINITY;
            }
            score += p.ln();
        }
        score
    }

    /// Scores every document, best first; equal scores keep corpus order.
    pub fn rank(&self, query: &[Option<WordId>]) -> Vec<(usize, f64)> {
        let mut scored: Vec<(usize, f64)> = (0..self.collection.num_docs()).map(|d| (d, self.query_score(query, d))).collect();
        scored.sort_by(|a, b| match b.1.total_cmp(&a.1) {
            Ordering::Equal => a.0.cmp(&b.0),
            o => o,
        });
        scored
    }
}

/// Runs query text through the corpus pipeline and maps the tokens to ids.
pub fn encode_query(text: &str, pipeline: &Pipeline, corpus: &Corpus) -> Vec<Option<WordId>> {
    pipeline
        .process(text)
        .iter()
        .map(|t| corpus.vocab().id(t))
        .collect()
}
