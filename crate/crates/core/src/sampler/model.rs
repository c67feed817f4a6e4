use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, WordId};
use crate::error::{Error, Result};

pub type Topic = u32;

/// Training configuration shared by both engines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperparameters {
    /// Per-topic document prior; its length is the topic count.
    pub alpha: Vec<f64>,
    pub beta: f64,
    pub iterations: usize,
    /// Sweeps between α updates, 0 disables optimisation.
    pub opt_interval: usize,
    pub chains: usize,
    pub seed: u64,
}

pub const DEFAULT_ITERATIONS: usize = 1000;
pub const DEFAULT_OPT_INTERVAL: usize = 10;

impl Hyperparameters {
    pub fn symmetric(k: usize, alpha: f64, beta: f64) -> Self {
        Hyperparameters {
            alpha: vec![alpha; k],
            beta,
            iterations: DEFAULT_ITERATIONS,
            opt_interval: DEFAULT_OPT_INTERVAL,
            chains: 1,
            seed: 0,
        }
    }

    /// α = 50/k for every topic and β = 50/V.
    pub fn rule_of_fifty(k: usize, vocab_size: usize) -> Self {
        Self::symmetric(k, 50.0 / k as f64, 50.0 / vocab_size.max(1) as f64)
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.alpha.len()
    }

    pub fn with_iterations(mut self, iterations: usize) -> Self {
        self.iterations = iterations;
        self
    }

    pub fn with_opt_interval(mut self, interval: usize) -> Self {
        self.opt_interval = interval;
        self
    }

    pub fn with_chains(mut self, chains: usize) -> Self {
        self.chains = chains;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidHyperparameters(m.to_owned()));
        if self.alpha.is_empty() {
            return bad("k must be at least 1");
        }
        if self.alpha.len() > Topic::MAX as usize {
            return bad("too many topics");
        }
        if !self.alpha.iter().all(|a| a.is_finite() && *a > 0.0) {
            return bad("every alpha must be finite and positive");
        }
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return bad("beta must be finite and positive");
        }
        if self.iterations == 0 {
            return bad("iterations must be at least 1");
        }
        if self.chains == 0 {
            return bad("chains must be at least 1");
        }
        Ok(())
    }
}

/// Collapsed-Gibbs state: assignments plus the three count tables they
/// induce.
///
/// Tables are dense and row-major: `n_td[d * k + t]`, `n_wt[w * k + t]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TopicModel {
    k: usize,
    vocab_size: usize,
    n_td: Vec<u32>,
    n_wt: Vec<u32>,
    n_t: Vec<u32>,
    doc_len: Vec<u32>,
    z: Vec<Vec<Topic>>,
    hyper: Hyperparameters,
    alpha_sum: f64,
    sweeps: usize,
}

impl TopicModel {
    /// Uniform random initial assignment of every token.
    pub fn init<R: Rng>(corpus: &Corpus, hyper: Hyperparameters, rng: &mut R) -> Result<Self> {
        hyper.validate()?;
        if corpus.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let k = hyper.k();
        let z = corpus
            .docs()
            .iter()
            .map(|doc| doc.tokens.iter().map(|_| rng.random_range(0..k) as Topic).collect())
            .collect();
        Self::from_assignments(corpus, z, hyper)
    }

    /// Builds counts from explicit assignments (checkpoints, tests).
    pub fn from_assignments(corpus: &Corpus, z: Vec<Vec<Topic>>, hyper: Hyperparameters) -> Result<Self> {
        hyper.validate()?;
        if corpus.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let k = hyper.k();
        if z.len() != corpus.num_docs()
            || z.iter().zip(corpus.docs()).any(|(zd, doc)| zd.len() != doc.len())
        {
            return Err(Error::InvalidParameter("assignments do not align with the corpus".into()));
        }
        if z.iter().flatten().any(|&t| t as usize >= k) {
            return Err(Error::InvalidParameter("assignment outside [0, k)".into()));
        }
        let alpha_sum = hyper.alpha.iter().sum();
        let mut model = TopicModel {
            k,
            vocab_size: corpus.vocab_size(),
            n_td: Vec::new(),
            n_wt: Vec::new(),
            n_t: Vec::new(),
            doc_len: corpus.docs().iter().map(|d| d.len() as u32).collect(),
            z,
            hyper,
            alpha_sum,
            sweeps: 0,
        };
        (model.n_td, model.n_wt, model.n_t) = model.recount(corpus);
        Ok(model)
    }

    /// Count tables rebuilt from `z` alone.
    pub fn recount(&self, corpus: &Corpus) -> (Vec<u32>, Vec<u32>, Vec<u32>) {
        let k = self.k;
        let mut n_td = vec![0u32; corpus.num_docs() * k];
        let mut n_wt = vec![0u32; corpus.vocab_size() * k];
        let mut n_t = vec![0u32; k];
        for (d, (doc, zd)) in corpus.docs().iter().zip(&self.z).enumerate() {
            for (&w, &t) in doc.tokens.iter().zip(zd) {
                n_td[d * k + t as usize] += 1;
                n_wt[w as usize * k + t as usize] += 1;
                n_t[t as usize] += 1;
            }
        }
        (n_td, n_wt, n_t)
    }

    /// True when the stored tables equal a fresh recount from `z`.
    pub fn counts_consistent(&self, corpus: &Corpus) -> bool {
        let (n_td, n_wt, n_t) = self.recount(corpus);
        n_td == self.n_td && n_wt == self.n_wt && n_t == self.n_t
    }

    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    #[inline]
    pub fn num_docs(&self) -> usize {
        self.z.len()
    }

    pub fn total_tokens(&self) -> usize {
        self.n_t.iter().map(|&c| c as usize).sum()
    }

    pub fn hyper(&self) -> &Hyperparameters {
        &self.hyper
    }

    #[inline]
    pub fn alpha(&self) -> &[f64] {
        &self.hyper.alpha
    }

    #[inline]
    pub fn alpha_sum(&self) -> f64 {
        self.alpha_sum
    }

    #[inline]
    pub fn beta(&self) -> f64 {
        self.hyper.beta
    }

    /// βV, the denominator offset shared by every φ̂ and sampling weight.
    #[inline]
    pub fn beta_v(&self) -> f64 {
        self.hyper.beta * self.vocab_size as f64
    }

    pub fn set_alpha(&mut self, alpha: Vec<f64>) {
        assert_eq!(alpha.len(), self.k);
        self.alpha_sum = alpha.iter().sum();
        self.hyper.alpha = alpha;
    }

    pub fn sweeps(&self) -> usize {
        self.sweeps
    }

    pub(crate) fn set_sweeps(&mut self, sweeps: usize) {
        self.sweeps = sweeps;
    }

    pub(crate) fn finish_sweep(&mut self) {
        self.sweeps += 1;
    }

    #[inline]
    pub fn z(&self, d: usize) -> &[Topic] {
        &self.z[d]
    }

    pub fn assignments(&self) -> &[Vec<Topic>] {
        &self.z
    }

    pub fn doc_len(&self, d: usize) -> u32 {
        self.doc_len[d]
    }

    #[inline]
    pub fn n_td(&self, d: usize, t: usize) -> u32 {
        self.n_td[d * self.k + t]
    }

    #[inline]
    pub fn doc_counts(&self, d: usize) -> &[u32] {
        &self.n_td[d * self.k..(d + 1) * self.k]
    }

    #[inline]
    pub fn n_wt(&self, w: WordId, t: usize) -> u32 {
        self.n_wt[w as usize * self.k + t]
    }

    #[inline]
    pub fn word_counts(&self, w: WordId) -> &[u32] {
        let k = self.k;
        &self.n_wt[w as usize * k..(w as usize + 1) * k]
    }

    #[inline]
    pub fn n_t(&self, t: usize) -> u32 {
        self.n_t[t]
    }

    #[inline]
    pub fn topic_totals(&self) -> &[u32] {
        &self.n_t
    }

    pub(crate) fn raw_tables(&self) -> (&[u32], &[u32], &[u32]) {
        (&self.n_td, &self.n_wt, &self.n_t)
    }

    #[inline]
    pub(crate) fn unassign(&mut self, d: usize, w: WordId, t: Topic) {
        let (k, t) = (self.k, t as usize);
        self.n_td[d * k + t] -= 1;
        self.n_wt[w as usize * k + t] -= 1;
        self.n_t[t] -= 1;
    }

    /// Adds or removes one token of word `w` in topic `t` of document `d`
    /// and returns the new (n_td, n_t). The caller updates z.
    #[inline(always)]
    pub(crate) fn bump(&mut self, d: usize, w: WordId, t: usize, add: bool) -> (u32, u32) {
        let k = self.k;
        let (td, wt) = (&mut self.n_td[d * k + t], &mut self.n_wt[w as usize * k + t]);
        let nt = &mut self.n_t[t];
        if add {
            *td += 1;
            *wt += 1;
            *nt += 1;
        } else {
            *td -= 1;
            *wt -= 1;
            *nt -= 1;
        }
        (*td, *nt)
    }

    #[inline]
    pub(crate) fn set_z(&mut self, d: usize, i: usize, t: Topic) {
        self.z[d][i] = t;
    }

    #[inline]
    pub(crate) fn assign(&mut self, d: usize, i: usize, w: WordId, t: Topic) {
        let (k, tu) = (self.k, t as usize);
        self.n_td[d * k + tu] += 1;
        self.n_wt[w as usize * k + tu] += 1;
        self.n_t[tu] += 1;
        self.z[d][i] = t;
    }

    /// Posterior mean θ̂ of document `d`:
    /// (α_t + n_{t|d}) / (Σα + N_d).
    pub fn estimate_theta(&self, d: usize) -> Vec<f64> {
        let denom = self.alpha_sum + self.doc_len[d] as f64;
        self.doc_counts(d)
            .iter()
            .zip(&self.hyper.alpha)
            .map(|(&n, &a)| (a + n as f64) / denom)
            .collect()
    }

    /// Posterior mean φ̂ of topic `t` over the vocabulary:
    /// (β + n_{w|t}) / (βV + n_{·|t}).
    pub fn estimate_phi(&self, t: usize) -> Vec<f64> {
        let beta = self.hyper.beta;
        let denom = self.beta_v() + self.n_t[t] as f64;
        (0..self.vocab_size)
            .map(|w| (beta + self.n_wt[w * self.k + t] as f64) / denom)
            .collect()
    }

    /// φ̂ for every topic, `phi[t][w]`.
    pub fn phi_matrix(&self) -> Vec<Vec<f64>> {
        (0..self.k).map(|t| self.estimate_phi(t)).collect()
    }
}
