//! SparseLDA sampler.
//!
//! The full conditional of a topic splits into three buckets,
//!
//! ```text
//! s = Σ_t α_t β / (βV + n_t)                 smoothing only
//! r = Σ_t n_td β / (βV + n_t)                document
//! q = Σ_t (α_t + n_td) / (βV + n_t) · n_wt   topic-word
//! ```
//!
//! `s` changes only when a topic total moves, `r` only when the current
//! document's counts move, and `q` needs a pass over the topics where the
//! word actually occurs, using a cached per-topic coefficient. The sampler
//! keeps all three up to date incrementally, so a token whose draw lands in
//! q (the common case) costs O(|topics of w|) instead of O(k). Draws in s or
//! r walk the topics in ascending order, as the naive sampler does.

use rand::Rng;

use super::model::{Topic, TopicModel};
use crate::corpus::{Corpus, WordId};
use crate::error::{Error, Result};

/// Bucket masses at one sampling point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BucketMasses {
    pub s: f64,
    pub r: f64,
    pub q: f64,
}

impl BucketMasses {
    pub fn total(&self) -> f64 {
        self.s + self.r + self.q
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bucket {
    Smoothing,
    Document,
    TopicWord,
}

/// How many draws landed in each bucket.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BucketHits {
    pub smoothing: u64,
    pub document: u64,
    pub topic_word: u64,
}

impl BucketHits {
    pub fn total(&self) -> u64 {
        self.smoothing + self.document + self.topic_word
    }

    pub fn topic_word_fraction(&self) -> f64 {
        match self.total() {
            0 => 0.0,
            n => self.topic_word as f64 / n as f64,
        }
    }

    #[inline]
    fn record(&mut self, b: Bucket) {
        match b {
            Bucket::Smoothing => self.smoothing += 1,
            Bucket::Document => self.document += 1,
            Bucket::TopicWord => self.topic_word += 1,
        }
    }
}

/// Hooks into a sparse sweep, for instrumentation and audits.
pub trait SparseObserver {
    /// Called after the token is removed and the masses computed, before
    /// the draw.
    fn before_draw(&mut self, _model: &TopicModel, _state: &SparseSampler, _doc: usize, _word: WordId, _masses: BucketMasses) {}

    /// Called once the token's new topic is in the counts and the state.
    fn after_token(&mut self, _model: &TopicModel, _state: &SparseSampler, _doc: usize, _pos: usize, _topic: Topic) {}
}

impl SparseObserver for () {}

/// Cached bucket state for one [`TopicModel`].
#[derive(Debug, Clone)]
pub struct SparseSampler {
    s_mass: f64,
    r_mass: f64,
    coeff: Vec<f64>,
    /// 1 / (βV + n_t), refreshed whenever n_t moves.
    inv_denom: Vec<f64>,
    /// Per word, (topic, n_wt) for every topic with n_wt > 0; counts strictly
    /// descending, equal counts by ascending topic.
    word_topics: Vec<Vec<(Topic, u32)>>,
    /// q terms of the last word whose masses were computed in a sweep, so
    /// the draw can walk them without recomputing.
    q_terms: Vec<f64>,
    current_doc: Option<usize>,
    hits: BucketHits,
}

impl SparseSampler {
    pub fn new(model: &TopicModel) -> Self {
        let k = model.k();
        let word_topics = (0..model.vocab_size() as WordId)
            .map(|w| {
                let mut list: Vec<(Topic, u32)> = model
                    .word_counts(w)
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| c > 0)
                    .map(|(t, &c)| (t as Topic, c))
                    .collect();
                list.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
                list
            })
            .collect();
        let mut state = SparseSampler {
            s_mass: 0.0,
            r_mass: 0.0,
            coeff: vec![0.0; k],
            inv_denom: vec![0.0; k],
            word_topics,
            q_terms: vec![0.0; k],
            current_doc: None,
            hits: BucketHits::default(),
        };
        state.resync_alpha(model);
        state
    }

    /// Recomputes `s` and the α-only coefficients, after α changes or to
    /// shed accumulated rounding. Leaves the sampler outside any document.
    pub fn resync_alpha(&mut self, model: &TopicModel) {
        self.leave_doc(model);
        let (alpha, beta, beta_v) = (model.alpha(), model.beta(), model.beta_v());
        self.s_mass = 0.0;
        for t in 0..model.k() {
            let denom = beta_v + model.n_t(t) as f64;
            self.s_mass += alpha[t] * beta / denom;
            self.inv_denom[t] = 1.0 / denom;
            self.coeff[t] = alpha[t] * self.inv_denom[t];
        }
    }

    pub fn s_mass(&self) -> f64 {
        self.s_mass
    }

    pub fn r_mass(&self) -> f64 {
        self.r_mass
    }

    pub fn coeff(&self) -> &[f64] {
        &self.coeff
    }

    pub fn word_topics(&self, w: WordId) -> &[(Topic, u32)] {
        &self.word_topics[w as usize]
    }

    pub fn current_doc(&self) -> Option<usize> {
        self.current_doc
    }

    pub fn hits(&self) -> BucketHits {
        self.hits
    }

    pub fn reset_hits(&mut self) {
        self.hits = BucketHits::default();
    }

    /// Positions the state on document `d`: computes `r` once and refreshes
    /// the coefficients of the document's topics.
    pub fn enter_doc(&mut self, model: &TopicModel, d: usize) {
        self.leave_doc(model);
        let (alpha, beta) = (model.alpha(), model.beta());
        self.r_mass = 0.0;
        for (t, &n) in model.doc_counts(d).iter().enumerate() {
            if n > 0 {
                let inv = self.inv_denom[t];
                self.r_mass += n as f64 * beta * inv;
                self.coeff[t] = (alpha[t] + n as f64) * inv;
            }
        }
        self.current_doc = Some(d);
    }

    /// Reverts the coefficients to their α-only form.
    pub fn leave_doc(&mut self, model: &TopicModel) {
        if self.current_doc.take().is_none() {
            return;
        }
        for ((c, &a), &inv) in self.coeff.iter_mut().zip(model.alpha()).zip(&self.inv_denom) {
            *c = a * inv;
        }
        self.r_mass = 0.0;
    }

    /// Bucket masses for word `w` in document `d`; the current token must
    /// already be removed.
    pub fn bucket_masses(&self, model: &TopicModel, d: usize, w: WordId) -> BucketMasses {
        debug_assert!(d < model.num_docs() && self.current_doc == Some(d), "sparse state not positioned on document {d}");
        let q = self.word_topics[w as usize]
            .iter()
            .map(|&(t, c)| self.coeff[t as usize] * c as f64)
            .sum();
        BucketMasses {
            s: self.s_mass,
            r: self.r_mass,
            q,
        }
    }

    /// [`bucket_masses`](Self::bucket_masses), keeping the q terms for the
    /// draw that follows.
    #[inline]
    fn fill_masses(&mut self, w: WordId) -> BucketMasses {
        let mut q = 0.0;
        for (slot, &(t, c)) in self.q_terms.iter_mut().zip(&self.word_topics[w as usize]) {
            let x = self.coeff[t as usize] * c as f64;
            *slot = x;
            q += x;
        }
        BucketMasses {
            s: self.s_mass,
            r: self.r_mass,
            q,
        }
    }

    /// Inverse-CDF draw for a point `u` in `[0, s + r + q)`.
    pub fn sample(&self, model: &TopicModel, d: usize, w: WordId, masses: BucketMasses, u: f64) -> Result<Topic> {
        let total = masses.total();
        if !(u >= 0.0 && u < total) {
            return Err(Error::DrawOutOfRange { u, total });
        }
        Ok(self.locate(model, d, w, masses, u, false).0)
    }

    /// With `cached`, the q walk reuses the terms stored by
    /// [`fill_masses`](Self::fill_masses); the values are the same either way.
    fn locate(&self, model: &TopicModel, d: usize, w: WordId, masses: BucketMasses, u: f64, cached: bool) -> (Topic, Bucket) {
        let (alpha, beta, beta_v) = (model.alpha(), model.beta(), model.beta_v());
        let n_t = model.topic_totals();
        if u < masses.s {
            let mut cum = 0.0;
            for t in 0..model.k() {
                cum += alpha[t] * beta / (beta_v + n_t[t] as f64);
                if u < cum {
                    return (t as Topic, Bucket::Smoothing);
                }
            }
            return ((model.k() - 1) as Topic, Bucket::Smoothing);
        }
        let counts = model.doc_counts(d);
        let u = u - masses.s;
        if u < masses.r {
            let mut cum = 0.0;
            let mut last = None;
            for (t, &n) in counts.iter().enumerate() {
                if n > 0 {
                    cum += n as f64 * beta / (beta_v + n_t[t] as f64);
                    if u < cum {
                        return (t as Topic, Bucket::Document);
                    }
                    last = Some(t as Topic);
                }
            }
            if let Some(t) = last {
                return (t, Bucket::Document);
            }
        }
        let u = u - masses.r;
        let list = &self.word_topics[w as usize];
        let mut cum = 0.0;
        if cached {
            for (&(t, _), &x) in list.iter().zip(&self.q_terms) {
                cum += x;
                if u < cum {
                    return (t, Bucket::TopicWord);
                }
            }
        } else {
            for &(t, c) in list {
                cum += self.coeff[t as usize] * c as f64;
                if u < cum {
                    return (t, Bucket::TopicWord);
                }
            }
        }
        match list.last() {
            Some(&(t, _)) => (t, Bucket::TopicWord),
            // rounding pushed u past an empty q bucket
            None => (counts.iter().rposition(|&n| n > 0).unwrap_or(0) as Topic, Bucket::Document),
        }
    }

    /// One sweep in corpus order, one uniform draw per token.
    pub fn sweep<R: Rng>(&mut self, model: &mut TopicModel, corpus: &Corpus, rng: &mut R) {
        self.sweep_observed(model, corpus, rng, &mut ());
    }

    pub fn sweep_observed<R: Rng, O: SparseObserver>(
        &mut self,
        model: &mut TopicModel,
        corpus: &Corpus,
        rng: &mut R,
        observer: &mut O,
    ) {
        // shed rounding drift in s once per sweep
        self.resync_alpha(model);
        for (d, doc) in corpus.docs().iter().enumerate() {
            self.enter_doc(model, d);
            for (i, &w) in doc.tokens.iter().enumerate() {
                let old = model.z(d)[i];
                self.remove_token(model, d, w, old);
                let masses = self.fill_masses(w);
                observer.before_draw(model, self, d, w, masses);
                let u = rng.random::<f64>() * masses.total();
                let (t, bucket) = self.locate(model, d, w, masses, u, true);
                self.hits.record(bucket);
                self.add_token(model, d, i, w, t);
                observer.after_token(model, self, d, i, t);
            }
            self.leave_doc(model);
        }
        model.finish_sweep();
    }

    #[inline(always)]
    fn remove_token(&mut self, model: &mut TopicModel, d: usize, w: WordId, t: Topic) {
        self.shift_token(model, d, w, t, false);
        decrement_word_topic(&mut self.word_topics[w as usize], t);
    }

    #[inline(always)]
    fn add_token(&mut self, model: &mut TopicModel, d: usize, i: usize, w: WordId, t: Topic) {
        self.shift_token(model, d, w, t, true);
        model.set_z(d, i, t);
        increment_word_topic(&mut self.word_topics[w as usize], t);
    }

    /// Moves one token of word `w` in document `d` into (`add`) or out of
    /// topic `t`, swapping topic `t`'s old terms in s, r and its coefficient
    /// for the new ones. The only division per count change is here.
    #[inline(always)]
    fn shift_token(&mut self, model: &mut TopicModel, d: usize, w: WordId, t: Topic, add: bool) {
        let tu = t as usize;
        let (alpha_t, beta, beta_v) = (model.alpha()[tu], model.beta(), model.beta_v());
        let (n_td, n_t) = model.bump(d, w, tu, add);
        let n_old = if add { n_td - 1 } else { n_td + 1 };
        let old = beta * self.inv_denom[tu];
        self.s_mass -= alpha_t * old;
        self.r_mass -= n_old as f64 * old;
        let inv = 1.0 / (beta_v + n_t as f64);
        self.inv_denom[tu] = inv;
        let scaled = beta * inv;
        let n = n_td as f64;
        self.s_mass += alpha_t * scaled;
        self.r_mass += n * scaled;
        self.coeff[tu] = (alpha_t + n) * inv;
    }

    /// Differences between the cached state and a from-scratch recompute
    /// for document `d`.
    pub fn audit(&self, model: &TopicModel, d: usize) -> StateAudit {
        let (alpha, beta, beta_v) = (model.alpha(), model.beta(), model.beta_v());
        let mut s = 0.0;
        let mut r = 0.0;
        let mut coeff_rel_err: f64 = 0.0;
        for t in 0..model.k() {
            let denom = beta_v + model.n_t(t) as f64;
            let n = model.n_td(d, t) as f64;
            s += alpha[t] * beta / denom;
            r += n * beta / denom;
            let want = (alpha[t] + n) / denom;
            coeff_rel_err = coeff_rel_err.max(rel_err(self.coeff[t], want));
        }
        let word_topics_ok = (0..model.vocab_size() as WordId).all(|w| word_topics_valid(&self.word_topics[w as usize], model.word_counts(w)));
        StateAudit {
            s_rel_err: rel_err(self.s_mass, s),
            r_abs_err: (self.r_mass - r).abs(),
            r_rel_err: rel_err(self.r_mass, r),
            coeff_rel_err,
            word_topics_ok,
        }
    }

    /// Audit of a single word's sorted list, cheaper than a full [`audit`](Self::audit).
    pub fn word_topics_valid(&self, model: &TopicModel, w: WordId) -> bool {
        word_topics_valid(&self.word_topics[w as usize], model.word_counts(w))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateAudit {
    pub s_rel_err: f64,
    pub r_abs_err: f64,
    pub r_rel_err: f64,
    pub coeff_rel_err: f64,
    pub word_topics_ok: bool,
}

impl StateAudit {
    pub fn within(&self, tol: f64) -> bool {
        self.s_rel_err <= tol && self.r_rel_err <= tol && self.coeff_rel_err <= tol && self.word_topics_ok
    }
}

/// Relative error, falling back to absolute when the reference is zero.
fn rel_err(got: f64, want: f64) -> f64 {
    let diff = (got - want).abs();
    if want == 0.0 {
        diff
    } else {
        diff / want.abs()
    }
}

#[inline]
fn precedes(a: (Topic, u32), b: (Topic, u32)) -> bool {
    a.1 > b.1 || (a.1 == b.1 && a.0 < b.0)
}

#[inline]
fn decrement_word_topic(list: &mut Vec<(Topic, u32)>, t: Topic) {
    let mut i = list.iter().position(|e| e.0 == t).expect("topic missing from word list");
    list[i].1 -= 1;
    if list[i].1 == 0 {
        // zero-count topics are not listed
        list.remove(i);
        return;
    }
    while i + 1 < list.len() && precedes(list[i + 1], list[i]) {
        list.swap(i, i + 1);
        i += 1;
    }
}

#[inline]
fn increment_word_topic(list: &mut Vec<(Topic, u32)>, t: Topic) {
    let mut i = match list.iter().position(|e| e.0 == t) {
        Some(i) => i,
        None => {
            list.push((t, 0));
            list.len() - 1
        }
    };
    list[i].1 += 1;
    while i > 0 && precedes(list[i], list[i - 1]) {
        list.swap(i, i - 1);
        i -= 1;
    }
}

fn word_topics_valid(list: &[(Topic, u32)], counts: &[u32]) -> bool {
    let ordered = list.windows(2).all(|p| precedes(p[0], p[1]));
    let nonzero = counts.iter().filter(|&&c| c > 0).count();
    ordered && list.len() == nonzero && list.iter().all(|&(t, c)| c > 0 && counts[t as usize] == c)
}
